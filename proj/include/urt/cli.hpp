#pragma once

// Command-line front end: config files, CSV/SVG emission and subcommands.
//
// Config files are flat "key = value" text with optional [section] headers;
// a key inside [grid] is addressed as "grid.key". '#' starts a comment.
// Every subcommand declares its keys with defaults and rejects anything else
// before computing.

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace urt::cli {

class Config {
 public:
  static Config parse(std::istream& in, const std::string& source);
  static Config load(const std::string& path);

  const std::map<std::string, std::string>& entries() const { return entries_; }
  void set(const std::string& key, const std::string& value) {
    entries_[key] = value;
  }

 private:
  std::map<std::string, std::string> entries_;
};

/// Allowed keys and their defaults for one subcommand.
using Schema = std::map<std::string, std::string>;

/// Config values merged over schema defaults, with typed accessors.
class Settings {
 public:
  Settings(const Schema& schema, const Config& config);

  double number(const std::string& key) const;
  int integer(const std::string& key) const;
  bool flag(const std::string& key) const;
  const std::string& text(const std::string& key) const;
  std::vector<double> numbers(const std::string& key) const;

 private:
  std::map<std::string, std::string> values_;
};

/// Numeric rows. If `labels` is non-empty it holds one text cell per row,
/// written as the first column; `header` then names that column too.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> labels;
};

/// Writes the table with 12-significant-digit numbers. Empty tables are an
/// io error and leave no file behind.
void write_csv(const std::string& path, const Table& table);

/// 800x600 SVG line plot of numeric column `y` against numeric column `x`.
void write_svg(const std::string& path, const Table& table, int x, int y,
               const std::string& title);

/// CSV at `base`.csv plus an SVG line plot of the first two columns at
/// `base`.svg.
void emit_plot_data(const std::string& base, const Table& table,
                    const std::string& title);

int run(int argc, char** argv);

}  // namespace urt::cli
