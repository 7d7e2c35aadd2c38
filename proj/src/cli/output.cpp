#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "urt/cli.hpp"
#include "urt/error.hpp"
#include "urt/field_io.hpp"

namespace urt::cli {
namespace {

[[noreturn]] void io_fail(const std::string& message) {
  throw Error("cli", ErrorKind::io, message);
}

std::string svg_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

void write_csv(const std::string& path, const Table& table) {
  if (table.rows.empty()) io_fail("refusing to write empty series to " + path);
  std::ofstream out(path);
  if (!out) io_fail("cannot open '" + path + "' for writing");
  for (size_t c = 0; c < table.header.size(); ++c) {
    out << (c ? "," : "") << table.header[c];
  }
  out << '\n';
  for (size_t r = 0; r < table.rows.size(); ++r) {
    bool first = true;
    if (!table.labels.empty()) {
      out << table.labels[r];
      first = false;
    }
    for (double v : table.rows[r]) {
      out << (first ? "" : ",") << format_number(v);
      first = false;
    }
    out << '\n';
  }
  if (!out) io_fail("write failed for '" + path + "'");
}

void write_svg(const std::string& path, const Table& table, int x, int y,
               const std::string& title) {
  if (table.rows.empty()) io_fail("refusing to plot empty series to " + path);
  const double W = 800.0, H = 600.0, margin = 60.0;
  const size_t offset = table.labels.empty() ? 0 : 1;
  double x0 = table.rows[0][x], x1 = x0, y0 = table.rows[0][y], y1 = y0;
  for (const auto& r : table.rows) {
    x0 = std::min(x0, r[x]);
    x1 = std::max(x1, r[x]);
    y0 = std::min(y0, r[y]);
    y1 = std::max(y1, r[y]);
  }
  if (x1 == x0) x1 = x0 + 1.0;
  if (y1 == y0) y1 = y0 + 1.0;
  auto px = [&](double v) { return margin + (v - x0) / (x1 - x0) * (W - 2 * margin); };
  auto py = [&](double v) { return H - margin - (v - y0) / (y1 - y0) * (H - 2 * margin); };

  std::ofstream out(path);
  if (!out) io_fail("cannot open '" + path + "' for writing");
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" "
         "viewBox=\"0 0 800 600\">\n";
  out << "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
  out << "<text x=\"400\" y=\"30\" text-anchor=\"middle\">" << title
      << "</text>\n";
  out << "<line x1=\"" << margin << "\" y1=\"" << H - margin << "\" x2=\""
      << W - margin << "\" y2=\"" << H - margin << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\""
      << margin << "\" y2=\"" << H - margin << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << margin << "\" y=\"" << H - 35 << "\">"
      << format_number(x0) << "</text>\n";
  out << "<text x=\"" << W - margin << "\" y=\"" << H - 35
      << "\" text-anchor=\"end\">" << format_number(x1) << "</text>\n";
  out << "<text x=\"5\" y=\"" << H - margin << "\">" << format_number(y0)
      << "</text>\n";
  out << "<text x=\"5\" y=\"" << margin << "\">" << format_number(y1)
      << "</text>\n";
  out << "<text x=\"400\" y=\"" << H - 10 << "\" text-anchor=\"middle\">"
      << table.header[x + offset] << "</text>\n";
  out << "<text x=\"15\" y=\"300\" transform=\"rotate(-90 15 300)\" "
         "text-anchor=\"middle\">"
      << table.header[y + offset] << "</text>\n";
  out << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" "
         "points=\"";
  for (const auto& r : table.rows) {
    out << svg_number(px(r[x])) << ',' << svg_number(py(r[y])) << ' ';
  }
  out << "\"/>\n</svg>\n";
  if (!out) io_fail("write failed for '" + path + "'");
}

void emit_plot_data(const std::string& base, const Table& table,
                    const std::string& title) {
  write_csv(base + ".csv", table);
  write_svg(base + ".svg", table, 0, 1, title);
}

}  // namespace urt::cli
