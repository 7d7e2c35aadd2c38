#include "urt/field_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "urt/error.hpp"

namespace urt {
namespace {

[[noreturn]] void fail(ErrorKind kind, const std::string& message) {
  throw Error("grid", kind, message);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    cell.erase(0, cell.find_first_not_of(" \t\r"));
    cell.erase(cell.find_last_not_of(" \t\r") + 1);
    out.push_back(cell);
  }
  return out;
}

double parse_double(const std::string& s) {
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    fail(ErrorKind::io, "not a number: '" + s + "'");
  }
  if (used != s.size()) fail(ErrorKind::io, "not a number: '" + s + "'");
  return v;
}

constexpr const char* kPositionAxes[] = {"x", "y", "z"};
constexpr const char* kMomentumAxes[] = {"px", "py", "pz"};

}  // namespace

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.11e", value == 0.0 ? 0.0 : value);
  return buf;
}

void write_field_csv(std::ostream& out, const SampledField& field) {
  const Grid& g = field.grid;
  const auto& names =
      field.space == Space::position ? kPositionAxes : kMomentumAxes;
  for (int a = 0; a < g.dimension; ++a) out << names[a] << ',';
  out << "re,im\n";
  for (Eigen::Index n = 0; n < g.size(); ++n) {
    const Eigen::Vector3d r = g.position(n);
    for (int a = 0; a < g.dimension; ++a) out << format_number(r[a]) << ',';
    out << format_number(field.values[n].real()) << ','
        << format_number(field.values[n].imag()) << '\n';
  }
}

SampledField read_field_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::io, "empty field file");
  const auto header = split(line);
  const int dim = static_cast<int>(header.size()) - 2;
  if (dim < 1 || dim > 3 || header[dim] != "re" || header[dim + 1] != "im") {
    fail(ErrorKind::io, "header must be '<axes>,re,im'");
  }
  Space space = Space::position;
  for (int a = 0; a < dim; ++a) {
    if (header[a] == kMomentumAxes[a]) {
      space = Space::momentum;
    } else if (header[a] != kPositionAxes[a]) {
      fail(ErrorKind::io, "unexpected axis name '" + header[a] + "'");
    }
  }

  std::vector<std::array<double, 3>> coords;
  std::vector<std::complex<double>> values;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split(line);
    if (static_cast<int>(cells.size()) != dim + 2) {
      fail(ErrorKind::io, "row has wrong column count: " + line);
    }
    std::array<double, 3> c{0.0, 0.0, 0.0};
    for (int a = 0; a < dim; ++a) c[a] = parse_double(cells[a]);
    coords.push_back(c);
    values.emplace_back(parse_double(cells[dim]), parse_double(cells[dim + 1]));
  }
  if (coords.empty()) fail(ErrorKind::io, "field file has no rows");

  std::array<int, 3> points{1, 1, 1};
  std::array<double, 3> extent{1.0, 1.0, 1.0};
  std::array<double, 3> center{0.0, 0.0, 0.0};
  for (int a = 0; a < dim; ++a) {
    std::vector<double> axis;
    axis.reserve(coords.size());
    for (const auto& c : coords) axis.push_back(c[a]);
    std::sort(axis.begin(), axis.end());
    const double span = axis.back() - axis.front();
    const double tol = 1e-9 * std::max(span, 1e-300);
    axis.erase(std::unique(axis.begin(), axis.end(),
                           [tol](double l, double r) { return r - l <= tol; }),
               axis.end());
    const int n = static_cast<int>(axis.size());
    if (n < 2) fail(ErrorKind::io, "axis with a single coordinate");
    const double h = span / (n - 1);
    points[a] = n;
    extent[a] = n * h;
    center[a] = axis.front() + 0.5 * extent[a];
  }
  const auto d = static_cast<size_t>(dim);
  Grid grid = make_grid(std::span(points.data(), d), std::span(extent.data(), d),
                        std::span(center.data(), d));
  if (grid.size() != static_cast<Eigen::Index>(values.size())) {
    fail(ErrorKind::io, "row count does not match the inferred grid");
  }

  SampledField field = make_field(grid, space);
  for (size_t n = 0; n < values.size(); ++n) {
    // Rows are placed by coordinate, so any row order is accepted.
    std::array<int, 3> idx{0, 0, 0};
    for (int a = 0; a < dim; ++a) {
      const double k = (coords[n][a] - grid.node(a, 0)) / grid.spacing(a);
      idx[a] = static_cast<int>(std::lround(k));
    }
    field.values[grid.flat_index(idx[0], idx[1], idx[2])] = values[n];
  }
  if (!is_finite(field)) fail(ErrorKind::io, "field contains NaN or Inf");
  return field;
}

void save_field_csv(const std::string& path, const SampledField& field) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::io, "cannot open '" + path + "' for writing");
  write_field_csv(out, field);
  if (!out) fail(ErrorKind::io, "write failed for '" + path + "'");
}

SampledField load_field_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open '" + path + "'");
  return read_field_csv(in);
}

}  // namespace urt
