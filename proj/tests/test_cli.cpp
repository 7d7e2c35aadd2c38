#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "urt/cli.hpp"
#include "urt/error.hpp"
#include "urt/field_io.hpp"
#include "urt/uncertainty.hpp"

using namespace urt;
using namespace urt::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "urt_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "urt");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run(static_cast<int>(argv.size()), argv.data());
}

SampledField gaussian(double extent) {
  return sample_field(make_grid(1, 256, extent), [](const Eigen::Vector3d& r) {
    return std::exp(-0.5 * r[0] * r[0]);
  });
}

}  // namespace

TEST_CASE("config parsing") {
  std::istringstream in(
      "# comment\n"
      "top = 1\n"
      "[grid]\n"
      "nx = 64   # trailing\n"
      "  name = two words\n");
  const Config c = Config::parse(in, "test");
  CHECK(c.entries().at("top") == "1");
  CHECK(c.entries().at("grid.nx") == "64");
  CHECK(c.entries().at("grid.name") == "two words");

  std::istringstream dup("a = 1\na = 2\n");
  CHECK_THROWS_AS(Config::parse(dup, "dup"), Error);
  std::istringstream junk("no equals sign\n");
  CHECK_THROWS_AS(Config::parse(junk, "junk"), Error);
}

TEST_CASE("settings merge and validate") {
  const Schema schema{{"a", "1.5"}, {"b", "3"}, {"f", "true"}, {"l", "1,2,3"}};
  Config c;
  c.set("b", "7");
  const Settings s(schema, c);
  CHECK(s.number("a") == 1.5);
  CHECK(s.integer("b") == 7);
  CHECK(s.flag("f"));
  CHECK(s.numbers("l") == std::vector<double>{1, 2, 3});

  Config unknown;
  unknown.set("zzz", "1");
  try {
    Settings bad(schema, unknown);
    FAIL("unknown key accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::configuration);
  }
  Config text;
  text.set("a", "abc");
  CHECK_THROWS_AS(Settings(schema, text).number("a"), Error);
  Config frac;
  frac.set("b", "2.5");
  CHECK_THROWS_AS(Settings(schema, frac).integer("b"), Error);
}

TEST_CASE("CSV and SVG output") {
  const fs::path dir = scratch("output");
  Table t{{"x", "y"}, {{0, 1}, {1, 0}, {2, 1}, {3, 0}, {4, 1}}, {}};
  write_csv((dir / "t.csv").string(), t);
  const std::string csv = slurp(dir / "t.csv");
  CHECK(csv.rfind("x,y\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);

  write_svg((dir / "t.svg").string(), t, 0, 1, "zigzag");
  const std::string svg = slurp(dir / "t.svg");
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(svg.find("zigzag") != std::string::npos);

  try {
    write_csv((dir / "empty.csv").string(), Table{{"x"}, {}, {}});
    FAIL("empty table written");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::io);
  }
  CHECK_FALSE(fs::exists(dir / "empty.csv"));
  CHECK_THROWS_AS(write_csv((dir / "missing" / "x.csv").string(), t), Error);
}

TEST_CASE("field CSV round trip") {
  const fs::path dir = scratch("field");
  SampledField f = gaussian(40.0);
  f.values *= std::complex<double>(0.6, -0.8);
  save_field_csv((dir / "f.csv").string(), f);
  const SampledField g = load_field_csv((dir / "f.csv").string());
  CHECK(g.grid.points == f.grid.points);
  CHECK(g.grid.extent[0] == doctest::Approx(40.0));
  CHECK((g.values - f.values).abs().maxCoeff() < 1e-10);
  CHECK(format_number(-0.0) == format_number(0.0));

  std::istringstream bad("x,re,im\n1,2\n");
  CHECK_THROWS_AS(read_field_csv(bad), Error);
}

TEST_CASE("ur-check end to end") {
  const fs::path dir = scratch("ur");
  save_field_csv((dir / "gaussian.csv").string(), gaussian(40.0));
  CHECK(invoke({"ur-check", "--input", (dir / "gaussian.csv").string(),
                "--output-dir", dir.string()}) == 0);
  const std::string m = slurp(dir / "moments.csv");
  CHECK(m.rfind("norm_N,x0,p0,var_x,var_p,product\n", 0) == 0);
  CHECK(fs::exists(dir / "quadratic_form.svg"));

  save_field_csv((dir / "wide.csv").string(), gaussian(8.0));
  CHECK(invoke({"ur-check", "--input", (dir / "wide.csv").string(),
                "--output-dir", dir.string()}) == 2);

  CHECK(invoke({"ur-check", "--input", (dir / "absent.csv").string()}) == 2);
  CHECK(invoke({"no-such-command"}) == 2);
  CHECK(invoke({"ur-check", "--threads", "x"}) == 2);
}

TEST_CASE("classical end to end") {
  const fs::path dir = scratch("classical");
  {
    std::ofstream cfg(dir / "twoslit.cfg");
    cfg << "[run]\npanels = 32\n";
  }
  CHECK(invoke({"classical", "--config", (dir / "twoslit.cfg").string(),
                "--shutter", "closed", "--output-dir", dir.string()}) == 0);
  const std::string s = slurp(dir / "summary.csv");
  CHECK(s.rfind("variant,exit_angle,", 0) == 0);
  CHECK(s.find("\nclosed,") != std::string::npos);
  CHECK(fs::exists(dir / "trajectory_closed.svg"));

  {
    std::ofstream cfg(dir / "bad.cfg");
    cfg << "[run]\npanels = 32\nbogus = 1\n";
  }
  CHECK(invoke({"classical", "--config", (dir / "bad.cfg").string(),
                "--output-dir", dir.string()}) == 2);
}
