#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <sstream>

#include "urt/bohm.hpp"
#include "urt/classical_slit.hpp"
#include "urt/cli.hpp"
#include "urt/debroglie.hpp"
#include "urt/error.hpp"
#include "urt/field_io.hpp"
#include "urt/schrodinger2d.hpp"
#include "urt/uncertainty.hpp"

namespace urt::cli {
namespace {

namespace fs = std::filesystem;

struct Common {
  std::string config;
  std::string output_dir = ".";
  std::uint64_t seed = 0;
  int threads = 1;
};

[[noreturn]] void usage(const std::string& message) {
  throw Error("cli", ErrorKind::usage, message);
}

Settings settings(const Schema& schema, const Common& common) {
  return Settings(schema, common.config.empty() ? Config{}
                                                : Config::load(common.config));
}

std::string prepare_output(const Common& common) {
  std::error_code ec;
  fs::create_directories(common.output_dir, ec);
  if (ec || !fs::is_directory(common.output_dir)) {
    throw Error("cli", ErrorKind::io,
                "cannot create output directory '" + common.output_dir + "'");
  }
  if (common.threads < 1) usage("--threads must be >= 1");
  return (fs::path(common.output_dir) / "").string();
}

void print_row(const Table& t) {
  for (size_t c = 0; c < t.header.size(); ++c) {
    std::cout << (c ? "," : "") << t.header[c];
  }
  std::cout << '\n';
  for (size_t r = 0; r < t.rows.size(); ++r) {
    bool first = true;
    if (!t.labels.empty()) {
      std::cout << t.labels[r];
      first = false;
    }
    for (double v : t.rows[r]) {
      std::cout << (first ? "" : ",") << format_number(v);
      first = false;
    }
    std::cout << '\n';
  }
}

// ur-check

const Schema kUncertaintySchema{
    {"uncertainty.alpha_min", "-5"},     {"uncertainty.alpha_max", "5"},
    {"uncertainty.alpha_steps", "101"},  {"uncertainty.random_points", "2048"},
    {"uncertainty.random_extent", "80"},
};

int ur_check(const Common& common, const std::string& input, int n) {
  const Settings s = settings(kUncertaintySchema, common);
  if (input.empty() && n <= 0) usage("ur-check needs --input or --n");
  if (!input.empty() && !fs::exists(input)) {
    throw Error("cli", ErrorKind::io, "input '" + input + "' does not exist");
  }
  const int steps = s.integer("uncertainty.alpha_steps");
  if (steps < 2) usage("uncertainty.alpha_steps must be >= 2");
  const std::string out = prepare_output(common);

  if (!input.empty()) {
    const SampledField f = load_field_csv(input);
    const MomentReport r = ur_product(f);
    Table moments{{"norm_N", "x0", "p0", "var_x", "var_p", "product"},
                  {{r.norm_N, r.x0, r.p0, r.var_x, r.var_p, r.product}}, {}};
    write_csv(out + "moments.csv", moments);
    print_row(moments);

    Table scan{{"alpha", "value"}, {}, {}};
    const double a0 = s.number("uncertainty.alpha_min");
    const double a1 = s.number("uncertainty.alpha_max");
    for (int k = 0; k < steps; ++k) {
      const double alpha = a0 + (a1 - a0) * k / (steps - 1);
      scan.rows.push_back({alpha, quadratic_form(f, alpha).value});
    }
    emit_plot_data(out + "quadratic_form", scan, "quadratic form vs alpha");
    return 0;
  }

  const Grid grid = make_grid(1, s.integer("uncertainty.random_points"),
                              s.number("uncertainty.random_extent"));
  Table batch{{"index", "seed", "product"}, {}, {}};
  double lowest = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const std::uint64_t seed = common.seed + static_cast<std::uint64_t>(i);
    const double p = ur_product(random_smooth_field(grid, seed)).product;
    lowest = std::min(lowest, p);
    batch.rows.push_back({double(i), double(seed), p});
  }
  write_csv(out + "batch.csv", batch);
  print_row(Table{{"fields", "min_product"}, {{double(n), lowest}}, {}});
  return 0;
}

// packet

const Schema kPacketSchema{
    {"packet.s", "1"},          {"packet.vx", "1"},
    {"packet.vy", "0"},         {"packet.vz", "0"},
    {"packet.points", "64"},    {"packet.dt", "1e-4"},
    {"packet.halvings", "2"},   {"packet.residual_time", "0"},
    {"packet.t_start", "0"},    {"packet.t_end", "1"},
    {"packet.samples", "11"},
};

int packet(const Common& common) {
  const Settings s = settings(kPacketSchema, common);
  const PacketParams p = make_packet(
      s.number("packet.s"),
      {s.number("packet.vx"), s.number("packet.vy"), s.number("packet.vz")});
  const int samples = s.integer("packet.samples");
  if (samples < 2) usage("packet.samples must be >= 2");
  const Grid grid = packet_grid(p, s.integer("packet.points"));
  const std::string out = prepare_output(common);

  Table scan{{"n", "dt", "residual"}, {}, {}};
  double dt = s.number("packet.dt");
  for (int k = 0; k <= s.integer("packet.halvings"); ++k, dt *= 0.5) {
    const double r =
        schrodinger_residual(p, grid, s.number("packet.residual_time"), dt);
    scan.rows.push_back({double(grid.points[0]), dt, r});
  }
  write_csv(out + "residual_scan.csv", scan);

  std::vector<double> times;
  const double t0 = s.number("packet.t_start");
  const double t1 = s.number("packet.t_end");
  for (int k = 0; k < samples; ++k) {
    times.push_back(t0 + (t1 - t0) * k / (samples - 1));
  }
  const auto trajectory = peak_trajectory(p, times);
  Table peaks{{"t", "x", "y", "z"}, {}, {}};
  for (const auto& [t, r] : trajectory) peaks.rows.push_back({t, r[0], r[1], r[2]});
  emit_plot_data(out + "peak_trajectory", peaks, "peak x position vs t");

  const Eigen::Vector3d v = fitted_velocity(trajectory);
  Table summary{{"omega", "vx_fit", "vy_fit", "vz_fit"},
                {{p.omega, v[0], v[1], v[2]}}, {}};
  write_csv(out + "summary.csv", summary);
  print_row(summary);
  return 0;
}

// twoslit

const Schema kTwoSlitSchema{
    {"grid.nx", "1024"},           {"grid.ny", "512"},
    {"grid.x_extent", "92.16"},    {"grid.y_extent", "76.8"},
    {"screen.present", "true"},    {"screen.x", "0"},
    {"screen.slit_centers", "-2,2"}, {"screen.open", "1,1"},
    {"screen.slit_width", "1"},    {"screen.thickness", "0.5"},
    {"screen.barrier", "200"},     {"packet.x", "-22"},
    {"packet.y", "0"},             {"packet.vx", "10"},
    {"packet.vy", "0"},            {"packet.width", "2"},
    {"run.dt", "2.5e-3"},          {"run.total_time", "9"},
    {"run.absorber_width", "5"},   {"run.observe_x", "40"},
    {"run.snapshot_every", "0"},
};

int twoslit(const Common& common, const std::string& shutter) {
  const Settings s = settings(kTwoSlitSchema, common);
  TwoSlitConfig c;
  c.nx = s.integer("grid.nx");
  c.ny = s.integer("grid.ny");
  c.x_extent = s.number("grid.x_extent");
  c.y_extent = s.number("grid.y_extent");
  c.screen.present = s.flag("screen.present");
  c.screen.screen_x = s.number("screen.x");
  c.screen.slit_centers = s.numbers("screen.slit_centers");
  c.screen.open_flags.clear();
  for (double f : s.numbers("screen.open")) c.screen.open_flags.push_back(f != 0.0);
  c.screen.slit_width = s.number("screen.slit_width");
  c.screen.thickness = s.number("screen.thickness");
  c.screen.barrier = s.number("screen.barrier");
  c.packet_center = {s.number("packet.x"), s.number("packet.y")};
  c.velocity = {s.number("packet.vx"), s.number("packet.vy")};
  c.packet_width = s.number("packet.width");
  c.dt = s.number("run.dt");
  c.total_time = s.number("run.total_time");
  c.absorber_width = s.number("run.absorber_width");
  c.observe_x = s.number("run.observe_x");
  const int snapshot_every = s.integer("run.snapshot_every");
  if (shutter == "closed") {
    if (c.screen.open_flags.empty()) usage("no slit to close");
    c.screen.open_flags[0] = false;
  } else if (!shutter.empty() && shutter != "open") {
    usage("--shutter must be open or closed");
  }
  const std::string out = prepare_output(common);

  StepObserver observer;
  if (snapshot_every > 0) {
    observer = [&](int step, double, const SampledField& psi) {
      if (step % snapshot_every != 0) return;
      char name[32];
      std::snprintf(name, sizeof name, "snapshot_%06d.csv", step);
      save_field_csv(out + name, psi);
    };
  }
  const TwoSlitResult r = run_two_slit(c, observer);
  for (const auto& w : r.profile.warnings) {
    std::cerr << "WARNING:schrodinger2d:" << w << '\n';
  }

  Table profile{{"y", "intensity"}, {}, {}};
  for (Eigen::Index j = 0; j < r.profile.y.size(); ++j) {
    profile.rows.push_back({r.profile.y[j], r.profile.intensity[j]});
  }
  emit_plot_data(out + "profile", profile, "time-integrated intensity");

  const auto maxima = fringe_maxima(r.profile);
  double expected = std::numeric_limits<double>::quiet_NaN();
  if (c.screen.slit_centers.size() >= 2) {
    expected = fraunhofer_spacing(
        c.velocity.norm(), c.observe_x - c.screen.screen_x,
        std::abs(c.screen.slit_centers[1] - c.screen.slit_centers[0]));
  }
  double spacing = std::numeric_limits<double>::quiet_NaN();
  try {
    spacing = fringe_spacing(r.profile);
  } catch (const Error& e) {
    std::cerr << "WARNING:schrodinger2d:" << to_string(e.kind()) << ": "
              << e.what() << '\n';
  }
  Table summary{{"maxima", "periodic_maxima", "fringe_spacing",
                 "fraunhofer_spacing", "final_norm"},
                {{double(maxima.size()),
                  double(periodic_maxima_count(maxima, expected)), spacing,
                  expected, r.final_norm}},
                {}};
  write_csv(out + "summary.csv", summary);
  print_row(summary);
  return 0;
}

// bohm

const Schema kBohmSchema{
    {"bohm.case", "free"},   {"bohm.points", "512"},
    {"bohm.extent", "80"},   {"bohm.sigma", "1"},
    {"bohm.omega", "1"},     {"bohm.dt", "1e-3"},
    {"bohm.t_end", "1"},     {"bohm.trajectories_out", "10"},
    {"bohm.ks_every", "100"}, {"bohm.substeps", "1"},
};

int bohm(const Common& common, int n) {
  const Settings s = settings(kBohmSchema, common);
  const std::string which = s.text("bohm.case");
  if (which != "free" && which != "harmonic") {
    usage("bohm.case must be free or harmonic");
  }
  if (n <= 0) usage("--n must be positive");
  const Grid grid = make_grid(1, s.integer("bohm.points"), s.number("bohm.extent"));
  const double dt = s.number("bohm.dt");
  const int frames = static_cast<int>(std::lround(s.number("bohm.t_end") / dt)) + 1;
  const std::string out = prepare_output(common);

  Eigen::ArrayXd V = Eigen::ArrayXd::Zero(grid.size());
  SampledField psi0;
  if (which == "free") {
    const double sg = s.number("bohm.sigma");
    psi0 = sample_field(grid, [&](const Eigen::Vector3d& r) {
      return std::pow(2.0 * std::numbers::pi * sg * sg, -0.25) *
             std::exp(-r[0] * r[0] / (4.0 * sg * sg));
    });
  } else {
    const double w = s.number("bohm.omega");
    V = 0.5 * w * w * grid.nodes(0).square();
    psi0 = sample_field(grid, [&](const Eigen::Vector3d& r) {
      return std::pow(w / std::numbers::pi, 0.25) *
             std::exp(-0.5 * w * r[0] * r[0]);
    });
  }

  // Residuals over the last step before t_end / 2, at dt and dt / 2.
  Table residuals{{"t", "dt", "continuity", "hj"}, {}, {}};
  for (double h : {dt, 0.5 * dt}) {
    const int steps = std::max(
        1, static_cast<int>(std::lround(0.5 * s.number("bohm.t_end") / h)));
    const auto series = evolve_series(psi0, V, h, steps + 1);
    const auto& a = series[series.size() - 2];
    const auto& b = series.back();
    residuals.rows.push_back({steps * h, h, continuity_residual(a, b, h),
                              hj_residual(a, b, h, V)});
  }
  write_csv(out + "residuals.csv", residuals);

  const auto series = evolve_series(psi0, V, dt, frames);
  const FlowSeries flow = make_flow(series, 0.0, dt, V, false);
  const auto starts = sample_initial_positions(psi0, n, common.seed);
  const int substeps = s.integer("bohm.substeps");

  Table paths{{"trajectory_id", "t", "x", "y", "vx", "vy"}, {}, {}};
  const int shown = std::min(n, s.integer("bohm.trajectories_out"));
  for (int i = 0; i < shown; ++i) {
    const BohmTrajectory tr =
        integrate_trajectory(flow, {starts[i], 0.0, 0.0}, substeps);
    for (size_t k = 0; k < tr.t.size(); ++k) {
      paths.rows.push_back({double(i), tr.t[k], tr.x[k][0], 0.0, tr.v[k][0], 0.0});
    }
  }
  write_csv(out + "trajectories.csv", paths);

  Table ks{{"t", "KS_distance"}, {}, {}};
  for (const auto& [t, d] : ks_history(flow, series, starts,
                                       s.integer("bohm.ks_every"), substeps,
                                       common.threads)) {
    ks.rows.push_back({t, d});
  }
  emit_plot_data(out + "ensemble", ks, "KS distance vs t");
  print_row(Table{{"n", "final_KS"}, {{double(n), ks.rows.back()[1]}}, {}});
  return 0;
}

// classical

const Schema kClassicalSchema{
    {"geometry.outer_extent", "20"}, {"geometry.separation", "4"},
    {"geometry.slit_width", "1"},    {"geometry.segments", ""},
    {"geometry.shutter", "both"},    {"charge.x", "-20"},
    {"charge.y", "2"},               {"charge.vx", "2"},
    {"charge.vy", "0"},              {"charge.q", "1"},
    {"charge.m", "1"},               {"run.dt", "0.02"},
    {"run.near_fraction", "0.004"},  {"run.max_time", "60"},
    {"run.exit_x", "20"},            {"run.panels", "128"},
    {"run.convergence", "false"},
};

// "y0:y1; y0:y1; ..."
std::vector<Segment> parse_segments(const std::string& text) {
  std::vector<Segment> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw Error("cli", ErrorKind::configuration,
                  "segment '" + item + "' must be y0:y1");
    }
    try {
      out.push_back({std::stod(item.substr(0, colon)),
                     std::stod(item.substr(colon + 1))});
    } catch (const std::exception&) {
      throw Error("cli", ErrorKind::configuration,
                  "segment '" + item + "' is not numeric");
    }
  }
  return out;
}

int classical(const Common& common, std::string shutter) {
  const Settings s = settings(kClassicalSchema, common);
  if (shutter.empty()) shutter = s.text("geometry.shutter");
  if (shutter != "open" && shutter != "closed" && shutter != "both") {
    usage("shutter must be open, closed or both");
  }
  ChargeState c;
  c.position = {s.number("charge.x"), s.number("charge.y")};
  c.velocity = {s.number("charge.vx"), s.number("charge.vy")};
  c.q = s.number("charge.q");
  c.m = s.number("charge.m");
  const StepControl control{s.number("run.dt"), s.number("run.near_fraction")};
  const int panels = s.integer("run.panels");
  const double exit_x = s.number("run.exit_x");
  const double max_time = s.number("run.max_time");
  const double outer = s.number("geometry.outer_extent");
  const double sep = s.number("geometry.separation");
  const double width = s.number("geometry.slit_width");
  const auto explicit_segments = parse_segments(s.text("geometry.segments"));
  if (!explicit_segments.empty() && shutter != "open") {
    usage("explicit geometry.segments support only shutter = open");
  }
  const std::string out = prepare_output(common);

  const Shutter other = c.position.y() >= 0.0 ? Shutter::lower : Shutter::upper;
  auto geometry = [&](bool closed) {
    if (!explicit_segments.empty()) {
      return ScreenGeometry2D{explicit_segments, outer};
    }
    return two_slit_geometry(outer, sep, width, closed ? other : Shutter::none);
  };

  std::vector<std::pair<std::string, bool>> variants;
  if (shutter != "closed") variants.emplace_back("open", false);
  if (shutter != "open") variants.emplace_back("closed", true);

  const double quantum = quantization_length(c.m * c.velocity.norm());
  Table summary{{"variant", "exit_angle", "panel_count", "dt", "transmitted",
                 "energy_drift", "quantization_length"},
                {}, {}};
  for (const auto& [name, closed] : variants) {
    const ExitResult r =
        deflection_run(geometry(closed), panels, c, control, exit_x, max_time);
    Table tr{{"t", "x", "y", "vx", "vy", "energy"}, {}, {}};
    for (size_t k = 0; k < r.trajectory.states.size(); ++k) {
      const ChargeState& st = r.trajectory.states[k];
      tr.rows.push_back({st.t, st.position.x(), st.position.y(),
                         st.velocity.x(), st.velocity.y(),
                         r.trajectory.energy[k]});
    }
    write_csv(out + "trajectory_" + name + ".csv", tr);
    write_svg(out + "trajectory_" + name + ".svg", tr, 1, 2,
              "charge trajectory (" + name + ")");
    if (!r.transmitted) {
      std::cerr << "WARNING:classical_slit:no-transmission: " << name
                << " run did not reach x = " << exit_x << '\n';
    }
    summary.labels.push_back(name);
    summary.rows.push_back({r.angle, double(panels), control.dt,
                            r.transmitted ? 1.0 : 0.0,
                            r.trajectory.energy_drift, quantum});
  }
  write_csv(out + "summary.csv", summary);
  print_row(summary);

  if (s.flag("run.convergence")) {
    Table conv{{"variant", "panel_count", "dt", "exit_angle"}, {}, {}};
    for (const auto& [name, closed] : variants) {
      for (const auto& [n, f] : {std::pair{panels, 1.0}, std::pair{2 * panels, 1.0},
                                 std::pair{panels, 0.5}}) {
        const StepControl sc{control.dt * f, control.near_fraction * f};
        const ExitResult r =
            deflection_run(geometry(closed), n, c, sc, exit_x, max_time);
        conv.labels.push_back(name);
        conv.rows.push_back({double(n), sc.dt, r.angle});
      }
    }
    write_csv(out + "convergence.csv", conv);
  }
  return 0;
}

void add_common(CLI::App* app, Common& common) {
  app->add_option("--config", common.config, "key = value config file")
      ->check(CLI::ExistingFile);
  app->add_option("--output-dir", common.output_dir, "directory for outputs");
  app->add_option("--seed", common.seed, "random seed");
  app->add_option("--threads", common.threads, "worker threads for ensembles");
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Uncertainty relations, wave packets, two-slit propagation, "
               "Bohmian trajectories and classical slit deflection"};
  app.require_subcommand(1);

  Common common;
  std::string input, shutter;
  int n = 0;

  auto* ur = app.add_subcommand("ur-check", "moments of a field CSV, or a "
                                            "batch of random fields (--n)");
  add_common(ur, common);
  ur->add_option("--input", input, "SampledField CSV");
  ur->add_option("--n", n, "number of random fields");

  auto* pk = app.add_subcommand("packet", "nonsingular packet residuals and "
                                          "peak trajectory");
  add_common(pk, common);

  auto* ts = app.add_subcommand("twoslit", "split-step two-slit pattern");
  add_common(ts, common);
  ts->add_option("--shutter", shutter, "open or closed (closes the first slit)");

  int bohm_n = 10000;
  auto* bm = app.add_subcommand("bohm", "Madelung residuals, trajectories and "
                                        "equivariance (1-D)");
  add_common(bm, common);
  bm->add_option("--n", bohm_n, "ensemble size");

  auto* cl = app.add_subcommand("classical", "charge deflection by a "
                                             "conducting two-slit screen");
  add_common(cl, common);
  cl->add_option("--shutter", shutter, "open, closed or both");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "ERROR:cli:usage:" << e.what() << '\n';
    return 2;
  }

  try {
    if (ur->parsed()) return ur_check(common, input, n);
    if (pk->parsed()) return packet(common);
    if (ts->parsed()) return twoslit(common, shutter);
    if (bm->parsed()) return bohm(common, bohm_n);
    return classical(common, shutter);
  } catch (const Error& e) {
    std::cerr << "ERROR:" << e.module() << ':' << to_string(e.kind()) << ':'
              << e.what() << '\n';
    return e.kind() == ErrorKind::numerical ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << "ERROR:cli:numerical:" << e.what() << '\n';
    return 3;
  }
}

}  // namespace urt::cli
