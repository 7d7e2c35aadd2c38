#include "urt/bohm.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <random>
#include <thread>

#include "urt/error.hpp"

namespace urt {
namespace {

using cd = std::complex<double>;

void require(bool ok, ErrorKind kind, const std::string& message) {
  if (!ok) throw Error("bohm", kind, message);
}

double wrap(double a) {
  return std::remainder(a, 2.0 * std::numbers::pi);
}

Mask threshold_mask(const Eigen::ArrayXd& R, double threshold) {
  return R > threshold * R.maxCoeff();
}

std::vector<SampledField> gradient(const SampledField& psi) {
  std::vector<SampledField> out;
  for (int a = 0; a < psi.grid.dimension; ++a) {
    out.push_back(spectral_derivative(psi, a));
  }
  return out;
}

// Im(conj(psi) d psi) / |psi|^2 per axis, zero outside `valid`.
std::vector<Eigen::ArrayXd> phase_gradient(const SampledField& psi,
                                           const std::vector<SampledField>& d,
                                           const Mask& valid) {
  const Eigen::ArrayXd rho = psi.values.abs2();
  std::vector<Eigen::ArrayXd> out;
  for (const auto& da : d) {
    const Eigen::ArrayXd g = (psi.values.conjugate() * da.values).imag() / rho;
    out.push_back(valid.select(g, 0.0));
  }
  return out;
}

// Laplacian(R) / R from psi.
Eigen::ArrayXd laplacian_ratio(const SampledField& psi,
                               const std::vector<Eigen::ArrayXd>& grad_s) {
  const SampledField lap = laplacian(psi);
  Eigen::ArrayXd out =
      (psi.values.conjugate() * lap.values).real() / psi.values.abs2();
  for (const auto& g : grad_s) out += g.square();
  return out;
}

void check_pair(const SampledField& psi0, const SampledField& psi1, double dt) {
  require(psi0.space == Space::position && psi1.space == Space::position,
          ErrorKind::usage, "expected position-space wavefunctions");
  require(psi0.grid.points == psi1.grid.points &&
              psi0.grid.extent == psi1.grid.extent &&
              psi0.grid.center == psi1.grid.center,
          ErrorKind::usage, "slices live on different grids");
  require(dt > 0.0, ErrorKind::configuration, "dt must be positive");
}

Mask core_mask(const SampledField& psi0, const SampledField& psi1,
               double threshold) {
  return threshold_mask(psi0.values.abs(), threshold) &&
         threshold_mask(psi1.values.abs(), threshold);
}

double masked_max(const Eigen::ArrayXd& values, const Mask& mask) {
  require(mask.any(), ErrorKind::degenerate, "core region is empty");
  return mask.select(values.abs(), 0.0).maxCoeff();
}

// Corner nodes and weights for multilinear interpolation at x.
struct Stencil {
  std::array<Eigen::Index, 8> node{};
  std::array<double, 8> weight{};
  int count = 0;
};

bool locate(const Grid& g, const Eigen::Vector3d& x, Stencil& s) {
  std::array<int, 3> base{0, 0, 0};
  std::array<double, 3> frac{0.0, 0.0, 0.0};
  for (int a = 0; a < g.dimension; ++a) {
    const double u = (x[a] - g.node(a, 0)) / g.spacing(a);
    if (!(u >= 0.0 && u <= g.points[a] - 1)) return false;
    base[a] = std::min(static_cast<int>(u), g.points[a] - 2);
    frac[a] = u - base[a];
  }
  s.count = 1 << g.dimension;
  for (int c = 0; c < s.count; ++c) {
    std::array<int, 3> idx = base;
    double w = 1.0;
    for (int a = 0; a < g.dimension; ++a) {
      const bool up = (c >> a) & 1;
      idx[a] += up;
      w *= up ? frac[a] : 1.0 - frac[a];
    }
    s.node[c] = g.flat_index(idx[0], idx[1], idx[2]);
    s.weight[c] = w;
  }
  return true;
}

bool interpolate(const Stencil& s, const Mask& valid,
                 const std::vector<Eigen::ArrayXd>& field, Eigen::Vector3d& out) {
  out.setZero();
  for (int c = 0; c < s.count; ++c) {
    if (!valid[s.node[c]]) return false;
    for (size_t a = 0; a < field.size(); ++a) {
      out[a] += s.weight[c] * field[a][s.node[c]];
    }
  }
  return true;
}

// Velocity at x and time fraction f in [0, 1] between frames a and b.
bool velocity_between(const Grid& g, const FlowFrame& a, const FlowFrame& b,
                      double f, const Eigen::Vector3d& x, Eigen::Vector3d& v) {
  Stencil s;
  Eigen::Vector3d va, vb;
  if (!locate(g, x, s) || !interpolate(s, a.valid, a.v, va) ||
      !interpolate(s, b.valid, b.v, vb)) {
    return false;
  }
  v = (1.0 - f) * va + f * vb;
  return true;
}

// One RK4 step of length h starting at time fraction f, covering df.
bool rk4_step(const Grid& g, const FlowFrame& a, const FlowFrame& b, double f,
              double df, double h, Eigen::Vector3d& x) {
  Eigen::Vector3d k1, k2, k3, k4;
  if (!velocity_between(g, a, b, f, x, k1) ||
      !velocity_between(g, a, b, f + 0.5 * df, x + 0.5 * h * k1, k2) ||
      !velocity_between(g, a, b, f + 0.5 * df, x + 0.5 * h * k2, k3) ||
      !velocity_between(g, a, b, f + df, x + h * k3, k4)) {
    return false;
  }
  x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  return true;
}

// Piecewise-linear CDF of the node density, on nodes.
Eigen::ArrayXd node_cdf(const SampledField& psi) {
  const Eigen::ArrayXd rho = psi.values.abs2();
  Eigen::ArrayXd cdf(rho.size());
  cdf[0] = 0.0;
  for (Eigen::Index k = 1; k < rho.size(); ++k) {
    cdf[k] = cdf[k - 1] + 0.5 * (rho[k - 1] + rho[k]);
  }
  require(cdf[rho.size() - 1] > 0.0, ErrorKind::degenerate,
          "density has zero mass");
  return cdf / cdf[rho.size() - 1];
}

double cdf_at(const SampledField& psi, const Eigen::ArrayXd& cdf, double x) {
  const Grid& g = psi.grid;
  const double u = (x - g.node(0, 0)) / g.spacing(0);
  if (u <= 0.0) return 0.0;
  if (u >= g.points[0] - 1) return 1.0;
  const int k = static_cast<int>(u);
  const double f = u - k;
  // Exact integral of the linear interpolant of rho within the cell.
  const Eigen::ArrayXd& c = cdf;
  const double r0 = std::norm(psi.values[k]);
  const double r1 = std::norm(psi.values[k + 1]);
  const double cell = c[k + 1] - c[k];
  const double mass = 0.5 * (r0 + r1);
  if (mass <= 0.0) return c[k];
  const double part = (r0 * f + 0.5 * (r1 - r0) * f * f) / mass;
  return c[k] + cell * part;
}

template <typename Fn>
void parallel_for(int n, int threads, Fn&& fn) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      for (int i = w; i < n; i += threads) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

MadelungFields decompose(const SampledField& psi, double threshold) {
  require(psi.space == Space::position, ErrorKind::usage,
          "expected a position-space wavefunction");
  const Grid& g = psi.grid;
  MadelungFields f;
  f.grid = g;
  f.R = psi.values.abs();
  require(f.R.maxCoeff() > 0.0, ErrorKind::degenerate, "psi is identically 0");
  f.valid = threshold_mask(f.R, threshold);
  f.S.resize(g.size());
  for (Eigen::Index n = 0; n < g.size(); ++n) f.S[n] = std::arg(psi.values[n]);

  // Breadth-first unwrap along grid lines within the valid region.
  std::vector<char> seen(static_cast<size_t>(g.size()), 0);
  std::deque<Eigen::Index> queue;
  for (Eigen::Index start = 0; start < g.size(); ++start) {
    if (!f.valid[start] || seen[start]) continue;
    ++f.components;
    seen[start] = 1;
    queue.push_back(start);
    while (!queue.empty()) {
      const Eigen::Index cur = queue.front();
      queue.pop_front();
      const auto idx = g.unflatten(cur);
      for (int a = 0; a < g.dimension; ++a) {
        for (int step : {-1, 1}) {
          auto nb = idx;
          nb[a] += step;
          if (nb[a] < 0 || nb[a] >= g.points[a]) continue;
          const Eigen::Index m = g.flat_index(nb[0], nb[1], nb[2]);
          if (!f.valid[m] || seen[m]) continue;
          seen[m] = 1;
          f.S[m] = f.S[cur] + wrap(std::arg(psi.values[m]) - f.S[cur]);
          queue.push_back(m);
        }
      }
    }
  }
  if (f.components > 1) {
    f.warnings.push_back(
        "disconnected high-density region: " + std::to_string(f.components) +
        " components unwrapped separately (phase offsets arbitrary)");
  }
  return f;
}

SampledField reconstruct(const MadelungFields& fields) {
  SampledField psi = make_field(fields.grid);
  for (Eigen::Index n = 0; n < psi.values.size(); ++n) {
    psi.values[n] = std::polar(fields.R[n], fields.S[n]);
  }
  return psi;
}

QuantumPotentialField quantum_potential(const MadelungFields& fields) {
  const SampledField psi = reconstruct(fields);
  const auto grad_s = phase_gradient(psi, gradient(psi), fields.valid);
  const Eigen::ArrayXd ratio = laplacian_ratio(psi, grad_s);
  return {fields.valid.select(-0.5 * ratio, 0.0), fields.valid};
}

std::vector<Eigen::ArrayXd> velocity_field(const MadelungFields& fields) {
  const SampledField psi = reconstruct(fields);
  return phase_gradient(psi, gradient(psi), fields.valid);
}

double continuity_residual(const SampledField& psi0, const SampledField& psi1,
                           double dt, const ResidualOptions& options) {
  check_pair(psi0, psi1, dt);
  const Grid& g = psi0.grid;
  Eigen::ArrayXd div = Eigen::ArrayXd::Zero(g.size());
  for (const SampledField* psi : {&psi0, &psi1}) {
    const auto d = gradient(*psi);
    for (int a = 0; a < g.dimension; ++a) {
      SampledField j = make_field(g);
      j.values = (psi->values.conjugate() * d[a].values).imag().cast<cd>();
      div += 0.5 * spectral_derivative(j, a).values.real();
    }
  }
  const Eigen::ArrayXd r =
      (psi1.values.abs2() - psi0.values.abs2()) / dt + div;
  return masked_max(r, core_mask(psi0, psi1, options.core_threshold));
}

double hj_residual(const SampledField& psi0, const SampledField& psi1,
                   double dt, const Eigen::ArrayXd& potential,
                   const ResidualOptions& options) {
  check_pair(psi0, psi1, dt);
  const Grid& g = psi0.grid;
  const Eigen::ArrayXd V =
      potential.size() ? potential : Eigen::ArrayXd::Zero(g.size());
  require(V.size() == g.size(), ErrorKind::usage, "potential size mismatch");

  const Mask all = Mask::Constant(g.size(), true);
  Eigen::ArrayXd sum = Eigen::ArrayXd::Zero(g.size());
  for (const SampledField* psi : {&psi0, &psi1}) {
    const auto grad_s = phase_gradient(*psi, gradient(*psi), all);
    Eigen::ArrayXd kinetic = Eigen::ArrayXd::Zero(g.size());
    for (const auto& gs : grad_s) kinetic += 0.5 * gs.square();
    const Eigen::ArrayXd Q = -0.5 * laplacian_ratio(*psi, grad_s);
    sum += 0.5 * (kinetic + V + options.q_sign * Q);
  }
  Eigen::ArrayXd ds(g.size());
  for (Eigen::Index n = 0; n < g.size(); ++n) {
    ds[n] = std::arg(psi1.values[n] * std::conj(psi0.values[n])) / dt;
  }
  return masked_max(ds + sum, core_mask(psi0, psi1, options.core_threshold));
}

FlowFrame make_frame(const SampledField& psi, const Eigen::ArrayXd& potential,
                     bool with_force) {
  const Grid& g = psi.grid;
  FlowFrame f;
  f.valid = threshold_mask(psi.values.abs(), kMaskThreshold);
  const auto d = gradient(psi);
  f.v = phase_gradient(psi, d, f.valid);
  if (!with_force) return f;

  const Eigen::ArrayXd V =
      potential.size() ? potential : Eigen::ArrayXd::Zero(g.size());
  f.total_potential =
      f.valid.select(V - 0.5 * laplacian_ratio(psi, f.v), 0.0);
  f.force_valid = f.valid;
  for (int a = 0; a < g.dimension; ++a) {
    Eigen::ArrayXd force = Eigen::ArrayXd::Zero(g.size());
    const double h = g.spacing(a);
    for (Eigen::Index n = 0; n < g.size(); ++n) {
      const auto idx = g.unflatten(n);
      bool ok = idx[a] >= 2 && idx[a] + 2 < g.points[a];
      std::array<Eigen::Index, 5> s{};
      for (int o = -2; o <= 2 && ok; ++o) {
        auto nb = idx;
        nb[a] += o;
        s[o + 2] = g.flat_index(nb[0], nb[1], nb[2]);
        ok = f.valid[s[o + 2]];
      }
      if (!ok) {
        f.force_valid[n] = false;
        continue;
      }
      const auto& u = f.total_potential;
      force[n] = -(u[s[0]] - 8.0 * u[s[1]] + 8.0 * u[s[3]] - u[s[4]]) /
                 (12.0 * h);
    }
    f.force.push_back(force);
  }
  return f;
}

FlowSeries make_flow(const std::vector<SampledField>& psi_series, double t0,
                     double dt, const Eigen::ArrayXd& potential,
                     bool with_force) {
  require(psi_series.size() >= 2, ErrorKind::configuration,
          "need at least two slices");
  require(dt > 0.0, ErrorKind::configuration, "dt must be positive");
  FlowSeries flow;
  flow.grid = psi_series.front().grid;
  flow.t0 = t0;
  flow.dt = dt;
  flow.frames.reserve(psi_series.size());
  for (const auto& psi : psi_series) {
    flow.frames.push_back(make_frame(psi, potential, with_force));
  }
  return flow;
}

std::vector<SampledField> evolve_series(const SampledField& psi0,
                                        const Eigen::ArrayXd& potential,
                                        double dt, int n_frames) {
  const Eigen::ArrayXd V =
      potential.size() ? potential : Eigen::ArrayXd::Zero(psi0.grid.size());
  const SplitStepPropagator prop(psi0.grid, V, dt);
  std::vector<SampledField> out;
  out.reserve(static_cast<size_t>(n_frames));
  out.push_back(psi0);
  for (int k = 1; k < n_frames; ++k) {
    out.push_back(out.back());
    prop.step(out.back());
  }
  return out;
}

bool interpolate_velocity(const Grid& grid, const FlowFrame& frame,
                          const Eigen::Vector3d& x, Eigen::Vector3d& v) {
  Stencil s;
  return locate(grid, x, s) && interpolate(s, frame.valid, frame.v, v);
}

bool rk4_segment(const Grid& grid, const FlowFrame& a, const FlowFrame& b,
                 double ta, double tb, int substeps, Eigen::Vector3d& x) {
  const double df = 1.0 / substeps;
  for (int s = 0; s < substeps; ++s) {
    if (!rk4_step(grid, a, b, s * df, df, (tb - ta) * df, x)) return false;
  }
  return true;
}

BohmTrajectory integrate_trajectory(const FlowSeries& flow,
                                    const Eigen::Vector3d& x0, int substeps) {
  require(substeps >= 1, ErrorKind::configuration, "substeps must be >= 1");
  BohmTrajectory tr;
  Eigen::Vector3d x = x0;
  Eigen::Vector3d v;
  if (!interpolate_velocity(flow.grid, flow.frames[0], x, v)) {
    tr.truncated = true;
    return tr;
  }
  tr.t.push_back(flow.t0);
  tr.x.push_back(x);
  tr.v.push_back(v);
  for (size_t k = 1; k < flow.frames.size(); ++k) {
    const double ta = flow.t0 + (k - 1) * flow.dt;
    const double tb = flow.t0 + k * flow.dt;
    if (!rk4_segment(flow.grid, flow.frames[k - 1], flow.frames[k], ta, tb,
                     substeps, x) ||
        !interpolate_velocity(flow.grid, flow.frames[k], x, v)) {
      tr.truncated = true;
      break;
    }
    tr.t.push_back(tb);
    tr.x.push_back(x);
    tr.v.push_back(v);
  }
  return tr;
}

NewtonReport newton_consistency(const BohmTrajectory& tr,
                                const FlowSeries& flow) {
  require(!flow.frames.empty() && !flow.frames[0].force.empty(),
          ErrorKind::usage, "flow was built without force fields");
  NewtonReport report;
  const Grid& g = flow.grid;
  for (size_t k = 1; k + 1 < tr.t.size(); ++k) {
    const double dt = tr.t[k + 1] - tr.t[k - 1];
    const Eigen::Vector3d accel = (tr.v[k + 1] - tr.v[k - 1]) / dt;
    const auto frame = static_cast<size_t>(
        std::lround((tr.t[k] - flow.t0) / flow.dt));
    Stencil s;
    Eigen::Vector3d force;
    if (frame >= flow.frames.size() || !locate(g, tr.x[k], s) ||
        !interpolate(s, flow.frames[frame].force_valid,
                     flow.frames[frame].force, force)) {
      ++report.skipped;
      continue;
    }
    ++report.used;
    report.max_residual = std::max(report.max_residual, (accel - force).norm());
  }
  return report;
}

std::vector<double> sample_initial_positions(const SampledField& psi, int n,
                                             std::uint64_t seed) {
  require(psi.grid.dimension == 1, ErrorKind::usage,
          "inverse-CDF sampling is one-dimensional");
  require(n > 0, ErrorKind::configuration, "ensemble size must be positive");
  const Eigen::ArrayXd cdf = node_cdf(psi);
  const Grid& g = psi.grid;
  std::vector<double> out(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(i)};
    std::mt19937_64 rng(seq);
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    // Cell containing u, then solve the quadratic of cdf_at within it.
    const auto it = std::upper_bound(cdf.data(), cdf.data() + cdf.size(), u);
    const int k = std::clamp(static_cast<int>(it - cdf.data()) - 1, 0,
                             g.points[0] - 2);
    double lo = 0.0, hi = 1.0;
    for (int iter = 0; iter < 60; ++iter) {
      const double mid = 0.5 * (lo + hi);
      const double x = g.node(0, k) + mid * g.spacing(0);
      (cdf_at(psi, cdf, x) < u ? lo : hi) = mid;
    }
    out[i] = g.node(0, k) + 0.5 * (lo + hi) * g.spacing(0);
  }
  return out;
}

double ks_distance(std::vector<double> samples, const SampledField& psi) {
  require(psi.grid.dimension == 1, ErrorKind::usage,
          "KS distance is one-dimensional");
  require(!samples.empty(), ErrorKind::degenerate, "no samples");
  const Eigen::ArrayXd cdf = node_cdf(psi);
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    const double F = cdf_at(psi, cdf, samples[i]);
    d = std::max({d, (i + 1) / n - F, F - i / n});
  }
  return d;
}

EquivarianceReport equivariance_check(const FlowSeries& flow,
                                      const SampledField& psi_final,
                                      const std::vector<double>& starts,
                                      int substeps, int threads) {
  require(flow.grid.dimension == 1, ErrorKind::usage,
          "equivariance check is one-dimensional");
  const int n = static_cast<int>(starts.size());
  std::vector<double> end(starts.size());
  std::vector<char> lost(starts.size(), 0);
  parallel_for(n, threads, [&](int i) {
    Eigen::Vector3d x(starts[i], 0.0, 0.0);
    for (size_t k = 1; k < flow.frames.size(); ++k) {
      if (!rk4_segment(flow.grid, flow.frames[k - 1], flow.frames[k],
                       flow.t0 + (k - 1) * flow.dt, flow.t0 + k * flow.dt,
                       substeps, x)) {
        lost[i] = 1;
        break;
      }
    }
    end[i] = x[0];
  });

  EquivarianceReport r;
  r.n = n;
  for (int i = 0; i < n; ++i) {
    if (lost[i]) {
      ++r.truncated;
    } else {
      r.endpoints.push_back(end[i]);
    }
  }
  require(r.truncated <= 0.2 * n, ErrorKind::invalid_ensemble,
          std::to_string(r.truncated) + " of " + std::to_string(n) +
              " trajectories truncated");
  r.ks = ks_distance(r.endpoints, psi_final);
  return r;
}

std::vector<std::pair<double, double>> ks_history(
    const FlowSeries& flow, const std::vector<SampledField>& psi_series,
    const std::vector<double>& starts, int every, int substeps, int threads) {
  require(flow.grid.dimension == 1, ErrorKind::usage,
          "KS history is one-dimensional");
  require(psi_series.size() == flow.frames.size(), ErrorKind::usage,
          "series and flow lengths differ");
  require(every >= 1, ErrorKind::configuration, "interval must be >= 1");
  const int n = static_cast<int>(starts.size());
  std::vector<double> x(starts);
  std::vector<char> lost(starts.size(), 0);
  std::vector<std::pair<double, double>> out;
  auto record = [&](size_t k) {
    std::vector<double> alive;
    for (int i = 0; i < n; ++i) {
      if (!lost[i]) alive.push_back(x[i]);
    }
    out.emplace_back(flow.t0 + k * flow.dt, ks_distance(alive, psi_series[k]));
  };
  record(0);
  for (size_t k = 1; k < flow.frames.size(); ++k) {
    parallel_for(n, threads, [&](int i) {
      if (lost[i]) return;
      Eigen::Vector3d r(x[i], 0.0, 0.0);
      if (!rk4_segment(flow.grid, flow.frames[k - 1], flow.frames[k],
                       flow.t0 + (k - 1) * flow.dt, flow.t0 + k * flow.dt,
                       substeps, r)) {
        lost[i] = 1;
      }
      x[i] = r[0];
    });
    if (k % every == 0 || k + 1 == flow.frames.size()) record(k);
  }
  return out;
}

CrossingEnsemble::CrossingEnsemble(const SampledField& psi0, int n,
                                   std::uint64_t seed, double observe_x,
                                   int frame_stride, int substeps)
    : grid_(psi0.grid),
      observe_x_(observe_x),
      stride_(frame_stride),
      substeps_(substeps) {
  require(grid_.dimension == 2, ErrorKind::usage, "ensemble grids are 2-D");
  require(n > 0 && frame_stride >= 1 && substeps >= 1,
          ErrorKind::configuration, "invalid ensemble parameters");

  // Systematic sampling of the node CDF: sample i draws from the i-th of n
  // equal-mass strata, so every sample is still |psi|^2 distributed but the
  // ensemble has far less shot noise than iid draws. Then uniform in the cell.
  const Eigen::ArrayXd rho = psi0.values.abs2();
  std::vector<double> cdf(static_cast<size_t>(rho.size()));
  double acc = 0.0;
  for (Eigen::Index k = 0; k < rho.size(); ++k) cdf[k] = acc += rho[k];
  require(acc > 0.0, ErrorKind::degenerate, "density has zero mass");

  for (int i = 0; i < n; ++i) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(i)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const double u = (i + uni(rng)) / n * acc;
    const auto node = std::min<Eigen::Index>(
        std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin(),
        rho.size() - 1);
    Eigen::Vector3d x = grid_.position(node);
    for (int a = 0; a < 2; ++a) x[a] += (uni(rng) - 0.5) * grid_.spacing(a);
    starts_.push_back(x);
  }
  positions_ = starts_;
  active_.assign(starts_.size(), 1);
  crossings_.assign(starts_.size(), std::numeric_limits<double>::quiet_NaN());
}

void CrossingEnsemble::observe(int step, double t, const SampledField& psi) {
  if (step % stride_ != 0) return;
  FlowFrame frame = make_frame(psi, {}, false);
  if (have_previous_) {
    const double h = (t - t_previous_) / substeps_;
    const double df = 1.0 / substeps_;
    for (size_t i = 0; i < positions_.size(); ++i) {
      if (!active_[i]) continue;
      Eigen::Vector3d& x = positions_[i];
      for (int s = 0; s < substeps_; ++s) {
        const Eigen::Vector3d before = x;
        if (!rk4_step(grid_, previous_, frame, s * df, df, h, x)) {
          active_[i] = 0;
          ++lost_;
          break;
        }
        if (before[0] < observe_x_ && x[0] >= observe_x_) {
          const double w = (observe_x_ - before[0]) / (x[0] - before[0]);
          crossings_[i] = before[1] + w * (x[1] - before[1]);
          active_[i] = 0;
          break;
        }
      }
    }
  }
  previous_ = std::move(frame);
  t_previous_ = t;
  have_previous_ = true;
}

Profile CrossingEnsemble::histogram(double bin_width) const {
  require(bin_width > 0.0, ErrorKind::configuration, "bin width must be > 0");
  const double lo = grid_.node(1, 0);
  const double span = grid_.node(1, grid_.points[1] - 1) - lo;
  const int bins = std::max(1, static_cast<int>(std::floor(span / bin_width)));
  Profile p;
  p.y.resize(bins);
  p.intensity = Eigen::ArrayXd::Zero(bins);
  for (int b = 0; b < bins; ++b) p.y[b] = lo + (b + 0.5) * bin_width;
  int count = 0;
  for (double y : crossings_) {
    if (std::isnan(y)) continue;
    const int b = static_cast<int>(std::floor((y - lo) / bin_width));
    if (b < 0 || b >= bins) continue;
    p.intensity[b] += 1.0;
    ++count;
  }
  if (count == 0) {
    p.warnings.push_back("empty-profile: no trajectory crossed the plane");
  } else {
    p.intensity /= count * bin_width;
  }
  return p;
}

}  // namespace urt
