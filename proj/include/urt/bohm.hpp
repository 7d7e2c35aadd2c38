#pragma once

// Madelung form psi = R exp(iS) (hbar = m = 1): continuity and quantum
// Hamilton-Jacobi residuals, the quantum potential Q = -Laplacian(R) / (2R),
// the guidance field v = grad S, and Bohmian trajectories integrated through
// a time series of wavefunctions.
//
// Derivatives are taken of psi, never of R or S directly: grad S is
// Im(conj(psi) grad psi) / |psi|^2 and Laplacian(R)/R is
// Re(conj(psi) Laplacian psi) / |psi|^2 + |grad S|^2. Both are smooth where
// psi is, which R and the unwrapped S need not be.

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "urt/grid.hpp"
#include "urt/schrodinger2d.hpp"

namespace urt {

using Mask = Eigen::Array<bool, Eigen::Dynamic, 1>;

inline constexpr double kMaskThreshold = 1e-8;

struct MadelungFields {
  Grid grid;
  Eigen::ArrayXd R;
  Eigen::ArrayXd S;   // unwrapped on valid nodes, raw arg(psi) elsewhere
  Mask valid;         // R > kMaskThreshold * max R
  int components = 0; // connected pieces of the valid region
  std::vector<std::string> warnings;
};

MadelungFields decompose(const SampledField& psi,
                         double threshold = kMaskThreshold);
SampledField reconstruct(const MadelungFields& fields);

struct QuantumPotentialField {
  Eigen::ArrayXd Q;  // zero where masked
  Mask valid;
};

QuantumPotentialField quantum_potential(const MadelungFields& fields);

/// grad S per active axis, zero where masked.
std::vector<Eigen::ArrayXd> velocity_field(const MadelungFields& fields);

struct ResidualOptions {
  // Residuals are taken where R > core_threshold * max R in both slices.
  double core_threshold = 1e-4;
  // -1 flips the sign of Q (negative control).
  double q_sign = 1.0;
};

/// max |(R1^2 - R0^2)/dt + div(j0 + j1)/2|, j = R^2 grad S, over the core.
double continuity_residual(const SampledField& psi0, const SampledField& psi1,
                           double dt, const ResidualOptions& options = {});

/// max |dS/dt + average over both slices of (|grad S|^2/2 + V + Q)|, with
/// dS = arg(psi1 conj(psi0)).
double hj_residual(const SampledField& psi0, const SampledField& psi1,
                   double dt, const Eigen::ArrayXd& potential,
                   const ResidualOptions& options = {});

/// Velocity (and optionally V + Q and its gradient) on one time slice.
struct FlowFrame {
  std::vector<Eigen::ArrayXd> v;
  Mask valid;
  Eigen::ArrayXd total_potential;      // V + Q, empty if not requested
  std::vector<Eigen::ArrayXd> force;   // -grad(V + Q), 4th-order differences
  Mask force_valid;
};

FlowFrame make_frame(const SampledField& psi, const Eigen::ArrayXd& potential,
                     bool with_force);

/// Frames at t0, t0 + dt, ... built from consecutive propagator outputs.
struct FlowSeries {
  Grid grid;
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<FlowFrame> frames;

  double t_end() const { return t0 + dt * (frames.size() - 1); }
};

FlowSeries make_flow(const std::vector<SampledField>& psi_series, double t0,
                     double dt, const Eigen::ArrayXd& potential = {},
                     bool with_force = false);

/// Propagator outputs psi(t0 + k dt), k = 0..n_frames-1.
std::vector<SampledField> evolve_series(const SampledField& psi0,
                                        const Eigen::ArrayXd& potential,
                                        double dt, int n_frames);

struct BohmTrajectory {
  std::vector<double> t;
  std::vector<Eigen::Vector3d> x;
  std::vector<Eigen::Vector3d> v;
  bool truncated = false;  // left the grid or entered the mask
};

/// Linear interpolation (bilinear in 2-D) of the velocity at x; false if any
/// corner node is masked or x lies outside the node range.
bool interpolate_velocity(const Grid& grid, const FlowFrame& frame,
                          const Eigen::Vector3d& x, Eigen::Vector3d& v);

/// Classic RK4 of dx/dt = v(x, t) from frame a (time ta) to frame b (time
/// tb) in `substeps` steps, v linear in time between the frames.
bool rk4_segment(const Grid& grid, const FlowFrame& a, const FlowFrame& b,
                 double ta, double tb, int substeps, Eigen::Vector3d& x);

/// Samples at every frame time.
BohmTrajectory integrate_trajectory(const FlowSeries& flow,
                                    const Eigen::Vector3d& x0,
                                    int substeps = 1);

struct NewtonReport {
  double max_residual = 0.0;
  int used = 0;
  int skipped = 0;
};

/// max over samples of |dv/dt + grad(V + Q)| with centred differences of the
/// trajectory velocity. Needs a flow built with_force.
NewtonReport newton_consistency(const BohmTrajectory& trajectory,
                                const FlowSeries& flow);

/// Inverse-CDF samples of the piecewise-linear density |psi|^2 (1-D).
/// Sample i uses its own generator seeded with (seed, i).
std::vector<double> sample_initial_positions(const SampledField& psi, int n,
                                             std::uint64_t seed);

/// Kolmogorov-Smirnov distance of samples from the piecewise-linear CDF of
/// |psi|^2 (1-D).
double ks_distance(std::vector<double> samples, const SampledField& psi);

struct EquivarianceReport {
  double ks = 0.0;
  int truncated = 0;
  int n = 0;
  std::vector<double> endpoints;
};

/// Integrates n trajectories from |psi_0|^2 samples through the flow and
/// compares endpoints with |psi_T|^2 (last element of the series).
/// More than 20% truncated trajectories is an invalid-ensemble error.
EquivarianceReport equivariance_check(const FlowSeries& flow,
                                      const SampledField& psi_final,
                                      const std::vector<double>& starts,
                                      int substeps = 1, int threads = 1);

/// KS distance of the ensemble against |psi_k|^2 at every `every`-th frame
/// (and the last), as (t, KS) pairs. Truncated trajectories are dropped.
std::vector<std::pair<double, double>> ks_history(
    const FlowSeries& flow, const std::vector<SampledField>& psi_series,
    const std::vector<double>& starts, int every, int substeps = 1,
    int threads = 1);

/// Streams a two-dimensional ensemble through a running simulation and
/// records where trajectories cross the plane x = observe_x.
class CrossingEnsemble {
 public:
  CrossingEnsemble(const SampledField& psi0, int n, std::uint64_t seed,
                   double observe_x, int frame_stride = 4, int substeps = 2);

  /// Feed every propagator step; frames are built every frame_stride steps.
  void observe(int step, double t, const SampledField& psi);

  /// Crossing y per trajectory, NaN if it never crossed.
  const std::vector<double>& crossings() const { return crossings_; }
  int lost() const { return lost_; }
  int size() const { return static_cast<int>(positions_.size()); }
  const std::vector<Eigen::Vector3d>& starts() const { return starts_; }

  /// Histogram of crossing y values on bins of `bin_width` centred on the
  /// grid's y range, normalised to unit area.
  Profile histogram(double bin_width) const;

 private:
  Grid grid_;
  double observe_x_;
  int stride_;
  int substeps_;
  std::vector<Eigen::Vector3d> starts_;
  std::vector<Eigen::Vector3d> positions_;
  std::vector<char> active_;
  std::vector<double> crossings_;
  int lost_ = 0;
  FlowFrame previous_;
  double t_previous_ = 0.0;
  bool have_previous_ = false;
};

}  // namespace urt
