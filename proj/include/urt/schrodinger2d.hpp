#pragma once

// Split-step Fourier propagation of i dpsi/dt = (-Laplacian/2 + V) psi and the
// two-slit diffraction experiment built on it.

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "urt/grid.hpp"

namespace urt {

/// Screen of thickness `thickness` centred on x = screen_x, with slits of
/// width `slit_width` centred at `slit_centers` along y. A closed slit is
/// filled with barrier.
struct SlitScreen {
  double screen_x = 0.0;
  std::vector<double> slit_centers{-2.0, 2.0};
  double slit_width = 1.0;
  std::vector<bool> open_flags{true, true};
  double thickness = 0.5;
  double barrier = 200.0;
  bool present = true;
};

/// Barrier value on screen material, 0 elsewhere.
Eigen::ArrayXd screen_potential(const SlitScreen& screen, const Grid& grid);

/// Normalised exp(-|r - c|^2 / (4 w^2)) exp(i v.r) on a 2-D grid, so that
/// the position standard deviation per axis is w. Throws configuration if the
/// amplitude exceeds 1e-12 of its peak on the boundary or on the screen.
SampledField initial_packet_2d(const Grid& grid, const Eigen::Vector2d& center,
                               const Eigen::Vector2d& velocity, double width,
                               const SlitScreen* screen = nullptr);

/// Strang splitting exp(-iV dt/2) exp(-iT dt) exp(-iV dt/2), followed by an
/// optional absorbing mask. The mask is a per-step power of a cos^2 ramp of
/// `absorber_width` on every face, so it depends only weakly on dt.
class SplitStepPropagator {
 public:
  SplitStepPropagator(const Grid& grid, const Eigen::ArrayXd& potential,
                      double dt, double absorber_width = 0.0,
                      double absorber_rate = 20.0);

  void step(SampledField& psi) const;
  void evolve(SampledField& psi, int n_steps) const;

  double dt() const { return dt_; }
  const Grid& grid() const { return grid_; }

 private:
  Grid grid_;
  double dt_;
  Eigen::ArrayXcd half_potential_;
  Eigen::ArrayXcd kinetic_;  // includes the 1/n of the inverse FFT
  Eigen::ArrayXd mask_;
  bool absorbing_ = false;
};

SampledField split_step_evolve(const SampledField& psi,
                               const Eigen::ArrayXd& potential, double dt,
                               int n_steps, double absorber_width = 0.0);

/// Closed-form free evolution of the packet from initial_packet_2d.
std::complex<double> free_gaussian_2d(const Eigen::Vector2d& center,
                                      const Eigen::Vector2d& velocity,
                                      double width, const Eigen::Vector2d& r,
                                      double t);

struct Profile {
  Eigen::ArrayXd y;
  Eigen::ArrayXd intensity;
  std::vector<std::string> warnings;
};

/// |psi|^2 along the column x = observe_x, linearly interpolated between the
/// two neighbouring grid columns.
Profile detect_pattern(const SampledField& psi, double observe_x);

/// Time-integrated detect_pattern.
class PatternDetector {
 public:
  PatternDetector(const Grid& grid, double observe_x);
  void accumulate(const SampledField& psi, double dt);
  Profile profile() const;

 private:
  Grid grid_;
  double observe_x_;
  int column_ = 0;
  double frac_ = 0.0;
  Eigen::ArrayXd sum_;
  double reference_ = 0.0;  // accumulated peak density anywhere
};

/// Local maxima of the profile at least 5% of the peak high and with at least
/// 5% prominence, refined by a parabola through three samples.
std::vector<double> fringe_maxima(const Profile& profile);

/// Mean spacing of the three central maxima: the global maximum and its
/// nearest detected neighbour on each side.
double fringe_spacing(const Profile& profile);

/// Length of the longest run of consecutive maxima whose gaps are all within
/// `tolerance` (relative) of `spacing`, counted in maxima.
int periodic_maxima_count(const std::vector<double>& maxima, double spacing,
                          double tolerance = 0.25);

struct TwoSlitConfig {
  int nx = 1024;
  int ny = 512;
  double x_extent = 92.16;
  double y_extent = 76.8;
  SlitScreen screen;
  Eigen::Vector2d packet_center{-22.0, 0.0};
  Eigen::Vector2d velocity{10.0, 0.0};
  double packet_width = 2.0;
  double observe_x = 40.0;
  double dt = 2.5e-3;
  double total_time = 9.0;
  double absorber_width = 5.0;
};

/// Called after every step with the step count, time and wavefunction.
using StepObserver =
    std::function<void(int step, double t, const SampledField& psi)>;

struct TwoSlitResult {
  Profile profile;
  double final_norm = 0.0;
  int steps = 0;
};

Grid two_slit_grid(const TwoSlitConfig& config);

TwoSlitResult run_two_slit(const TwoSlitConfig& config,
                           const StepObserver& observer = {});

/// (2 pi / v) D / d for slit separation d and propagation distance D.
double fraunhofer_spacing(double speed, double distance, double separation);

}  // namespace urt
