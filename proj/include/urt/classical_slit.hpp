#pragma once

// Quasi-static 2-D electrostatics of a point charge (a line charge in the
// cross-section) moving past a grounded, infinitely thin conducting screen on
// the line x = 0. The induced line-charge density is re-solved at every force
// evaluation and the charge feels only the induced field.
//
// Units are Gaussian with the 2-D kernel G(r, r') = -2 ln|r - r'|. The
// density is piecewise constant on cosine-graded panels and the boundary
// condition (total potential 0 on the conductor) is imposed in the Galerkin
// sense: the panel average of the total potential vanishes on every panel.
// This makes the matrix symmetric and the force exactly -grad of the energy
// q phi_ind / 2, which is what makes the energy check meaningful.

#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>

namespace urt {

struct Segment {
  double y0 = 0.0;
  double y1 = 0.0;
};

struct ScreenGeometry2D {
  std::vector<Segment> segments;  // sorted, disjoint (touching ends allowed)
  double outer_extent = 20.0;
};

/// Screen from -outer to +outer with slits of `width` centred at
/// +-separation/2. A closed shutter fills the lower (or upper) slit.
enum class Shutter { none, lower, upper };
ScreenGeometry2D two_slit_geometry(double outer_extent, double separation,
                                   double width, Shutter shutter);

/// Panel geometry, Gauss points and the factorised Galerkin matrix.
struct Panels {
  Eigen::VectorXd a, b, mid, len;
  std::vector<int> segment;      // owning segment per panel
  Eigen::MatrixXd gauss_y;       // panels x 8 Gauss abscissae
  Eigen::MatrixXd gauss_w;       // panels x 8 weights
  Eigen::MatrixXd matrix;        // A_ij = int_i int_j G
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  ScreenGeometry2D geometry;
};

struct PanelSet {
  std::shared_ptr<const Panels> panels;
  Eigen::VectorXd density;  // line-charge density per panel

  Eigen::Index size() const { return density.size(); }
};

struct ChargeState {
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
  Eigen::Vector2d velocity = Eigen::Vector2d::Zero();
  double q = 1.0;
  double m = 1.0;
  double t = 0.0;
};

/// Panel edges mid - half cos(pi k / n), k = 0..n, per segment.
PanelSet build_panels(const ScreenGeometry2D& geometry, int n_per_segment);

/// Distance from a point to the nearest conductor segment.
double conductor_distance(const ScreenGeometry2D& geometry,
                          const Eigen::Vector2d& point);

/// Length of the panel closest to the point.
double nearest_panel_length(const PanelSet& panels,
                            const Eigen::Vector2d& point);

/// Throws proximity if the charge is within one panel length of the screen.
PanelSet solve_induced_density(const PanelSet& panels,
                               const ChargeState& charge);

/// Integral of G over panel j seen from the point, for every panel.
Eigen::VectorXd panel_potentials(const Panels& panels,
                                 const Eigen::Vector2d& point);

double induced_potential_at(const PanelSet& panels,
                            const Eigen::Vector2d& point);

/// E = -grad phi_ind. Throws singular on a panel.
Eigen::Vector2d induced_field_at(const PanelSet& panels,
                                 const Eigen::Vector2d& point);

double total_induced_charge(const PanelSet& panels);

/// Induced plus bare potential of the charge at (0, y) on the conductor.
double boundary_potential(const PanelSet& panels, const ChargeState& charge,
                          double y);

/// max_i |(A lambda)_i - b_i| / max_i |b_i|: how well the Galerkin equations
/// hold after the solve.
double galerkin_residual(const PanelSet& panels, const ChargeState& charge);

/// 0.5 m |v|^2 + 0.5 q phi_ind(r).
double energy(const PanelSet& solved, const ChargeState& charge);

struct StepControl {
  double dt = 0.02;
  // Substeps dt / 2^k are taken until dt / 2^k <= near_fraction * d / |v|
  // with d the distance to the screen.
  double near_fraction = 0.004;
};

struct TrajectoryResult {
  std::vector<ChargeState> states;  // one per base step
  std::vector<double> energy;
  bool collided = false;
  double energy_drift = 0.0;  // max |E - E0| / max(|E0|, max kinetic)
};

/// Stops after n_steps base steps, on collision, or when `stop` returns true.
TrajectoryResult advance_trajectory(
    const PanelSet& panels, const ChargeState& initial,
    const StepControl& control, int n_steps,
    const std::function<bool(const ChargeState&)>& stop = {});

struct ExitResult {
  double angle = 0.0;  // atan2(vy, vx) when x reaches exit_x
  bool transmitted = false;
  TrajectoryResult trajectory;
};

ExitResult deflection_run(const ScreenGeometry2D& geometry, int n_panels,
                          const ChargeState& initial,
                          const StepControl& control, double exit_x,
                          double max_time);

struct DeflectionConfig {
  double outer_extent = 20.0;
  double separation = 4.0;
  double slit_width = 1.0;
  ChargeState initial{{-20.0, 2.0}, {2.0, 0.0}, 1.0, 1.0, 0.0};
  double exit_x = 20.0;
  double max_time = 60.0;
  int panels = 128;
  StepControl step;
};

/// Open run and run with the other slit's shutter closed. The closed slit is
/// the one on the opposite side of y = 0 from the charge.
struct DeflectionResult {
  ExitResult open;
  ExitResult closed;
  double delta = 0.0;  // open.angle - closed.angle
};

DeflectionResult deflection_experiment(const DeflectionConfig& config);

/// l = 2 pi / p: displacement at which p l equals one quantum h.
double quantization_length(double momentum);

}  // namespace urt
