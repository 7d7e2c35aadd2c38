#pragma once

// The nonsingular free wave packet
//
//   psi(r, t) = j0(s |r - v t|) exp(i (v.r - omega t)),  omega = (|v|^2 + s^2)/2,
//
// with hbar = m = 1. It solves the free Schrodinger equation exactly, and the
// maximum of |psi|^2 sits at r = v t for all t. The packet is not square
// integrable in three dimensions, so no moment report is defined for it.

#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "urt/grid.hpp"

namespace urt {

struct PacketParams {
  double s = 1.0;
  Eigen::Vector3d v = Eigen::Vector3d::Zero();
  double omega = 0.5;
};

PacketParams make_packet(double s, const Eigen::Vector3d& v);

/// sin(x)/x, with its Taylor series near zero.
double spherical_j0(double x);

std::complex<double> evaluate_packet(const PacketParams& p,
                                     const Eigen::Vector3d& r, double t);

SampledField sample_packet(const PacketParams& p, const Grid& grid, double t);

/// Cubic grid with spacing min(pi/s, 2 pi/|v|) / 8, centred at the origin.
Grid packet_grid(const PacketParams& p, int points_per_axis = 64);

/// max over interior nodes of |(i d/dt + Laplacian/2) psi| / max|psi|.
///
/// d/dt is a centred difference with step dt. The Laplacian is spectral and
/// is applied to w * psi, where w is a smooth separable window equal to 1 on
/// the interior box and decaying to 0 before the boundary; this removes the
/// periodic wrap of the non-decaying packet. "Interior" is the box w == 1,
/// |x - c| <= 0.16 * extent/2 per axis.
double schrodinger_residual(const PacketParams& p, const Grid& grid, double t,
                            double dt);

/// Maximum of |field|^2, refined per axis by a parabola through the three
/// nodes around the maximum node.
Eigen::Vector3d peak_position(const SampledField& field);

/// Peak positions at each time, sampled on a 64^3 grid spanning the path
/// plus one j0 main-lobe diameter.
std::vector<std::pair<double, Eigen::Vector3d>> peak_trajectory(
    const PacketParams& p, const std::vector<double>& times);

/// Least-squares slope of position against time, per component.
Eigen::Vector3d fitted_velocity(
    const std::vector<std::pair<double, Eigen::Vector3d>>& trajectory);

}  // namespace urt
