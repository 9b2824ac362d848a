#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "frontlab/front_solver.hpp"

namespace frontlab {

/// Smooth test function with the derivatives the weak form needs. Must vanish
/// at the final time and on the walls of the spatial box.
struct TestFunction {
  std::function<double(double, double)> phi;
  std::function<double(double, double)> phi_t;
  std::function<double(double, double)> phi_xx;
};

/// kappa(w) = w for w > 0 and w - d/mu for w <= 0; the offset accounts for the
/// front-motion bookkeeping on the vanished region.
inline double kappa_offset(double w, double d_over_mu) {
  return w > 0.0 ? w : w - d_over_mu;
}

/// Weak-form residual of a trajectory with full snapshots over the box
/// [x_lo, x_hi] x [0, T]:
///   | int int [d u~ phi_xx + kappa(u~) phi_t] + int kappa(u~0) phi(0,.)
///     + int int f(t,x,u~) phi |
/// with u~ the zero-extension of the solution outside [g(t), h(t)].
/// Trapezoid quadrature on the snapshot times and a uniform x lattice.
inline double weak_residual(const Trajectory& traj, const ProblemSpec& spec,
                            const TestFunction& tf, double x_lo, double x_hi,
                            int nx = 512) {
  if (traj.snapshots.size() < 3)
    throw std::invalid_argument("weak_residual: trajectory lacks full snapshots");
  if (traj.snapshots.front().t != 0.0)
    throw std::invalid_argument("weak_residual: snapshots must start at t = 0");
  for (const FrontState& s : traj.snapshots)
    if (s.g < x_lo || s.h > x_hi)
      throw std::invalid_argument("weak_residual: box does not contain the support");

  const double T = traj.snapshots.back().t;
  const double d_over_mu = spec.d / spec.mu;
  const double dx = (x_hi - x_lo) / nx;

  // contract: phi vanishes at t = T and on the box walls
  double scale = 0.0;
  for (int i = 0; i <= nx; ++i)
    scale = std::max(scale, std::fabs(tf.phi(0.5 * T, x_lo + i * dx)));
  const double wall_tol = 1e-12 * std::max(scale, 1.0);
  for (int i = 0; i <= nx; ++i)
    if (std::fabs(tf.phi(T, x_lo + i * dx)) > wall_tol)
      throw std::invalid_argument("weak_residual: test function must vanish at t = T");
  for (const FrontState& s : traj.snapshots)
    if (std::fabs(tf.phi(s.t, x_lo)) > wall_tol || std::fabs(tf.phi(s.t, x_hi)) > wall_tol)
      throw std::invalid_argument("weak_residual: test function must vanish on the box walls");

  auto space_integral = [&](const FrontState& s) {
    double acc = 0.0;
    for (int i = 0; i <= nx; ++i) {
      const double x = x_lo + i * dx;
      const double u = s.sample(x);
      const double val = spec.d * u * tf.phi_xx(s.t, x) +
                         kappa_offset(u, d_over_mu) * tf.phi_t(s.t, x) +
                         eval_f(spec.model, s.t, x, u) * tf.phi(s.t, x);
      acc += (i == 0 || i == nx) ? 0.5 * val : val;
    }
    return acc * dx;
  };

  double time_acc = 0.0;
  double prev_val = space_integral(traj.snapshots[0]);
  for (std::size_t k = 1; k < traj.snapshots.size(); ++k) {
    const double cur_val = space_integral(traj.snapshots[k]);
    time_acc += 0.5 * (prev_val + cur_val) *
                (traj.snapshots[k].t - traj.snapshots[k - 1].t);
    prev_val = cur_val;
  }

  double initial_term = 0.0;
  const FrontState& s0 = traj.snapshots.front();
  for (int i = 0; i <= nx; ++i) {
    const double x = x_lo + i * dx;
    const double val = kappa_offset(s0.sample(x), d_over_mu) * tf.phi(0.0, x);
    initial_term += (i == 0 || i == nx) ? 0.5 * val : val;
  }
  initial_term *= dx;

  return std::fabs(time_acc + initial_term);
}

}  // namespace frontlab
