#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "frontlab/weak_form.hpp"

using namespace frontlab;

namespace {

// bump supported on (-2, 2), C^2, vanishing with two derivatives at the edges
double bump(double x) {
  const double s = 1.0 - (x / 2.0) * (x / 2.0);
  return s > 0.0 ? s * s * s : 0.0;
}
TestFunction linear_in_time_bump(double T) {
  TestFunction tf;
  tf.phi = [T](double t, double x) { return (T - t) * bump(x); };
  tf.phi_t = [](double, double x) { return -bump(x); };
  tf.phi_xx = [T](double t, double x) {
    const double q = x / 2.0;
    const double s = 1.0 - q * q;
    if (s <= 0.0) return 0.0;
    const double d2 = (-6.0 * s * s + 24.0 * q * q * s) * 0.25;
    return (T - t) * d2;
  };
  return tf;
}

Trajectory zero_trajectory(double T, int frames, int n, double g, double h) {
  Trajectory traj;
  for (int k = 0; k <= frames; ++k) {
    FrontState s;
    s.t = T * k / frames;
    s.g = g;
    s.h = h;
    s.w.assign(n + 1, 0.0);
    traj.snapshots.push_back(s);
    traj.rows.push_back({s.t, g, h, 0.0, 0.0, 0.0});
  }
  return traj;
}

}  // namespace

TEST_CASE("zero solution with zero reaction telescopes to zero residual") {
  ProblemSpec spec;
  spec.model = MediumModel::homogeneous(0.0, 0.0);
  spec.d = 1.0;
  spec.mu = 1.0;
  const double T = 1.0;
  Trajectory traj = zero_trajectory(T, 20, 64, -1.0, 1.0);
  const double res = weak_residual(traj, spec, linear_in_time_bump(T), -2.0, 2.0, 256);
  CHECK(res < 1e-13);
}

TEST_CASE("zero test function gives zero residual") {
  ProblemSpec spec;
  spec.model = MediumModel::homogeneous(1.0, 1.0);
  const double T = 1.0;
  Trajectory traj = zero_trajectory(T, 10, 64, -1.0, 1.0);
  TestFunction tf;
  tf.phi = [](double, double) { return 0.0; };
  tf.phi_t = [](double, double) { return 0.0; };
  tf.phi_xx = [](double, double) { return 0.0; };
  CHECK(weak_residual(traj, spec, tf, -2.0, 2.0, 128) == 0.0);
}

TEST_CASE("test functions that violate the vanishing contract are rejected") {
  ProblemSpec spec;
  spec.model = MediumModel::homogeneous(1.0, 1.0);
  const double T = 1.0;
  Trajectory traj = zero_trajectory(T, 10, 64, -1.0, 1.0);

  TestFunction bad;  // constant in time: nonzero at t = T
  bad.phi = [](double, double x) { return bump(x); };
  bad.phi_t = [](double, double) { return 0.0; };
  bad.phi_xx = [](double, double x) {
    const double q = x / 2.0;
    const double s = 1.0 - q * q;
    return s > 0.0 ? (-6.0 * s * s + 24.0 * q * q * s) * 0.25 : 0.0;
  };
  CHECK_THROWS_AS(weak_residual(traj, spec, bad, -2.0, 2.0, 128),
                  std::invalid_argument);

  TestFunction off_wall = linear_in_time_bump(T);  // box wall inside the bump
  CHECK_THROWS_AS(weak_residual(traj, spec, off_wall, -1.5, 1.5, 128),
                  std::invalid_argument);
}

TEST_CASE("baseline logistic run has a small residual") {
  ProblemSpec spec;
  spec.model = MediumModel::homogeneous(1.0, 1.0);
  spec.init = cosine_bump_data(-1.0, 1.0, 1.0);
  spec.numerics.N = 128;
  spec.numerics.dt = 1e-3;
  const double T = 1.0;
  Trajectory traj = solve(spec, T, uniform_times(T, 200), true);
  const double res = weak_residual(traj, spec, linear_in_time_bump(T), -2.0, 2.0, 256);
  CHECK(res < 5e-2);
}
