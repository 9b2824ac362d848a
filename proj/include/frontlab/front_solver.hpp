#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <vector>

#include "frontlab/errors.hpp"
#include "frontlab/initial_data.hpp"
#include "frontlab/medium.hpp"
#include "frontlab/tridiag.hpp"

namespace frontlab {

enum class DomainMode {
  two_front,
  half_line_left_front,
  half_line_right_front,
  periodic_cell,
};

enum class FarBoundary { neumann_zero, clamp_to_steady };

struct Numerics {
  int N = 256;       // reference-grid intervals; N+1 nodes
  double dt = 1e-3;  // nominal time step
  double left_truncation = -40.0;  // far-wall position in half-line modes
  FarBoundary bc_far = FarBoundary::neumann_zero;
  std::function<double(double)> far_clamp;  // t -> wall value for clamp_to_steady
};

struct ProblemSpec {
  MediumModel model;
  double d = 1.0;   // diffusivity
  double mu = 1.0;  // Stefan expansion coefficient
  DomainMode mode = DomainMode::two_front;
  InitialData init;
  Numerics numerics;
};

/// Solution in the front-fixed frame: the moving interval [g, h] is mapped to
/// the reference interval [-1, 1] by x = g + (xi + 1) (h - g) / 2, and w holds
/// the density at the nodes xi_j = -1 + 2 j / N.
struct FrontState {
  double t = 0.0;
  double g = -1.0;
  double h = 1.0;
  std::vector<double> w;

  int intervals() const { return static_cast<int>(w.size()) - 1; }
  double xi(int j) const { return -1.0 + 2.0 * j / intervals(); }
  double x_of(int j) const { return g + (xi(j) + 1.0) * (h - g) / 2.0; }

  double umax() const {
    double m = 0.0;
    for (double v : w) m = std::max(m, v);
    return m;
  }

  /// Trapezoid-rule mass over [g, h].
  double mass() const {
    const int n = intervals();
    double s = 0.5 * (w.front() + w.back());
    for (int j = 1; j < n; ++j) s += w[j];
    return s * (2.0 / n) * (h - g) / 2.0;
  }

  /// Linear interpolation in physical coordinates; zero outside [g, h].
  double sample(double x) const {
    if (x <= g || x >= h) return (x == g) ? w.front() : (x == h) ? w.back() : 0.0;
    const int n = intervals();
    const double xi_val = (2.0 * (x - g) / (h - g)) - 1.0;
    double jr = (xi_val + 1.0) * n / 2.0;
    int j = std::min(static_cast<int>(jr), n - 1);
    const double s = jr - j;
    return (1.0 - s) * w[j] + s * w[j + 1];
  }
};

enum class Side { left, right };

/// One-sided three-point gradient of u at the front, second order in the grid
/// spacing and exact for quadratics.
inline double boundary_gradient(const FrontState& state, Side side) {
  const int n = state.intervals();
  if (n < 3) throw std::invalid_argument("boundary_gradient: N >= 3 required");
  const double dxi = 2.0 / n;
  const double scale = 2.0 / (state.h - state.g);
  if (side == Side::right) {
    return (3.0 * state.w[n] - 4.0 * state.w[n - 1] + state.w[n - 2]) /
           (2.0 * dxi) * scale;
  }
  return (-3.0 * state.w[0] + 4.0 * state.w[1] - state.w[2]) / (2.0 * dxi) * scale;
}

/// M(t) = integral of u over [g, h] plus (d/mu) (h - g). Along exact solutions
/// dM/dt equals the integral of f, so M is conserved when f vanishes.
inline double stefan_functional(const FrontState& state, const ProblemSpec& spec) {
  if (spec.mode != DomainMode::two_front)
    throw std::invalid_argument("stefan_functional: two-front mode only");
  return state.mass() + (spec.d / spec.mu) * (state.h - state.g);
}

struct StepStats {
  int clipped = 0;  // nodes clipped below the roundoff floor
};

namespace detail {

struct FrontSpeeds {
  double sg = 0.0;
  double sh = 0.0;
};

inline FrontSpeeds front_speeds(const FrontState& s, const ProblemSpec& spec) {
  FrontSpeeds v;
  const bool left_moves = spec.mode == DomainMode::two_front ||
                          spec.mode == DomainMode::half_line_left_front;
  const bool right_moves = spec.mode == DomainMode::two_front ||
                           spec.mode == DomainMode::half_line_right_front;
  if (left_moves) v.sg = -spec.mu * boundary_gradient(s, Side::left);
  if (right_moves) v.sh = -spec.mu * boundary_gradient(s, Side::right);
  return v;
}

/// Explicit stage terms V w_xi + f at every node, for the frame geometry
/// (g, h) moving with speeds (sg, sh).
inline void stage_rhs(const ProblemSpec& spec, double t,
                      const std::vector<double>& w, double g, double h,
                      double sg, double sh, std::vector<double>& r) {
  const int n = static_cast<int>(w.size()) - 1;
  const double len = h - g;
  const double dxi = 2.0 / n;
  r.assign(w.size(), 0.0);
  for (int j = 1; j < n; ++j) {
    const double xi = -1.0 + 2.0 * static_cast<double>(j) / n;
    const double vel = (sg + (xi + 1.0) * (sh - sg) / 2.0) * 2.0 / len;
    const double wxi = (w[j + 1] - w[j - 1]) / (2.0 * dxi);
    const double x = g + (xi + 1.0) * len / 2.0;
    r[j] = vel * wxi + eval_f(spec.model, t, x, std::max(w[j], 0.0));
  }
  // wall nodes: advection vanishes (pinned or symmetric); reaction applies to
  // the Neumann wall row, which is a genuine unknown
  r[0] = eval_f(spec.model, t, g, std::max(w[0], 0.0));
  r[n] = eval_f(spec.model, t, h, std::max(w[n], 0.0));
}

/// Crank-Nicolson diffusion advance from (w, g_old, h_old) to geometry
/// (g_new, h_new) with explicit contribution `expl` (already multiplied by
/// dt). Boundary rows follow the domain mode; `t_new` is needed for the
/// clamped far wall.
inline std::vector<double> cn_advance(const ProblemSpec& spec, double t_new,
                                      const std::vector<double>& w,
                                      double g_old, double h_old, double g_new,
                                      double h_new, double dt,
                                      const std::vector<double>& expl) {
  const int n = static_cast<int>(w.size()) - 1;
  const double dxi = 2.0 / n;
  const double a_old = 0.5 * dt * (4.0 * spec.d / ((h_old - g_old) * (h_old - g_old))) / (dxi * dxi);
  const double a_new = 0.5 * dt * (4.0 * spec.d / ((h_new - g_new) * (h_new - g_new))) / (dxi * dxi);

  if (spec.mode == DomainMode::periodic_cell) {
    // n distinct unknowns with periodic wrap; node n mirrors node 0
    std::vector<double> lower(n, -a_new), diag(n, 1.0 + 2.0 * a_new),
        upper(n, -a_new), rhs(n);
    auto at = [&](int j) { return w[(j % n + n) % n]; };
    for (int j = 0; j < n; ++j)
      rhs[j] = at(j) + a_old * (at(j + 1) - 2.0 * at(j) + at(j - 1)) + expl[j];
    solve_cyclic_tridiag(lower, diag, upper, -a_new, -a_new, rhs);
    rhs.push_back(rhs[0]);
    return rhs;
  }

  std::vector<double> lower(n + 1, 0.0), diag(n + 1, 1.0), upper(n + 1, 0.0),
      rhs(n + 1, 0.0), scratch(n + 1);
  for (int j = 1; j < n; ++j) {
    lower[j] = -a_new;
    diag[j] = 1.0 + 2.0 * a_new;
    upper[j] = -a_new;
    rhs[j] = w[j] + a_old * (w[j + 1] - 2.0 * w[j] + w[j - 1]) + expl[j];
  }

  auto pin = [&](int j, double value) {
    lower[j] = upper[j] = 0.0;
    diag[j] = 1.0;
    rhs[j] = value;
  };
  auto neumann_wall = [&](int j, int inner) {
    // symmetric ghost: w_{ghost} = w_{inner}
    diag[j] = 1.0 + 2.0 * a_new;
    (j == 0 ? upper[j] : lower[j]) = -2.0 * a_new;
    rhs[j] = w[j] + a_old * (2.0 * w[inner] - 2.0 * w[j]) + expl[j];
  };

  switch (spec.mode) {
    case DomainMode::two_front:
      pin(0, 0.0);
      pin(n, 0.0);
      break;
    case DomainMode::half_line_right_front:
      pin(n, 0.0);
      if (spec.numerics.bc_far == FarBoundary::neumann_zero)
        neumann_wall(0, 1);
      else
        pin(0, spec.numerics.far_clamp ? spec.numerics.far_clamp(t_new) : 0.0);
      break;
    case DomainMode::half_line_left_front:
      pin(0, 0.0);
      if (spec.numerics.bc_far == FarBoundary::neumann_zero)
        neumann_wall(n, n - 1);
      else
        pin(n, spec.numerics.far_clamp ? spec.numerics.far_clamp(t_new) : 0.0);
      break;
    case DomainMode::periodic_cell:
      break;  // handled above
  }

  solve_tridiag(lower, diag, upper, rhs, scratch);
  return rhs;
}

}  // namespace detail

/// Advances the state by spec.numerics.dt (or the given dt override): Heun
/// predictor-corrector on the fronts, Crank-Nicolson diffusion with explicit
/// advection and reaction on the field.
inline FrontState step(const FrontState& state, const ProblemSpec& spec,
                       StepStats* stats = nullptr,
                       std::optional<double> dt_override = std::nullopt) {
  const double dt = dt_override.value_or(spec.numerics.dt);
  const int n = state.intervals();
  const double len = state.h - state.g;

  const auto s1 = detail::front_speeds(state, spec);
  const double vmax1 = std::max(std::fabs(s1.sg), std::fabs(s1.sh));
  if (dt * vmax1 >= len / 4.0)
    throw SolverError("step: front motion per step exceeds a quarter of the domain");

  // predictor
  const double g_p = state.g + dt * s1.sg;
  const double h_p = state.h + dt * s1.sh;
  std::vector<double> r1, r2, expl(state.w.size());
  detail::stage_rhs(spec, state.t, state.w, state.g, state.h, s1.sg, s1.sh, r1);
  for (std::size_t j = 0; j < expl.size(); ++j) expl[j] = dt * r1[j];
  std::vector<double> w_p = detail::cn_advance(spec, state.t + dt, state.w,
                                               state.g, state.h, g_p, h_p, dt, expl);
  for (double& v : w_p) v = std::max(v, 0.0);

  // corrector
  FrontState pred{state.t + dt, g_p, h_p, std::move(w_p)};
  const auto s2 = detail::front_speeds(pred, spec);
  const double sg = 0.5 * (s1.sg + s2.sg);
  const double sh = 0.5 * (s1.sh + s2.sh);
  const double g_new = state.g + dt * sg;
  const double h_new = state.h + dt * sh;

  detail::stage_rhs(spec, pred.t, pred.w, g_p, h_p, s2.sg, s2.sh, r2);
  for (std::size_t j = 0; j < expl.size(); ++j) expl[j] = 0.5 * dt * (r1[j] + r2[j]);
  std::vector<double> w_new = detail::cn_advance(spec, state.t + dt, state.w,
                                                 state.g, state.h, g_new, h_new,
                                                 dt, expl);

  int clipped = 0;
  for (double& v : w_new) {
    if (v < 0.0) {
      if (v < -1e-13) ++clipped;
      v = 0.0;
    }
    if (!std::isfinite(v)) throw BlowUpError("step: non-finite field value");
  }
  if (stats) stats->clipped += clipped;

  if (spec.mode == DomainMode::two_front &&
      h_new - g_new < 4.0 * (spec.init.h0 - spec.init.g0) / n)
    throw DegenerateDomainError("step: fronts collided (domain under 4 cells)");

  return FrontState{state.t + dt, g_new, h_new, std::move(w_new)};
}

struct TrajectoryRow {
  double t, g, h, umax, mass, stefan_functional;
};

struct Trajectory {
  std::vector<TrajectoryRow> rows;
  std::vector<FrontState> snapshots;  // populated when requested
  double H_emp_right = 0.0;  // sup of (h(t)-h0)/sqrt(t) over outputs t <= min(1,T)
  double H_emp_left = 0.0;   // symmetric statistic for g
  long clip_events = 0;
  bool truncation_warning = false;  // far-boundary contamination in half-line modes
};

namespace detail {

inline FrontState discretize(const ProblemSpec& spec) {
  const int n = spec.numerics.N;
  if (n < 16) throw std::invalid_argument("numerics.N >= 16 required");
  if (spec.numerics.dt <= 0.0) throw std::invalid_argument("numerics.dt > 0 required");
  if (spec.d <= 0.0 || spec.mu <= 0.0)
    throw std::invalid_argument("d and mu must be positive");
  if (!(spec.init.g0 < spec.init.h0))
    throw std::invalid_argument("init: g0 < h0 required");
  if (!spec.init.u0) throw std::invalid_argument("init: u0 sampler missing");

  FrontState s;
  s.t = 0.0;
  switch (spec.mode) {
    case DomainMode::two_front:
      s.g = spec.init.g0;
      s.h = spec.init.h0;
      break;
    case DomainMode::half_line_right_front:
      s.g = spec.numerics.left_truncation;
      s.h = spec.init.h0;
      if (!(s.g < s.h)) throw std::invalid_argument("far wall must lie left of h0");
      break;
    case DomainMode::half_line_left_front:
      s.g = spec.init.g0;
      s.h = spec.numerics.left_truncation;  // far wall position (right side here)
      if (!(s.g < s.h)) throw std::invalid_argument("far wall must lie right of g0");
      break;
    case DomainMode::periodic_cell:
      s.g = 0.0;
      s.h = spec.model.L;
      break;
  }
  s.w.resize(n + 1);
  for (int j = 0; j <= n; ++j) s.w[j] = std::max(spec.init.u0(s.x_of(j)), 0.0);

  if (spec.mode == DomainMode::two_front) {
    const double scale = std::max(s.umax(), 1.0);
    if (std::fabs(s.w[0]) > 1e-12 * scale || std::fabs(s.w[n]) > 1e-12 * scale)
      throw std::invalid_argument("init: u0 must vanish at the fronts");
    s.w[0] = s.w[n] = 0.0;
    for (int j = 1; j < n; ++j)
      if (!(s.w[j] > 0.0))
        throw std::invalid_argument("init: u0 must be positive strictly inside (g0,h0)");
  } else if (spec.mode == DomainMode::half_line_right_front) {
    s.w[n] = 0.0;
  } else if (spec.mode == DomainMode::half_line_left_front) {
    s.w[0] = 0.0;
  }
  return s;
}

inline std::vector<double> clean_output_times(std::vector<double> times, double T) {
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  for (double t : times)
    if (t < 0.0 || t > T * (1.0 + 1e-12))
      throw std::invalid_argument("output times must lie in [0, T]");
  if (times.empty() || times.back() < T) times.push_back(T);
  return times;
}

}  // namespace detail

inline std::vector<double> uniform_times(double T, int count) {
  std::vector<double> out;
  out.reserve(count + 1);
  for (int i = 0; i <= count; ++i) out.push_back(T * i / count);
  return out;
}

/// Marches the free boundary problem to time T, sampling the trajectory at the
/// given output times. For merely continuous initial data the first ten steps
/// use dt/100, relaxing geometrically back to dt, so the sqrt(t) front motion
/// of the startup layer is resolved. When `stop_when` returns true for an
/// emitted row the march ends there and the trajectory is truncated.
inline Trajectory solve(const ProblemSpec& spec, double T,
                        std::vector<double> output_times,
                        bool record_snapshots = false,
                        const std::function<bool(const TrajectoryRow&)>& stop_when = {}) {
  if (!(T > 0.0)) throw std::invalid_argument("solve: T > 0 required");
  FrontState state = detail::discretize(spec);
  const auto times = detail::clean_output_times(std::move(output_times), T);

  // half-line margin precondition: the far wall must sit one margin below the
  // support of u0 unless the support reaches the wall (unbounded-support data)
  double far_baseline[3] = {0, 0, 0};
  const bool halfline = spec.mode == DomainMode::half_line_right_front ||
                        spec.mode == DomainMode::half_line_left_front;
  if (halfline) {
    const int n = state.intervals();
    const bool right_front = spec.mode == DomainMode::half_line_right_front;
    int edge = -1;
    for (int j = 0; j <= n; ++j) {
      const int idx = right_front ? j : n - j;
      if (state.w[idx] > 0.0) {
        edge = idx;
        break;
      }
    }
    if (edge >= 0) {
      const double support_edge = state.x_of(edge);
      const double wall = right_front ? state.g : state.h;
      const double margin = 4.0 * std::sqrt(spec.d * T) + spec.model.L;
      const bool support_touches_wall = (edge == (right_front ? 0 : n));
      if (!support_touches_wall &&
          (right_front ? wall > support_edge - margin
                       : wall < support_edge + margin))
        throw std::invalid_argument(
            "solve: far wall too close to the initial support (needs 4*sqrt(d*T)+L)");
    }
    for (int k = 0; k < 3; ++k)
      far_baseline[k] = right_front ? state.w[k] : state.w[n - k];
  }

  Trajectory traj;
  StepStats stats;
  std::size_t next_out = 0;
  const double dt = spec.numerics.dt;
  int startup_left = spec.init.smoothness == Smoothness::continuous ? 10 : 0;
  const double startup_ratio = std::pow(100.0, 0.1);
  double startup_dt = dt / 100.0;

  auto emit = [&](const FrontState& s) {
    traj.rows.push_back({s.t, s.g, s.h, s.umax(), s.mass(),
                         s.mass() + (spec.d / spec.mu) * (s.h - s.g)});
    if (record_snapshots) traj.snapshots.push_back(s);
    if (s.t > 0.0 && s.t <= std::min(1.0, T) + 1e-12) {
      const double rt = std::sqrt(s.t);
      traj.H_emp_right = std::max(traj.H_emp_right, (s.h - spec.init.h0) / rt);
      traj.H_emp_left = std::max(traj.H_emp_left, (spec.init.g0 - s.g) / rt);
    }
    if (halfline) {
      const int n = s.intervals();
      const bool right_front = spec.mode == DomainMode::half_line_right_front;
      for (int k = 0; k < 3; ++k) {
        const double v = right_front ? s.w[k] : s.w[n - k];
        if (std::fabs(v - far_baseline[k]) > 1e-6) traj.truncation_warning = true;
      }
    }
  };

  bool stopped = false;
  auto emit_and_check = [&](const FrontState& s) {
    emit(s);
    if (stop_when && stop_when(traj.rows.back())) stopped = true;
  };

  if (times[next_out] == 0.0) {
    emit_and_check(state);
    ++next_out;
  }

  while (next_out < times.size() && !stopped) {
    const double target = times[next_out];
    double step_dt;
    if (startup_left > 0) {
      step_dt = startup_dt;
    } else {
      step_dt = dt;
    }
    if (state.t + step_dt >= target - 1e-14 * std::max(1.0, target))
      step_dt = target - state.t;
    if (step_dt <= 0.0) {
      emit_and_check(state);
      ++next_out;
      continue;
    }
    state = step(state, spec, &stats, step_dt);
    if (startup_left > 0) {
      --startup_left;
      startup_dt *= startup_ratio;
    }
    if (std::fabs(state.t - target) <= 1e-14 * std::max(1.0, target)) {
      state.t = target;
      emit_and_check(state);
      ++next_out;
    }
  }
  traj.clip_events = stats.clipped;
  return traj;
}

/// Single-front half-line run; thin wrapper that checks the mode.
inline Trajectory solve_halfline(const ProblemSpec& spec, double T,
                                 std::vector<double> output_times,
                                 bool record_snapshots = false) {
  if (spec.mode != DomainMode::half_line_left_front &&
      spec.mode != DomainMode::half_line_right_front)
    throw std::invalid_argument("solve_halfline: spec.mode must be a half-line mode");
  return solve(spec, T, std::move(output_times), record_snapshots);
}

}  // namespace frontlab
