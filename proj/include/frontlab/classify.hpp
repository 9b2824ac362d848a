#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "frontlab/eigen.hpp"
#include "frontlab/errors.hpp"
#include "frontlab/front_solver.hpp"

namespace frontlab {

enum class VerdictKind { Spreading, Vanishing, Undecided };

inline const char* verdict_name(VerdictKind k) {
  switch (k) {
    case VerdictKind::Spreading: return "Spreading";
    case VerdictKind::Vanishing: return "Vanishing";
    case VerdictKind::Undecided: return "Undecided";
  }
  return "?";
}

struct DichotomyVerdict {
  VerdictKind kind = VerdictKind::Undecided;
  std::optional<double> trigger_time;
  double front_length = 0.0;
  double umax_at_decision = 0.0;
  std::string reason;
  Trajectory evidence;
};

struct ClassifyOptions {
  double rbar = 0.0;    // maximum critical half-length over one period
  double T_max = 50.0;  // decision horizon
  double eps_v = 1e-4;  // sup-norm threshold for vanishing
  double margin = 0.5;  // slack on the vanishing front-length bound
  int outputs = 200;    // monitoring resolution
};

/// Finite-time dichotomy classifier. Spreading is declared at the first
/// output where the range length reaches 2 rbar (a sufficient trigger:
/// restarting at that time, the range criterion guarantees spreading for every
/// center). Vanishing is declared when the sup norm drops below eps_v while
/// the range stays under 2 rbar + margin and both fronts have stalled.
/// Reaching T_max without either gives Undecided.
inline DichotomyVerdict classify(const ProblemSpec& spec, const ClassifyOptions& opt) {
  if (opt.rbar <= 0.0) throw std::invalid_argument("classify: rbar must be positive");
  const double threshold = 2.0 * opt.rbar;

  std::optional<TrajectoryRow> prev;
  std::optional<DichotomyVerdict> decided;
  auto inspect = [&](const TrajectoryRow& row) {
    const double len = row.h - row.g;
    if (len >= threshold) {
      DichotomyVerdict v;
      v.kind = VerdictKind::Spreading;
      v.trigger_time = row.t;
      v.front_length = len;
      v.umax_at_decision = row.umax;
      decided = std::move(v);
      return true;
    }
    if (prev && row.umax < opt.eps_v && len < threshold + opt.margin) {
      const double dt_out = row.t - prev->t;
      const double speed_h = std::fabs(row.h - prev->h) / dt_out;
      const double speed_g = std::fabs(row.g - prev->g) / dt_out;
      if (speed_h < opt.eps_v && speed_g < opt.eps_v) {
        DichotomyVerdict v;
        v.kind = VerdictKind::Vanishing;
        v.trigger_time = row.t;
        v.front_length = len;
        v.umax_at_decision = row.umax;
        decided = std::move(v);
        return true;
      }
    }
    prev = row;
    return false;
  };

  Trajectory traj = solve(spec, opt.T_max, uniform_times(opt.T_max, opt.outputs),
                          /*record_snapshots=*/false, inspect);
  if (decided) {
    decided->evidence = std::move(traj);
    return *decided;
  }
  DichotomyVerdict v;
  v.kind = VerdictKind::Undecided;
  v.reason = "T_max reached without a trigger";
  if (!traj.rows.empty()) {
    v.front_length = traj.rows.back().h - traj.rows.back().g;
    v.umax_at_decision = traj.rows.back().umax;
  }
  v.evidence = std::move(traj);
  return v;
}

/// Theorem-grade sufficient condition: half the initial range is at least the
/// critical radius at the initial center.
inline bool check_radius_criterion(const ProblemSpec& spec, double tol = 1e-4) {
  const double y0 = 0.5 * (spec.init.g0 + spec.init.h0);
  const double rstar = critical_radius(spec.model, spec.d, y0, tol);
  return 0.5 * (spec.init.h0 - spec.init.g0) >= rstar;
}

struct MuStarHistoryRow {
  int iter;
  double mu_lo, mu_hi;
  std::string verdict_mid;
};

struct MuStarResult {
  double mu_star = 0.0;
  double mu_lo = 0.0, mu_hi = 0.0;
  std::vector<MuStarHistoryRow> history;
};

namespace detail {

struct MuVerdict {
  VerdictKind side;     // Spreading or Vanishing after the retry policy
  std::string label;    // raw outcome for logging
};

/// Classifies at T_max; an Undecided outcome is retried once at twice the
/// horizon and, if still undecided, counted on the Spreading side (vanishing
/// manifests quickly; near-critical spreading lingers).
inline MuVerdict classify_for_mu(ProblemSpec spec, double mu,
                                 const ClassifyOptions& opt) {
  spec.mu = mu;
  DichotomyVerdict v = classify(spec, opt);
  if (v.kind == VerdictKind::Undecided) {
    ClassifyOptions retry = opt;
    retry.T_max = 2.0 * opt.T_max;
    retry.outputs = 2 * opt.outputs;
    v = classify(spec, retry);
    if (v.kind == VerdictKind::Undecided)
      return {VerdictKind::Spreading, "UndecidedForcedSpreading"};
  }
  return {v.kind, verdict_name(v.kind)};
}

}  // namespace detail

/// Bisection for the critical expansion coefficient mu* separating vanishing
/// (mu <= mu*) from spreading (mu > mu*) for a subcritical initial range. The
/// bracket is validated first and widened by doubling (at most 10 times per
/// side). Returns the midpoint once the bracket is narrower than tol * mu*.
inline MuStarResult mu_star(const ProblemSpec& spec_template, double mu_lo,
                            double mu_hi, double tol,
                            const ClassifyOptions& opt) {
  if (!(mu_lo > 0.0 && mu_hi > mu_lo))
    throw std::invalid_argument("mu_star: need 0 < mu_lo < mu_hi");
  if (!(tol > 0.0)) throw std::invalid_argument("mu_star: tol > 0 required");

  MuStarResult res;
  int iter = 0;
  auto log = [&](double lo, double hi, const std::string& label) {
    res.history.push_back({iter++, lo, hi, label});
  };

  auto lo_v = detail::classify_for_mu(spec_template, mu_lo, opt);
  int widen = 0;
  while (lo_v.side != VerdictKind::Vanishing) {
    log(mu_lo, mu_hi, "lo:" + lo_v.label);
    if (++widen > 10) {
      if (lo_v.label == "UndecidedForcedSpreading")
        throw InconclusiveError("mu_star: lower endpoint stayed undecided", mu_lo, mu_hi);
      throw NoThresholdError("mu_star: no vanishing endpoint after 10 doublings");
    }
    mu_lo /= 2.0;
    lo_v = detail::classify_for_mu(spec_template, mu_lo, opt);
  }
  auto hi_v = detail::classify_for_mu(spec_template, mu_hi, opt);
  widen = 0;
  while (hi_v.side != VerdictKind::Spreading) {
    log(mu_lo, mu_hi, "hi:" + hi_v.label);
    if (++widen > 10)
      throw NoThresholdError("mu_star: no spreading endpoint after 10 doublings");
    mu_hi *= 2.0;
    hi_v = detail::classify_for_mu(spec_template, mu_hi, opt);
  }

  while (mu_hi - mu_lo > tol * 0.5 * (mu_lo + mu_hi)) {
    const double mid = std::sqrt(mu_lo * mu_hi);  // geometric: mu spans decades
    const auto mv = detail::classify_for_mu(spec_template, mid, opt);
    log(mu_lo, mu_hi, mv.label);
    if (mv.side == VerdictKind::Spreading)
      mu_hi = mid;
    else
      mu_lo = mid;
  }
  log(mu_lo, mu_hi, "final");
  res.mu_star = 0.5 * (mu_lo + mu_hi);
  res.mu_lo = mu_lo;
  res.mu_hi = mu_hi;
  return res;
}

struct SpeedEstimate {
  double c_right = 0.0;
  double c_left = 0.0;
  double t_start = 0.0, t_end = 0.0;
  double fit_residual = 0.0;
};

namespace detail {

inline std::pair<double, double> fit_slope(const std::vector<double>& t,
                                           const std::vector<double>& v) {
  const std::size_t n = t.size();
  double mt = 0.0, mv = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mt += t[i];
    mv += v[i];
  }
  mt /= n;
  mv /= n;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (t[i] - mt) * (v[i] - mv);
    den += (t[i] - mt) * (t[i] - mt);
  }
  const double slope = num / den;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = v[i] - mv - slope * (t[i] - mt);
    rss += e * e;
  }
  return {slope, std::sqrt(rss / n)};
}

}  // namespace detail

/// Least-squares front speeds over the final window of a spreading run.
/// `rbar` is used to confirm the run actually spread; a run whose final range
/// is below 2 rbar is a contract violation.
inline SpeedEstimate spreading_speed(const ProblemSpec& spec, double T,
                                     double window_fraction, double rbar,
                                     int outputs = 400) {
  if (!(window_fraction > 0.0 && window_fraction < 1.0))
    throw std::invalid_argument("spreading_speed: window_fraction in (0,1)");
  Trajectory traj = solve(spec, T, uniform_times(T, outputs));
  const TrajectoryRow& last = traj.rows.back();
  if (last.h - last.g < 2.0 * rbar)
    throw std::invalid_argument("spreading_speed: run did not spread");

  const double t0 = T * (1.0 - window_fraction);
  std::vector<double> ts, hs, gs;
  for (const auto& row : traj.rows) {
    if (row.t < t0) continue;
    ts.push_back(row.t);
    hs.push_back(row.h);
    gs.push_back(-row.g);
  }
  if (ts.size() < 4)
    throw std::invalid_argument("spreading_speed: fit window has too few samples");
  const auto [ch, rh] = detail::fit_slope(ts, hs);
  const auto [cg, rg] = detail::fit_slope(ts, gs);
  SpeedEstimate est;
  est.c_right = ch;
  est.c_left = cg;
  est.t_start = ts.front();
  est.t_end = ts.back();
  est.fit_residual = std::max(rh, rg);
  return est;
}

struct SemiwaveResult {
  double c = 0.0;
  double q_slope_origin = 0.0;  // q'(0) at the returned speed
};

namespace detail {

/// Shoots the homogeneous semi-wave ODE d q'' - c q' + q (a - b q) = 0
/// backward from the saturation saddle along its unstable direction; returns
/// q'(0) at the first crossing of q = 0, or 0 when the orbit lingers at the
/// origin (the KPP-speed limit).
inline double semiwave_slope_at_origin(double a, double b, double d, double c) {
  const double qsat = a / b;
  const double delta = 1e-6 * qsat;
  const double sigma = (c - std::sqrt(c * c + 4.0 * a * d)) / (2.0 * d);
  double q = qsat - delta;
  double p = -sigma * delta;

  const double hstep = std::sqrt(d / a) / 100.0;
  const long max_steps = 2000000;
  auto rhs = [&](double qv, double pv, double& dq, double& dp) {
    dq = -pv;
    dp = -(c * pv - qv * (a - b * qv)) / d;
  };
  double q_prev = q, p_prev = p;
  for (long i = 0; i < max_steps; ++i) {
    double k1q, k1p, k2q, k2p, k3q, k3p, k4q, k4p;
    rhs(q, p, k1q, k1p);
    rhs(q + 0.5 * hstep * k1q, p + 0.5 * hstep * k1p, k2q, k2p);
    rhs(q + 0.5 * hstep * k2q, p + 0.5 * hstep * k2p, k3q, k3p);
    rhs(q + hstep * k3q, p + hstep * k3p, k4q, k4p);
    q_prev = q;
    p_prev = p;
    q += hstep / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
    p += hstep / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    if (q <= 0.0) {
      const double frac = q_prev / (q_prev - q);
      return p_prev + frac * (p - p_prev);
    }
  }
  return 0.0;  // never crossed: effectively the connection orbit
}

}  // namespace detail

/// Semi-wave speed for the homogeneous logistic medium: outer bisection on
/// c in (0, 2 sqrt(a d)) driving the Stefan residual mu q'(0) - c to zero.
inline SemiwaveResult semiwave_speed(double a, double b, double d, double mu,
                                     double tol = 1e-6) {
  if (!(a > 0.0 && b > 0.0 && d > 0.0 && mu > 0.0))
    throw std::invalid_argument("semiwave_speed: a, b, d, mu must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("semiwave_speed: tol > 0");

  const double c_kpp = 2.0 * std::sqrt(a * d);
  auto residual = [&](double c) {
    return mu * detail::semiwave_slope_at_origin(a, b, d, c) - c;
  };

  double lo = 1e-9 * c_kpp, hi = c_kpp * (1.0 - 1e-9);
  if (residual(lo) <= 0.0 || residual(hi) >= 0.0)
    throw SolverError("semiwave_speed: no sign change in (0, 2 sqrt(a d))");

  double mid = 0.5 * (lo + hi), res_mid = residual(mid);
  for (int i = 0; i < 200 && std::fabs(res_mid) >= tol; ++i) {
    if (res_mid > 0.0)
      lo = mid;
    else
      hi = mid;
    mid = 0.5 * (lo + hi);
    res_mid = residual(mid);
  }
  if (std::fabs(res_mid) >= 10.0 * tol)
    throw ConvergenceError("semiwave_speed: residual did not reach tolerance",
                           std::fabs(res_mid));
  SemiwaveResult out;
  out.c = mid;
  out.q_slope_origin = detail::semiwave_slope_at_origin(a, b, d, mid);
  return out;
}

}  // namespace frontlab
