#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "frontlab/coefficient.hpp"
#include "frontlab/errors.hpp"

namespace frontlab {

/// Logistic reaction f(t,x,u) = u * (a(t,x) - b(t,x) u) with space-time
/// periodic coefficients. The growth bound K = sup a and the saturation level
/// M = sup a / inf b are derived from the coefficient interval bounds.
struct MediumModel {
  Coefficient a;
  Coefficient b;
  double omega = 1.0;  // time period
  double L = 1.0;      // space period

  static MediumModel homogeneous(double a0, double b0, double omega = 1.0,
                                 double L = 1.0) {
    return MediumModel{Coefficient(a0), Coefficient(b0), omega, L};
  }

  bool is_homogeneous() const { return a.is_constant() && b.is_constant(); }

  double growth_bound() const { return a.upper_bound(); }  // K

  /// M with f <= 0 for u >= M; +inf when inf b <= 0.
  double saturation_level() const {
    const double binf = b.lower_bound();
    if (binf <= 0.0) return std::numeric_limits<double>::infinity();
    return std::max(a.upper_bound(), 0.0) / binf;
  }
};

inline double eval_f(const MediumModel& m, double t, double x, double u) {
  if (u < 0.0) throw std::domain_error("eval_f: negative density u");
  if (u == 0.0) return 0.0;  // f(t,x,0) = 0 structurally
  return u * (m.a.eval(t, x, m.omega, m.L) - m.b.eval(t, x, m.omega, m.L) * u);
}

/// d/du f(t,x,u) at u = 0, i.e. the linearized growth rate a(t,x).
inline double eval_dfu0(const MediumModel& m, double t, double x) {
  return m.a.eval(t, x, m.omega, m.L);
}

enum class Hypothesis {
  zero_at_zero,     // f(t,x,0) = 0
  linear_bound,     // f <= K u for u >= 0
  saturation,       // f <= 0 for u >= M
  periodicity,      // f(t+omega,x,u) = f(t,x,u) = f(t,x+L,u)
  sublinearity,     // u -> f/u strictly decreasing
};

inline const char* hypothesis_name(Hypothesis h) {
  switch (h) {
    case Hypothesis::zero_at_zero: return "f(t,x,0)=0";
    case Hypothesis::linear_bound: return "f<=K*u";
    case Hypothesis::saturation: return "f<=0 above M";
    case Hypothesis::periodicity: return "periodicity";
    case Hypothesis::sublinearity: return "f/u decreasing";
  }
  return "?";
}

struct HypothesisViolation {
  Hypothesis which;
  double t, x, u;
  std::string detail;
};

struct HypothesisReport {
  bool ok = true;
  std::vector<HypothesisViolation> violations;
  double K = 0.0;       // inferred growth bound (sampled sup a)
  double M = 0.0;       // inferred saturation level
  double m_star_min = 0.0;  // min of the linearized rate over the lattice
  double m_star_max = 0.0;  // max of the linearized rate over the lattice
};

/// Samples (t,x,u) on a samples^3 lattice over [0,omega] x [0,L] x [0,2M] and
/// checks the structural hypotheses of the logistic family. Violations are
/// reported with a witness point, never thrown.
inline HypothesisReport validate_hypotheses(const MediumModel& m, int samples = 64) {
  if (samples < 1) throw std::invalid_argument("validate_hypotheses: samples >= 1");
  HypothesisReport rep;
  auto add = [&](Hypothesis which, double t, double x, double u, std::string detail) {
    rep.ok = false;
    rep.violations.push_back({which, t, x, u, std::move(detail)});
  };

  double a_min = std::numeric_limits<double>::infinity();
  double a_max = -a_min;
  double b_min = std::numeric_limits<double>::infinity();
  double b_min_t = 0.0, b_min_x = 0.0;
  for (int i = 0; i <= samples; ++i) {
    const double t = m.omega * i / samples;
    for (int j = 0; j <= samples; ++j) {
      const double x = m.L * j / samples;
      const double av = m.a.eval(t, x, m.omega, m.L);
      const double bv = m.b.eval(t, x, m.omega, m.L);
      a_min = std::min(a_min, av);
      a_max = std::max(a_max, av);
      if (bv < b_min) {
        b_min = bv;
        b_min_t = t;
        b_min_x = x;
      }
    }
  }
  rep.m_star_min = a_min;
  rep.m_star_max = a_max;
  rep.K = a_max;
  rep.M = b_min > 0.0 ? std::max(a_max, 0.0) / b_min
                      : std::numeric_limits<double>::infinity();

  if (b_min <= 0.0) {
    add(Hypothesis::sublinearity, b_min_t, b_min_x, 1.0,
        "b(t,x) = " + std::to_string(b_min) + " is not positive, so f/u is not strictly decreasing");
    add(Hypothesis::saturation, b_min_t, b_min_x, 0.0,
        "no finite saturation level: inf b <= 0");
  }

  const double u_hi = std::isfinite(rep.M) ? 2.0 * rep.M : 2.0;
  for (int i = 0; i < samples; ++i) {
    const double t = m.omega * i / samples;
    for (int j = 0; j < samples; ++j) {
      const double x = m.L * j / samples;
      if (eval_f(m, t, x, 0.0) != 0.0) add(Hypothesis::zero_at_zero, t, x, 0.0, "f(t,x,0) != 0");
      for (int k = 1; k <= samples; ++k) {
        const double u = u_hi * k / samples;
        const double fv = eval_f(m, t, x, u);
        if (fv > rep.K * u + 1e-12 * std::fabs(rep.K * u))
          add(Hypothesis::linear_bound, t, x, u, "f exceeds K*u");
        if (std::isfinite(rep.M) && u >= rep.M && fv > 1e-12)
          add(Hypothesis::saturation, t, x, u, "f positive above M");
        const double f_shift_t = eval_f(m, t + m.omega, x, u);
        const double f_shift_x = eval_f(m, t, x + m.L, u);
        const double ulp4 = 4.0 * std::fabs(fv) * std::numeric_limits<double>::epsilon();
        if (std::fabs(f_shift_t - fv) > ulp4 || std::fabs(f_shift_x - fv) > ulp4)
          add(Hypothesis::periodicity, t, x, u, "periodic shift mismatch beyond 4 ulp");
      }
    }
  }
  return rep;
}

}  // namespace frontlab
