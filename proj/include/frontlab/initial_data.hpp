#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace frontlab {

enum class Smoothness {
  continuous,     // merely continuous at the fronts; startup layer engaged
  compatible_c2,  // vanishes smoothly at the fronts
};

/// Initial condition for the free boundary problem: continuous, positive on
/// (g0, h0), zero at the endpoints.
struct InitialData {
  double g0 = -1.0;
  double h0 = 1.0;
  std::function<double(double)> u0;
  Smoothness smoothness = Smoothness::continuous;
};

/// Tent profile with the peak at the interval center.
inline InitialData triangle_data(double g0, double h0, double peak) {
  InitialData d;
  d.g0 = g0;
  d.h0 = h0;
  d.u0 = [g0, h0, peak](double x) {
    const double v = peak * 2.0 / (h0 - g0) * std::min(x - g0, h0 - x);
    return std::max(v, 0.0);
  };
  d.smoothness = Smoothness::continuous;
  return d;
}

/// Half-cosine bump, smooth and compatible at the fronts.
inline InitialData cosine_bump_data(double g0, double h0, double amplitude) {
  InitialData d;
  d.g0 = g0;
  d.h0 = h0;
  const double c = 0.5 * (g0 + h0);
  const double len = h0 - g0;
  d.u0 = [c, len, amplitude](double x) {
    const double v = amplitude * std::cos(std::numbers::pi * (x - c) / len);
    return std::max(v, 0.0);
  };
  d.smoothness = Smoothness::compatible_c2;
  return d;
}

namespace detail {
/// Quintic smoothstep: C^2 ramp from 0 to 1 with vanishing first and second
/// derivatives at both ends.
inline double smoothstep(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}
}  // namespace detail

/// Flat level inside, C^2 shoulders of the given width at each front.
inline InitialData plateau_data(double g0, double h0, double level,
                                double shoulder_width) {
  if (shoulder_width <= 0.0 || 2.0 * shoulder_width > h0 - g0)
    throw std::invalid_argument("plateau_data: shoulder_width out of range");
  InitialData d;
  d.g0 = g0;
  d.h0 = h0;
  d.u0 = [g0, h0, level, shoulder_width](double x) {
    const double sl = detail::smoothstep((x - g0) / shoulder_width);
    const double sr = detail::smoothstep((h0 - x) / shoulder_width);
    return level * std::min(sl, sr);
  };
  d.smoothness = Smoothness::continuous;
  return d;
}

/// The n-th member of the nondecreasing approximating sequence u_{0n} =
/// eta_n * u0, where eta_n is a C^2 bump equal to 1 on
/// [g0 + 2 eps0/n, h0 - 2 eps0/n] and 0 outside [g0 + eps0/n, h0 - eps0/n],
/// eps0 = (h0 - g0)/4. The returned data carries the shrunken support as its
/// fronts. Pointwise: 0 <= u_{0n} <= u_{0,n+1} <= u0, with uniform convergence
/// as n grows.
inline InitialData build_approximants(const InitialData& init, int n) {
  if (n < 1) throw std::invalid_argument("build_approximants: n >= 1");
  const double eps0 = (init.h0 - init.g0) / 4.0;
  const double gl = init.g0 + eps0 / n;
  const double hr = init.h0 - eps0 / n;
  const double ramp = eps0 / n;
  auto base = init.u0;
  InitialData out;
  out.g0 = gl;
  out.h0 = hr;
  out.u0 = [base, gl, hr, ramp](double x) {
    const double eta = std::min(detail::smoothstep((x - gl) / ramp),
                                detail::smoothstep((hr - x) / ramp));
    return eta * base(x);
  };
  out.smoothness = Smoothness::compatible_c2;  // vanishes C^2-flat at its fronts
  return out;
}

}  // namespace frontlab
