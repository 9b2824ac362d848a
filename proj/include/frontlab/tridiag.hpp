#pragma once

#include <cstddef>
#include <vector>

namespace frontlab {

/// Thomas algorithm for a tridiagonal system. `lower[i]` multiplies u[i-1],
/// `diag[i]` multiplies u[i], `upper[i]` multiplies u[i+1]. rhs is overwritten
/// with the solution. Scratch must have the same size as rhs.
inline void solve_tridiag(const std::vector<double>& lower,
                          const std::vector<double>& diag,
                          const std::vector<double>& upper,
                          std::vector<double>& rhs,
                          std::vector<double>& scratch) {
  const std::size_t n = rhs.size();
  scratch[0] = upper[0] / diag[0];
  rhs[0] /= diag[0];
  for (std::size_t i = 1; i < n; ++i) {
    const double m = 1.0 / (diag[i] - lower[i] * scratch[i - 1]);
    scratch[i] = upper[i] * m;
    rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) * m;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= scratch[i] * rhs[i + 1];
}

/// Cyclic tridiagonal solve (periodic wrap between the first and last
/// unknowns) via the Sherman-Morrison correction on top of solve_tridiag.
/// `top_right` is the matrix entry coupling u[0] to u[n-1]; `bottom_left`
/// couples u[n-1] to u[0].
inline void solve_cyclic_tridiag(std::vector<double> lower,
                                 std::vector<double> diag,
                                 std::vector<double> upper,
                                 double top_right, double bottom_left,
                                 std::vector<double>& rhs) {
  const std::size_t n = rhs.size();
  const double gamma = -diag[0];
  diag[0] -= gamma;
  diag[n - 1] -= top_right * bottom_left / gamma;

  std::vector<double> scratch(n), z(n, 0.0);
  z[0] = gamma;
  z[n - 1] = bottom_left;

  solve_tridiag(lower, diag, upper, rhs, scratch);
  solve_tridiag(lower, diag, upper, z, scratch);

  const double factor = (rhs[0] + top_right * rhs[n - 1] / gamma) /
                        (1.0 + z[0] + top_right * z[n - 1] / gamma);
  for (std::size_t i = 0; i < n; ++i) rhs[i] -= factor * z[i];
}

}  // namespace frontlab
