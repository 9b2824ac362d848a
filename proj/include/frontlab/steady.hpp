#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "frontlab/errors.hpp"
#include "frontlab/medium.hpp"
#include "frontlab/tridiag.hpp"

namespace frontlab {

enum class SteadyDomain { cell, dirichlet, half_line };

/// A positive time-periodic state as one period of frames on a (t, x)
/// lattice. `residual` is the sup displacement of the final period map
/// application; frames[0] and frames[nsub] agree to that residual.
struct PeriodicState {
  SteadyDomain domain = SteadyDomain::cell;
  double y = 0.0;    // medium shift (dirichlet)
  double R = 0.0;    // half-length (dirichlet)
  double X_L = 0.0;  // truncation (half-line)
  double x_lo = 0.0, x_hi = 0.0;
  bool periodic_x = false;
  double omega = 1.0, L = 1.0;
  std::vector<double> times;                // nsub + 1 entries over [0, omega]
  std::vector<std::vector<double>> frames;  // frames[k][j]
  double residual = 0.0;
  int periods_used = 0;
  bool truncation_warning = false;

  double sup() const {
    double m = 0.0;
    for (const auto& f : frames)
      for (double v : f) m = std::max(m, v);
    return m;
  }

  /// Minimum over nodes strictly inside the domain (Dirichlet walls excluded).
  double inf_interior() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& f : frames) {
      const std::size_t lo = periodic_x ? 0 : 1;
      const std::size_t hi = periodic_x ? f.size() : f.size() - 1;
      for (std::size_t j = lo; j < hi; ++j) m = std::min(m, f[j]);
    }
    return m;
  }

  /// Bilinear interpolation, periodic in t (and in x on the cell).
  double eval(double t, double x) const {
    double tf = std::fmod(t, omega);
    if (tf < 0.0) tf += omega;
    const int nsub = static_cast<int>(frames.size()) - 1;
    double kr = tf / omega * nsub;
    int k = std::min(static_cast<int>(kr), nsub - 1);
    const double st = kr - k;

    const int nx = static_cast<int>(frames[0].size());
    double value_lo, value_hi;
    if (periodic_x) {
      double xf = std::fmod(x - x_lo, L);
      if (xf < 0.0) xf += L;
      double jr = xf / L * nx;
      int j = std::min(static_cast<int>(jr), nx - 1);
      const double sx = jr - j;
      const int jn = (j + 1) % nx;
      value_lo = (1.0 - sx) * frames[k][j] + sx * frames[k][jn];
      value_hi = (1.0 - sx) * frames[k + 1][j] + sx * frames[k + 1][jn];
    } else {
      const double xc = std::clamp(x, x_lo, x_hi);
      double jr = (xc - x_lo) / (x_hi - x_lo) * (nx - 1);
      int j = std::min(static_cast<int>(jr), nx - 2);
      const double sx = jr - j;
      value_lo = (1.0 - sx) * frames[k][j] + sx * frames[k][j + 1];
      value_hi = (1.0 - sx) * frames[k + 1][j] + sx * frames[k + 1][j + 1];
    }
    return (1.0 - st) * value_lo + st * value_hi;
  }
};

namespace detail {

/// One period of IMEX substeps: Crank-Nicolson diffusion, reaction explicit at
/// the substep midpoint. Fills frames[k] for k = 0..nsub from the start
/// vector; returns the sup displacement over the period.
class CellIntegrator {
 public:
  CellIntegrator(const MediumModel& model, double d, SteadyDomain dom,
                 double x_lo, double x_hi, double shift, int grid, int nsub,
                 const PeriodicState* wall_clamp)
      : model_(model), d_(d), dom_(dom), x_lo_(x_lo), x_hi_(x_hi),
        shift_(shift), grid_(grid), nsub_(nsub), wall_clamp_(wall_clamp) {
    nx_ = dom == SteadyDomain::cell ? grid : grid + 1;
    dx_ = (x_hi - x_lo) / grid;
    dt_ = model.omega / nsub;
  }

  int nx() const { return nx_; }
  double node(int j) const { return x_lo_ + j * dx_; }

  double run_period(std::vector<double>& v,
                    std::vector<std::vector<double>>* frames) const {
    const double alpha = 0.5 * dt_ * d_ / (dx_ * dx_);
    std::vector<double> start = v;
    if (frames) (*frames)[0] = v;
    std::vector<double> lower(nx_), diag(nx_), upper(nx_), rhs(nx_), scratch(nx_);
    for (int k = 0; k < nsub_; ++k) {
      const double t_mid = (k + 0.5) * dt_;
      const double t_new = (k + 1.0) * dt_;
      if (dom_ == SteadyDomain::cell) {
        auto at = [&](int j) { return v[(j % nx_ + nx_) % nx_]; };
        for (int j = 0; j < nx_; ++j) {
          lower[j] = upper[j] = -alpha;
          diag[j] = 1.0 + 2.0 * alpha;
          rhs[j] = at(j) + alpha * (at(j + 1) - 2.0 * at(j) + at(j - 1)) +
                   dt_ * eval_f(model_, t_mid, node(j), std::max(at(j), 0.0));
        }
        solve_cyclic_tridiag(lower, diag, upper, -alpha, -alpha, rhs);
      } else {
        for (int j = 1; j < nx_ - 1; ++j) {
          lower[j] = upper[j] = -alpha;
          diag[j] = 1.0 + 2.0 * alpha;
          rhs[j] = v[j] + alpha * (v[j + 1] - 2.0 * v[j] + v[j - 1]) +
                   dt_ * eval_f(model_, t_mid, node(j) + shift_, std::max(v[j], 0.0));
        }
        lower[0] = upper[0] = lower[nx_ - 1] = upper[nx_ - 1] = 0.0;
        diag[0] = diag[nx_ - 1] = 1.0;
        rhs[nx_ - 1] = 0.0;  // Dirichlet zero at the right wall
        rhs[0] = (dom_ == SteadyDomain::half_line && wall_clamp_)
                     ? wall_clamp_->eval(t_new, x_lo_)
                     : 0.0;
        solve_tridiag(lower, diag, upper, rhs, scratch);
      }
      for (double& w : rhs) w = std::max(w, 0.0);
      v.swap(rhs);
      if (frames) (*frames)[k + 1] = v;
    }
    double disp = 0.0;
    for (int j = 0; j < nx_; ++j) disp = std::max(disp, std::fabs(v[j] - start[j]));
    return disp;
  }

 private:
  const MediumModel& model_;
  double d_;
  SteadyDomain dom_;
  double x_lo_, x_hi_, shift_, dx_, dt_;
  int grid_, nsub_, nx_;
  const PeriodicState* wall_clamp_;
};

inline PeriodicState iterate_to_fixed_point(const MediumModel& model, double d,
                                            SteadyDomain dom, double x_lo,
                                            double x_hi, double shift, int grid,
                                            int nsub, double tol, double start,
                                            const PeriodicState* wall_clamp,
                                            const char* what) {
  CellIntegrator integ(model, d, dom, x_lo, x_hi, shift, grid, nsub, wall_clamp);
  std::vector<double> v(integ.nx(), start);
  if (dom != SteadyDomain::cell) {
    v.back() = 0.0;
    if (dom == SteadyDomain::dirichlet) v.front() = 0.0;
  }
  PeriodicState st;
  st.domain = dom;
  st.x_lo = x_lo;
  st.x_hi = x_hi;
  st.periodic_x = dom == SteadyDomain::cell;
  st.omega = model.omega;
  st.L = model.L;
  st.frames.assign(nsub + 1, std::vector<double>(integ.nx()));
  st.times.resize(nsub + 1);
  for (int k = 0; k <= nsub; ++k) st.times[k] = model.omega * k / nsub;

  const int max_periods = 1000;
  double disp = 0.0;
  for (int period = 1; period <= max_periods; ++period) {
    disp = integ.run_period(v, &st.frames);
    st.periods_used = period;
    if (disp < tol) {
      st.residual = disp;
      double sup = 0.0;
      for (double w : v) sup = std::max(sup, w);
      if (sup < tol) {
        if (dom == SteadyDomain::dirichlet)
          throw SubcriticalDomainError(std::string(what) +
                                       ": state collapsed; interval at or below the critical length");
        throw SolverError(std::string(what) +
                          ": state collapsed to zero; is lambda_1 negative?");
      }
      return st;
    }
  }
  throw ConvergenceError(std::string(what) + ": period map did not reach a fixed point", disp);
}

}  // namespace detail

/// Positive periodic state on the space-periodic cell [0, L), reached by
/// forward integration of the Cauchy problem from a constant initial value
/// (default: the saturation level M).
inline PeriodicState periodic_state_cell(const MediumModel& model, double d,
                                         int grid, double tol,
                                         double start = -1.0, int substeps = 128) {
  if (grid < 16) throw std::invalid_argument("periodic_state_cell: grid >= 16");
  if (start <= 0.0) {
    start = model.saturation_level();
    if (!std::isfinite(start))
      throw std::invalid_argument("periodic_state_cell: no finite saturation level");
  }
  return detail::iterate_to_fixed_point(model, d, SteadyDomain::cell, 0.0,
                                        model.L, 0.0, grid, substeps, tol,
                                        start, nullptr, "periodic_state_cell");
}

/// Positive periodic state on (-R, R) with Dirichlet walls for the shifted
/// medium f(t, x + y, .). Requires R > R*(y); otherwise the iteration
/// collapses and SubcriticalDomainError is thrown.
inline PeriodicState periodic_state_dirichlet(const MediumModel& model, double d,
                                              double y, double R, int grid,
                                              double tol, double start = -1.0,
                                              int substeps = 128) {
  if (grid < 16) throw std::invalid_argument("periodic_state_dirichlet: grid >= 16");
  if (R <= 0.0) throw std::invalid_argument("periodic_state_dirichlet: R > 0");
  if (start <= 0.0) {
    start = model.saturation_level();
    if (!std::isfinite(start))
      throw std::invalid_argument("periodic_state_dirichlet: no finite saturation level");
  }
  PeriodicState st = detail::iterate_to_fixed_point(
      model, d, SteadyDomain::dirichlet, -R, R, y, grid, substeps, tol, start,
      nullptr, "periodic_state_dirichlet");
  st.y = y;
  st.R = R;
  return st;
}

/// Positive periodic state on the half line (-infty, 0], truncated at X_L with
/// the far wall clamped to the whole-line periodic cell state. The doubling
/// check flags truncation sensitivity when sup p moves by 1e-4 or more.
inline PeriodicState periodic_state_halfline(const MediumModel& model, double d,
                                             double X_L, int grid, double tol,
                                             int substeps = 128,
                                             bool check_truncation = true) {
  if (X_L > -4.0 * model.L)
    throw std::invalid_argument("periodic_state_halfline: X_L <= -4 L required");
  if (grid < 16) throw std::invalid_argument("periodic_state_halfline: grid >= 16");
  const double start = model.saturation_level();
  if (!std::isfinite(start))
    throw std::invalid_argument("periodic_state_halfline: no finite saturation level");

  const PeriodicState cell = periodic_state_cell(model, d, std::max(grid / 4, 32), tol);
  PeriodicState st = detail::iterate_to_fixed_point(
      model, d, SteadyDomain::half_line, X_L, 0.0, 0.0, grid, substeps, tol,
      start, &cell, "periodic_state_halfline");
  st.X_L = X_L;

  if (check_truncation) {
    PeriodicState wide = detail::iterate_to_fixed_point(
        model, d, SteadyDomain::half_line, 2.0 * X_L, 0.0, 0.0, 2 * grid,
        substeps, tol, start, &cell, "periodic_state_halfline");
    if (std::fabs(wide.sup() - st.sup()) >= 1e-4) st.truncation_warning = true;
  }
  return st;
}

}  // namespace frontlab
