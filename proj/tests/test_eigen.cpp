#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "frontlab/eigen.hpp"

using namespace frontlab;

namespace {
constexpr double kPi = std::numbers::pi;

MediumModel periodic_preset() {
  // a = 1 + 0.5 cos(2 pi t / omega) cos(2 pi x / L)
  return MediumModel{parse_coefficient("1 + 0.5*cos(1t)*cos(1x)"),
                     Coefficient(1.0), 1.0, 2.0 * kPi};
}
}  // namespace

TEST_CASE("constant coefficient eigenvalue matches the closed form") {
  MediumModel m = MediumModel::homogeneous(1.0, 1.0, 1.0, 1.0);
  EigenResult e = monodromy_eigen(m, 1.0, 0.0, 2.0, 400, 1e-10);
  const double exact = kPi * kPi / 16.0 - 1.0;
  CHECK(std::fabs(e.lambda - exact) < 1e-3);
  CHECK(e.rho > 1.0);  // lambda < 0
  CHECK(e.residual < 1e-10);
}

TEST_CASE("time-only modulation integrates out over a period") {
  MediumModel m{parse_coefficient("1 + 0.5*cos(1t)"), Coefficient(1.0), 1.0, 1.0};
  EigenResult e = monodromy_eigen(m, 1.0, 0.0, 2.0, 400, 1e-10);
  const double exact = kPi * kPi / 16.0 - 1.0;
  CHECK(std::fabs(e.lambda - exact) < 1e-3);
}

TEST_CASE("eigenvalue is L-periodic in the window center") {
  MediumModel m = periodic_preset();
  EigenResult a = monodromy_eigen(m, 1.0, 0.7, 1.5, 128, 1e-10);
  EigenResult b = monodromy_eigen(m, 1.0, 0.7 + m.L, 1.5, 128, 1e-10);
  CHECK(std::fabs(a.lambda - b.lambda) < 1e-8);
}

TEST_CASE("eigenvalue decreases strictly in the half-length") {
  MediumModel m = periodic_preset();
  double prev = monodromy_eigen(m, 1.0, 0.0, 0.5, 128, 1e-9).lambda;
  for (double R : {0.8, 1.2, 1.8, 2.7}) {
    const double cur = monodromy_eigen(m, 1.0, 0.0, R, 128, 1e-9).lambda;
    CHECK(prev > cur + 1e-10);
    prev = cur;
  }
}

TEST_CASE("scaled eigenvalue respects the bracket inequality") {
  MediumModel m = periodic_preset();
  const double lambda_star = 1.0 * kPi * kPi / 4.0;  // d (pi/2)^2
  const double m_lo = 0.5, m_hi = 1.5;
  for (double y : {0.0, 1.0, 3.0}) {
    for (double R : {0.4, 1.0, 2.0}) {
      const double lam = monodromy_eigen(m, 1.0, y, R, 160, 1e-9).lambda;
      CHECK(R * R * lam >= lambda_star - R * R * m_hi - 1e-6);
      CHECK(R * R * lam <= lambda_star - R * R * m_lo + 1e-6);
    }
  }
}

TEST_CASE("eigenprofile is positive inside and pinned at the walls") {
  MediumModel m = periodic_preset();
  EigenResult e = monodromy_eigen(m, 1.0, 0.3, 1.7, 128, 1e-9);
  CHECK(e.psi.front() == 0.0);
  CHECK(e.psi.back() == 0.0);
  double maxval = 0.0;
  for (std::size_t j = 1; j + 1 < e.psi.size(); ++j) {
    CHECK(e.psi[j] > 0.0);
    maxval = std::max(maxval, e.psi[j]);
  }
  CHECK(maxval == Catch::Approx(1.0));
}

TEST_CASE("grid refinement converges at second order") {
  MediumModel m = MediumModel::homogeneous(1.0, 1.0, 1.0, 1.0);
  const double exact = kPi * kPi / 16.0 - 1.0;
  const double e100 =
      std::fabs(monodromy_eigen(m, 1.0, 0.0, 2.0, 100, 1e-11).lambda - exact);
  const double e200 =
      std::fabs(monodromy_eigen(m, 1.0, 0.0, 2.0, 200, 1e-11).lambda - exact);
  const double e400 =
      std::fabs(monodromy_eigen(m, 1.0, 0.0, 2.0, 400, 1e-11).lambda - exact);
  CHECK(e100 / e200 > 2.8);
  CHECK(e100 / e200 < 5.8);
  CHECK(e200 / e400 > 2.8);
  CHECK(e200 / e400 < 5.8);
}

TEST_CASE("critical radius of the homogeneous medium is pi/2") {
  MediumModel m = MediumModel::homogeneous(1.0, 1.0, 1.0, 1.0);
  CHECK(std::fabs(critical_radius(m, 1.0, 0.0, 1e-4) - kPi / 2.0) < 1e-3);
}

TEST_CASE("critical radius scales with the growth rate") {
  MediumModel m = MediumModel::homogeneous(4.0, 1.0, 1.0, 1.0);
  CHECK(std::fabs(critical_radius(m, 1.0, 0.0, 1e-4) - kPi / 4.0) < 1e-3);
}

TEST_CASE("deeper growth shrinks the critical patch") {
  MediumModel m{parse_coefficient("1 + 0.5*cos(1x)"), Coefficient(1.0), 1.0,
                2.0 * kPi};
  const double r_at_peak = critical_radius(m, 1.0, 0.0, 1e-3);   // a(0) = 1.5
  const double r_at_trough = critical_radius(m, 1.0, kPi, 1e-3); // a(pi) = 0.5
  CHECK(r_at_peak < r_at_trough);
}

TEST_CASE("nonpositive growth has no critical radius") {
  MediumModel m = MediumModel::homogeneous(-0.5, 1.0, 1.0, 1.0);
  CHECK_THROWS_AS(critical_radius(m, 1.0, 0.0, 1e-3), NoCriticalRadiusError);
}

TEST_CASE("large-R limit approaches the whole-line eigenvalue from above") {
  MediumModel m = MediumModel::homogeneous(1.0, 1.0, 1.0, 1.0);
  const double tol = 1e-2;
  const double lam = lambda_infinity(m, 1.0, tol);
  CHECK(lam > -1.0);
  CHECK(lam < -1.0 + tol);
}

TEST_CASE("whole-line eigenvalue of the periodic preset sits below -m_star_min bound") {
  MediumModel m{parse_coefficient("1 + 0.5*cos(1x)"), Coefficient(1.0), 1.0, 2.0};
  const double lam = lambda_infinity(m, 1.0, 2e-2);
  // lambda_1(L) <= -m_* = -(1 - 0.5) and >= -m* = -1.5
  CHECK(lam <= -0.5 + 2e-2);
  CHECK(lam >= -1.5 - 2e-2);
}

TEST_CASE("rbar dominates every sampled critical radius") {
  MediumModel m{parse_coefficient("1 + 0.5*cos(1x)"), Coefficient(1.0), 1.0,
                2.0 * kPi};
  const double rb = rbar(m, 1.0, 8, 1e-3);
  for (int i = 0; i < 8; ++i) {
    const double y = m.L * i / 8.0;
    CHECK(rb >= critical_radius(m, 1.0, y, 1e-3) - 2e-3);
  }

  MediumModel hom = MediumModel::homogeneous(1.0, 1.0, 1.0, 1.0);
  CHECK(rbar(hom, 1.0, 8, 1e-4) ==
        Catch::Approx(critical_radius(hom, 1.0, 0.0, 1e-4)).margin(1e-6));
}
