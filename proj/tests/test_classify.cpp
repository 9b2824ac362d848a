#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "frontlab/classify.hpp"

using namespace frontlab;

namespace {
constexpr double kPi = std::numbers::pi;

ProblemSpec homogeneous_spec(double g0, double h0) {
  ProblemSpec spec;
  spec.model = MediumModel::homogeneous(1.0, 1.0, 1.0, 1.0);
  spec.d = 1.0;
  spec.mu = 1.0;
  spec.init = cosine_bump_data(g0, h0, 1.0);
  spec.numerics.N = 192;
  spec.numerics.dt = 1e-3;
  return spec;
}

ClassifyOptions homogeneous_options(double T_max = 30.0) {
  ClassifyOptions opt;
  opt.rbar = kPi / 2.0;
  opt.T_max = T_max;
  opt.margin = 0.5;
  return opt;
}
}  // namespace

TEST_CASE("supercritical ranges trigger spreading at time zero") {
  DichotomyVerdict v = classify(homogeneous_spec(-2.0, 2.0), homogeneous_options());
  CHECK(v.kind == VerdictKind::Spreading);
  REQUIRE(v.trigger_time.has_value());
  CHECK(*v.trigger_time == 0.0);
  CHECK(v.front_length >= kPi);
}

TEST_CASE("subcritical range with healthy mu still spreads") {
  DichotomyVerdict v = classify(homogeneous_spec(-1.0, 1.0), homogeneous_options());
  CHECK(v.kind == VerdictKind::Spreading);
  REQUIRE(v.trigger_time.has_value());
  CHECK(*v.trigger_time > 0.0);
  CHECK(*v.trigger_time < 20.0);
}

TEST_CASE("small expansion coefficient vanishes") {
  ProblemSpec spec = homogeneous_spec(-0.5, 0.5);
  spec.mu = 0.01;
  spec.init = cosine_bump_data(-0.5, 0.5, 0.1);
  DichotomyVerdict v = classify(spec, homogeneous_options(50.0));
  CHECK(v.kind == VerdictKind::Vanishing);
  CHECK(v.umax_at_decision < 1e-4);
  CHECK(v.front_length < kPi + 0.5);
}

TEST_CASE("radius criterion matches the closed form") {
  CHECK(check_radius_criterion(homogeneous_spec(-2.0, 2.0)));       // 2 >= pi/2
  CHECK_FALSE(check_radius_criterion(homogeneous_spec(-1.0, 1.0))); // 1 < pi/2
}

TEST_CASE("criterion soundness: radius criterion implies a spreading verdict") {
  ProblemSpec spec = homogeneous_spec(-1.7, 1.7);  // 1.7 > pi/2
  REQUIRE(check_radius_criterion(spec));
  DichotomyVerdict v = classify(spec, homogeneous_options());
  CHECK(v.kind == VerdictKind::Spreading);
}

TEST_CASE("mu bisection brackets the threshold") {
  ProblemSpec spec = homogeneous_spec(-0.5, 0.5);
  spec.init = cosine_bump_data(-0.5, 0.5, 0.5);
  ClassifyOptions opt = homogeneous_options(40.0);
  MuStarResult res = mu_star(spec, 0.05, 8.0, 0.05, opt);
  CHECK(res.mu_star > 0.0);
  CHECK(res.mu_lo < res.mu_star);
  CHECK(res.mu_hi > res.mu_star);
  CHECK((res.mu_hi - res.mu_lo) / res.mu_star < 0.06);

  // the final bracket endpoints classify to opposite sides
  ProblemSpec lo_spec = spec;
  lo_spec.mu = res.mu_lo;
  CHECK(classify(lo_spec, opt).kind == VerdictKind::Vanishing);
  ProblemSpec hi_spec = spec;
  hi_spec.mu = res.mu_hi;
  CHECK(classify(hi_spec, opt).kind == VerdictKind::Spreading);

  // larger initial data cannot raise the threshold
  ProblemSpec bigger = spec;
  bigger.init = cosine_bump_data(-0.5, 0.5, 1.0);
  MuStarResult res_big = mu_star(bigger, 0.05, 8.0, 0.05, opt);
  CHECK(res_big.mu_star <= res.mu_star * 1.06);
}

TEST_CASE("verdicts are monotone along a mu grid") {
  ProblemSpec spec = homogeneous_spec(-0.5, 0.5);
  spec.init = cosine_bump_data(-0.5, 0.5, 0.5);
  spec.numerics.N = 128;
  ClassifyOptions opt = homogeneous_options(40.0);
  int switches = 0;
  VerdictKind prev = VerdictKind::Vanishing;
  for (double mu : {0.05, 0.2, 0.8, 2.0, 6.0}) {
    ProblemSpec s = spec;
    s.mu = mu;
    const VerdictKind kind = classify(s, opt).kind;
    REQUIRE(kind != VerdictKind::Undecided);
    if (kind != prev) {
      ++switches;
      CHECK(prev == VerdictKind::Vanishing);
      CHECK(kind == VerdictKind::Spreading);
    }
    prev = kind;
  }
  CHECK(switches == 1);
}

TEST_CASE("mu_star rejects a hopeless bracket") {
  ProblemSpec spec = homogeneous_spec(-2.0, 2.0);  // supercritical: spreads for all mu
  ClassifyOptions opt = homogeneous_options(10.0);
  CHECK_THROWS_AS(mu_star(spec, 0.25, 1.0, 0.05, opt), NoThresholdError);
}

TEST_CASE("semi-wave oracle behaves across the mu range") {
  SemiwaveResult slow = semiwave_speed(1.0, 1.0, 1.0, 0.1);
  SemiwaveResult mid = semiwave_speed(1.0, 1.0, 1.0, 1.0);
  SemiwaveResult fast2 = semiwave_speed(1.0, 1.0, 1.0, 2.0);
  SemiwaveResult fast100 = semiwave_speed(1.0, 1.0, 1.0, 100.0);

  CHECK(slow.c < mid.c);
  CHECK(mid.c < fast2.c);          // monotone in mu
  CHECK(slow.c < 0.3);             // mu -> 0 forces c -> 0
  CHECK(fast100.c > 0.95 * 2.0);   // approaches the KPP speed from below
  CHECK(fast100.c < 2.0);

  // internal consistency: mu q'(0) = c at the root
  CHECK(std::fabs(1.0 * mid.q_slope_origin - mid.c) < 1e-6);
}

TEST_CASE("spreading speeds are symmetric and below the KPP bound") {
  ProblemSpec spec = homogeneous_spec(-2.0, 2.0);
  spec.numerics.N = 256;
  SpeedEstimate est = spreading_speed(spec, 20.0, 0.5, kPi / 2.0, 200);
  CHECK(est.c_right > 0.0);
  CHECK(est.c_right < 2.0);
  CHECK(std::fabs(est.c_right - est.c_left) < 0.01 * est.c_right);
}

TEST_CASE("spreading_speed rejects non-spreading runs") {
  ProblemSpec spec = homogeneous_spec(-0.5, 0.5);
  spec.mu = 0.01;
  spec.init = cosine_bump_data(-0.5, 0.5, 0.1);
  CHECK_THROWS_AS(spreading_speed(spec, 5.0, 0.5, kPi / 2.0, 50),
                  std::invalid_argument);
}
