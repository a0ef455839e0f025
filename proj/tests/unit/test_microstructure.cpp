#include <doctest.h>

#include <cmath>

#include "castfv/error.hpp"
#include "castfv/microstructure.hpp"

using namespace castfv;

TEST_SUITE("microstructure") {

TEST_CASE("arm spacing power law") {
  CHECK(sdas(1.0) == doctest::Approx(39.4));
  CHECK(sdas(10.0) == doctest::Approx(18.99).epsilon(1e-3));
  CHECK(sdas(2.0) / sdas(1.0) == doctest::Approx(std::pow(2.0, -0.317)));
  CHECK_THROWS(sdas(0.0));
  CHECK_THROWS(sdas(-1.0));
}

TEST_CASE("yield strength") {
  CHECK(yield_strength(25.0) == doctest::Approx(132.1));
  CHECK(yield_strength(1e12) > 120.3);
  CHECK(yield_strength(1e12) == doctest::Approx(120.3).epsilon(1e-6));
  CHECK(yield_strength(20.0) > yield_strength(30.0));
  CHECK_THROWS(yield_strength(0.0));
}

TEST_CASE("grain growth with frozen coefficients follows the closed form") {
  const double r0 = 1e-6, lambda = 1.0, D = 1e-9;
  const double r = integrate_grain_radius(r0, 1.0, [&](double) { return lambda; }, D, 100);
  CHECK(r == doctest::Approx(std::sqrt(r0 * r0 + lambda * lambda * D)).epsilon(1e-6));
  CHECK(r == doctest::Approx(3.164e-5).epsilon(1e-3));
}

TEST_CASE("zero interval keeps the initial radius") {
  CHECK(integrate_grain_radius(2e-6, 0.0, [](double) { return 1.0; }, 1e-9, 10) == 2e-6);
  CHECK(grain_growth({0.0, 1.0}, {1.0, 1.0}, MicroParams{}) == MicroParams{}.r0);
}

TEST_CASE("halving the step barely changes the result") {
  auto lambda = [](double t) { return 0.5 + 0.3 * std::sin(t); };
  const double a = integrate_grain_radius(1e-6, 3.0, lambda, 1e-9, 200);
  const double b = integrate_grain_radius(1e-6, 3.0, lambda, 1e-9, 400);
  CHECK(std::abs(a - b) / b < 1e-8);
}

TEST_CASE("growth parameter sign regime") {
  const MicroParams p;
  // C_s < C_l makes S positive while C_s < C_0.
  const GrowthParameter early = growth_parameter(0.1, p.k_p, p.C0);
  CHECK_FALSE(early.valid);
  CHECK(early.S > 0.0);
  const GrowthParameter late = growth_parameter(0.95, p.k_p, p.C0);
  CHECK(late.valid);
  CHECK(late.S < 0.0);
  CHECK(late.lambda_s > 0.0);
  CHECK(growth_parameter(0.95, p.k_p, 2.0 * p.C0).S == doctest::Approx(late.S));
}

TEST_CASE("history that never reaches a valid growth parameter is flagged") {
  const MicroParams p;
  CHECK(std::isnan(grain_growth({0.0, 10.0}, {0.0, 0.5}, p)));
  GrainTracker g(p.r0);
  g.advance(0.0, 10.0, 0.0, 0.5, p);
  CHECK(g.flagged());
  CHECK_FALSE(g.ever_valid());
}

TEST_CASE("longer solidification gives larger grains") {
  const MicroParams p;
  const double fast = grain_growth({0.0, 10.0}, {0.0, 1.0}, p);
  const double slow = grain_growth({0.0, 40.0}, {0.0, 1.0}, p);
  CHECK(slow > fast);
  CHECK(fast > p.r0);
}

TEST_CASE("cooling rate from a linear trace") {
  const double T_liq = 866.0, T_sol = 850.0, rate = 5.0 / 60.0;
  CoolingTracker tr;
  double T = T_liq + 10.0;
  tr.start(0.0, T, T_liq, T_sol);
  for (int i = 0; i < 1000; ++i) {
    tr.record(i, i + 1.0, T, T - rate, T_liq, T_sol);
    T -= rate;
  }
  CHECK(cooling_rate(tr, T_liq, T_sol) == doctest::Approx(rate).epsilon(1e-9));
}

TEST_CASE("empty or missing intervals give the sentinel") {
  CoolingTracker never;
  never.start(0.0, 900.0, 866.0, 850.0);
  CHECK(std::isnan(cooling_rate(never, 866.0, 850.0)));
  CoolingTracker quench;
  quench.start(0.0, 900.0, 866.0, 850.0);
  quench.record(0.0, 1.0, 900.0, 900.0, 866.0, 850.0);
  quench.record(1.0, 1.0, 900.0, 800.0, 866.0, 850.0);
  CHECK(std::isnan(cooling_rate(quench, 866.0, 850.0)));
  CHECK(finite_max({kNoValue, 1.0, 3.0}) == 3.0);
  CHECK(finite_min({kNoValue, 1.0, 3.0}) == 1.0);
  CHECK(std::isnan(finite_max({kNoValue})));
}

TEST_CASE("two cells with a factor two in cooling rate") {
  std::vector<CoolingTracker> tr(2);
  for (int c = 0; c < 2; ++c) {
    tr[c].start(0.0, 870.0, 866.0, 850.0);
    tr[c].record(0.0, 20.0 * (c + 1), 870.0, 846.0, 866.0, 850.0);
  }
  const std::vector<GrainTracker> grains(2);
  const MicrostructureFields f = microstructure_fields(tr, grains, 866.0, 850.0, MicroParams{});
  CHECK(f.cooling_rate[0] / f.cooling_rate[1] == doctest::Approx(2.0));
  CHECK(f.sdas[0] / f.sdas[1] == doctest::Approx(std::pow(2.0, -0.317)));
  CHECK(f.yield[0] > f.yield[1]);
}

}  // TEST_SUITE
