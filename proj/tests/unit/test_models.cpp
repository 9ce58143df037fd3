#include <cmath>

#include "doctest.h"
#include "tamed/estimators.hpp"
#include "tamed/models.hpp"

using namespace tamed;

TEST_CASE("gbm closed form") {
  const SdeModel gbm = models::make_gbm(0.0, 1.0, 1.0);
  const double w0[] = {0.0};
  CHECK((*gbm.exact_solution)(0.0, w0)[0] == 1.0);
  CHECK((*gbm.exact_solution)(1.0, w0)[0] == doctest::Approx(0.6065306597126334).epsilon(1e-15));
  const SdeModel flat = models::make_gbm(0.0, 0.0, 2.5);
  const double w[] = {1.7};
  CHECK((*flat.exact_solution)(0.8, w)[0] == 2.5);
  CHECK_THROWS_AS(models::make_gbm(0.05, 0.2, 0.0), DomainError);
}

TEST_CASE("cubic coefficients") {
  const SdeModel cubic = models::make_cubic(1.0, 1.0, 1.0, 2.0);
  const double zero[] = {0.0};
  const double two[] = {2.0};
  CHECK(eval_drift(cubic, 0.0, zero)[0] == 0.0);
  CHECK(eval_drift(cubic, 0.0, two)[0] == -6.0);
  CHECK(eval_diffusion(cubic, 0.0, two)(0, 0) == 1.0);
  const SdeModel mult = models::make_cubic_multiplicative(1.0, 1.0, 0.5, 2.0);
  CHECK(eval_diffusion(mult, 0.0, zero)(0, 0) == 0.0);
  CHECK(eval_diffusion(mult, 0.0, two)(0, 0) == 1.0);
  CHECK_THROWS_AS(models::make_cubic(1.0, 0.0, 1.0, 2.0), DomainError);
}

TEST_CASE("three dimensional cubic") {
  const SdeModel m = models::make_cubic_3d(1.0, 1.0, 0.5, 2.0);
  CHECK(m.dim_state == 3);
  CHECK(m.dim_noise == 3);
  const double x[] = {2.0, 0.0, -1.0};
  CHECK(eval_drift(m, 0.0, x) == State{-6.0, 0.0, 0.0});
  const Matrix s = eval_diffusion(m, 0.0, x);
  CHECK(s(0, 0) == 0.5);
  CHECK(s(1, 2) == 0.0);
}

TEST_CASE("zero model") {
  const SdeModel z = models::make_zero(2.0, 2);
  CHECK(z.initial_state(0, 0) == State{2.0, 2.0});
  const double x[] = {5.0, -1.0};
  CHECK(eval_drift(z, 0.0, x) == State{0.0, 0.0});
}

TEST_CASE("registry lookup") {
  for (const auto& entry : models::registry()) {
    CAPTURE(entry.name);
    const SdeModel m = models::make_model(entry.name);
    CHECK(m.name == entry.name);
    CHECK_NOTHROW(m.validate());
  }
  CHECK(models::make_model("cubic-additive", {{"x0", 3.0}}).initial_state(0, 0)[0] == 3.0);
  CHECK_THROWS_AS(models::make_model("quartic"), DomainError);
  CHECK_THROWS_AS(models::make_model("gbm", {{"lam", 1.0}}), DomainError);
}

TEST_CASE("every shipped model passes its own spot-check") {
  for (const auto& entry : models::registry()) {
    CAPTURE(entry.name);
    const SpotCheckReport report = spot_check_assumptions(models::make_model(entry.name), 100000, 1e3, 17);
    for (const auto& check : report.checks) {
      CAPTURE(check.name);
      CHECK(check.checked);
      CHECK(check.violations == 0);
    }
  }
  const SdeModel strong = models::make_cubic_multiplicative(-2.0, 3.0, 1.5, 1.0);
  CHECK(spot_check_assumptions(strong, 50000, 1e3, 18).total_violations() == 0);
  const SdeModel gbm = models::make_gbm(-0.3, 0.9, 1.0);
  CHECK(spot_check_assumptions(gbm, 50000, 1e3, 19).total_violations() == 0);
}
