#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "tamed/models.hpp"
#include "tamed/sde_core.hpp"

using namespace tamed;

TEST_CASE("kappa rounds down to the grid") {
  CHECK(kappa(TimeGrid(1.0, 10), 0.37) == 3.0 / 10.0);
  CHECK(kappa(TimeGrid(1.0, 10), 0.3) == TimeGrid(1.0, 10).point(3));
  CHECK(kappa(TimeGrid(1.0, 4), 0.999) == 0.75);
  CHECK(kappa(TimeGrid(1.0, 4), 1.0) == 1.0);
  CHECK(kappa(TimeGrid(1.0, 4), 0.0) == 0.0);
}

TEST_CASE("kappa is idempotent and never ahead of t") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (std::uint64_t n : {1u, 3u, 10u, 64u, 1000u}) {
    const TimeGrid grid(2.0, n);
    for (int i = 0; i < 2000; ++i) {
      const double t = u(gen);
      const double k = kappa(grid, t);
      CHECK(k <= t);
      CHECK(t - k < 1.0 / static_cast<double>(n) + 1e-15);
      CHECK(kappa(grid, k) == k);
    }
  }
}

TEST_CASE("kappa rejects times outside the horizon") {
  const TimeGrid grid(1.0, 4);
  CHECK_THROWS_AS(kappa(grid, -0.1), DomainError);
  CHECK_THROWS_AS(kappa(grid, 1.5), DomainError);
  CHECK_THROWS_AS(kappa(grid, std::nan("")), DomainError);
}

TEST_CASE("time grid covers ragged horizons") {
  const TimeGrid grid(1.1, 4);
  CHECK(grid.num_steps() == 5);
  CHECK(grid.point(5) == 1.1);
  CHECK(grid.step_size(0) == 0.25);
  CHECK(grid.step_size(4) == doctest::Approx(0.1));
  const TimeGrid exact(3.0, 4);
  CHECK(exact.num_steps() == 12);
  CHECK(exact.step_size(11) == 0.25);
  CHECK_THROWS_AS(TimeGrid(0.0, 4), DomainError);
  CHECK_THROWS_AS(TimeGrid(1.0, 0), DomainError);
}

TEST_CASE("tame_drift examples") {
  const double b1[] = {100.0};
  CHECK(tame_drift(b1, 4, 0.5)[0] == doctest::Approx(100.0 / 51.0).epsilon(1e-15));
  const double b2[] = {-8.0};
  CHECK(tame_drift(b2, 1, 0.5)[0] == doctest::Approx(-8.0 / 9.0).epsilon(1e-15));
  const double b3[] = {0.0, 0.0};
  CHECK(tame_drift(b3, 17, 0.3) == State{0.0, 0.0});
}

TEST_CASE("tame_drift errors") {
  const double ok[] = {1.0};
  CHECK_THROWS_AS(tame_drift(ok, 4, 0.0), DomainError);
  CHECK_THROWS_AS(tame_drift(ok, 4, 0.51), DomainError);
  CHECK_THROWS_AS(tame_drift(ok, 0, 0.5), DomainError);
  const double bad[] = {std::numeric_limits<double>::infinity()};
  CHECK_THROWS_AS(tame_drift(bad, 4, 0.5), NumericError);
}

namespace {

struct TameSample {
  State b;
  std::uint64_t n;
  double alpha;
};

TameSample random_case(std::mt19937_64& gen) {
  std::uniform_int_distribution<int> dim(1, 8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  TameSample s;
  s.b.resize(dim(gen));
  std::normal_distribution<double> g;
  for (double& v : s.b) v = g(gen);
  const double target = std::pow(10.0, -8.0 + 16.0 * u(gen));
  const double norm = euclidean_norm(s.b);
  for (double& v : s.b) v *= target / norm;
  s.n = 1 + static_cast<std::uint64_t>(std::floor(std::pow(10.0, 6.0 * u(gen))));
  if (s.n > 1000000) s.n = 1000000;
  s.alpha = 0.5 * (1.0 - u(gen));  // (0, 0.5]
  return s;
}

}  // namespace

TEST_CASE("tame_drift bound, direction and limit properties") {
  std::mt19937_64 gen(11);
  for (int i = 0; i < 20000; ++i) {
    const TameSample s = random_case(gen);
    const State out = tame_drift(s.b, s.n, s.alpha);
    const double bn = euclidean_norm(out);
    const double cap = std::min(std::pow(static_cast<double>(s.n), s.alpha), euclidean_norm(s.b));
    REQUIRE(bn <= cap + 4.0 * (std::nextafter(cap, INFINITY) - cap));
    const double ratio = 1.0 / (1.0 + tame_scale(s.n, s.alpha) * euclidean_norm(s.b));
    for (std::size_t j = 0; j < s.b.size(); ++j) {
      REQUIRE(std::signbit(out[j]) == std::signbit(s.b[j]));
      REQUIRE(out[j] == doctest::Approx(ratio * s.b[j]).epsilon(1e-13));
    }
  }
}

TEST_CASE("tamed drift approaches b as n grows and is monotone in n") {
  const double b[] = {3.0, -4.0};
  double previous = 0.0;
  for (std::uint64_t n = 1; n <= (1ull << 40); n *= 4) {
    const double norm = euclidean_norm(tame_drift(b, n, 0.5));
    CHECK(norm >= previous);
    previous = norm;
  }
  CHECK(previous == doctest::Approx(5.0).epsilon(1e-5));
}

TEST_CASE("checked coefficient evaluation") {
  const SdeModel cubic = models::make_cubic(1.0, 1.0, 1.0, 2.0);
  const double x2[] = {2.0};
  CHECK(eval_drift(cubic, 0.0, x2)[0] == -6.0);
  const double x0[] = {0.0};
  CHECK(eval_drift(cubic, 0.3, x0)[0] == 0.0);
  const SdeModel gbm = models::make_gbm(0.05, 0.2, 1.0);
  const Matrix s = eval_diffusion(gbm, 0.0, x0);
  CHECK(s.rows == 1);
  CHECK(s.cols == 1);
  CHECK(s(0, 0) == 0.0);
  const double huge[] = {1e300};
  CHECK_THROWS_AS(eval_drift(cubic, 0.0, huge), NumericError);
  const double wrong[] = {1.0, 2.0};
  CHECK_THROWS_AS(eval_drift(cubic, 0.0, wrong), DomainError);
}

TEST_CASE("model validation") {
  SdeModel model = models::make_zero();
  CHECK_NOTHROW(model.validate());
  model.dim_noise = 0;
  CHECK_THROWS_AS(model.validate(), DomainError);
  SdeModel bad = models::make_cubic(1.0, 1.0, 1.0, 2.0);
  bad.assumptions.one_sided_L.reset();
  CHECK_THROWS_AS(bad.validate(), DomainError);
}
