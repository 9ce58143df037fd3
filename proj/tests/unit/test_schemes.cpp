#include <cmath>
#include <cstring>

#include "doctest.h"
#include "tamed/models.hpp"
#include "tamed/schemes.hpp"

using namespace tamed;

namespace {

const SchemeSpec kExplicit = SchemeSpec::explicit_euler();
const SchemeSpec kTamed = SchemeSpec::tamed(0.5);

IncrementArray zero_noise(std::uint64_t n, double horizon, std::size_t m = 1) {
  IncrementArray noise = generate_increments({0, 0, m, n, horizon});
  std::fill(noise.increments.begin(), noise.increments.end(), 0.0);
  return noise;
}

}  // namespace

TEST_CASE("one step examples") {
  const SdeModel pure_cubic = models::make_cubic(0.0, 1.0, 0.0, 2.0);
  const double x[] = {2.0};
  const double dw0[] = {0.0};
  CHECK(step(kTamed, pure_cubic, 0.0, x, 1.0, dw0, 1).value[0] == doctest::Approx(10.0 / 9.0).epsilon(1e-15));
  CHECK(step(kExplicit, pure_cubic, 0.0, x, 1.0, dw0, 1).value[0] == -6.0);

  const SdeModel gbm = models::make_gbm(0.1, 0.2, 1.0);
  const double one[] = {1.0};
  const double dw[] = {0.3};
  CHECK(step(kExplicit, gbm, 0.0, one, 0.5, dw, 2).value[0] == doctest::Approx(1.11).epsilon(1e-15));

  const SdeModel zero = models::make_zero();
  const double any[] = {-3.25};
  CHECK(step(kTamed, zero, 0.4, any, 0.1, dw, 10).value[0] == -3.25);
}

TEST_CASE("step reports overflow instead of throwing") {
  const SdeModel cubic = models::make_cubic(1.0, 1.0, 1.0, 2.0);
  const double x[] = {1e120};
  const double dw[] = {0.0};
  const StepOutcome out = step(kExplicit, cubic, 0.0, x, 0.5, dw, 2);
  CHECK_FALSE(out.finite);
  CHECK(step(kTamed, cubic, 0.0, x, 0.5, dw, 2).finite == false);
}

TEST_CASE("step argument checks") {
  const SdeModel cubic = models::make_cubic(1.0, 1.0, 1.0, 2.0);
  const double x2[] = {1.0, 2.0};
  const double x[] = {1.0};
  const double dw[] = {0.0};
  const double dw2[] = {0.0, 0.0};
  CHECK_THROWS_AS(step(kTamed, cubic, 0.0, x2, 0.5, dw, 2), DomainError);
  CHECK_THROWS_AS(step(kTamed, cubic, 0.0, x, 0.5, dw2, 2), DomainError);
  CHECK_THROWS_AS(step(SchemeSpec::tamed(0.7), cubic, 0.0, x, 0.5, dw, 2), DomainError);
  CHECK_THROWS_AS(step({SchemeKind::TamedEuler, std::nullopt}, cubic, 0.0, x, 0.5, dw, 2), DomainError);
}

TEST_CASE("deterministic cubic recursion: explicit explodes, tamed stays bounded") {
  for (double a : {0.0, 1.0}) {
    CAPTURE(a);
    const SdeModel model = models::make_cubic(a, 1.0, 0.0, 5.0);
    const TimeGrid grid(3.0, 4);
    const IncrementArray noise = zero_noise(4, 3.0);
    const double x0[] = {5.0};
    const Trajectory ex = simulate(kExplicit, model, grid, noise, x0);
    const Trajectory ta = simulate(kTamed, model, grid, noise, x0);

    // Brute-force oracle.
    double x = 5.0, y = 5.0;
    bool exceeded = false;
    for (std::size_t k = 1; k <= grid.num_steps(); ++k) {
      x = x + (a * x - x * x * x) * 0.25;
      const double b = a * y - y * y * y;
      y = y + b / (1.0 + 0.5 * std::fabs(b)) * 0.25;
      if (std::isfinite(x)) {
        CHECK(ex.at(k)[0] == doctest::Approx(x).epsilon(1e-12));
        CHECK(ex.finite[k] == 1);
      } else {
        CHECK(ex.finite[k] == 0);
      }
      CHECK(ta.at(k)[0] == doctest::Approx(y).epsilon(1e-12));
      CHECK(std::fabs(ta.at(k)[0]) < 6.0);
      if (k <= 10 && std::fabs(x) > 1e10) exceeded = true;
    }
    CHECK(exceeded);
    CHECK(ex.diverged());
    CHECK_FALSE(ta.diverged());
  }
}

TEST_CASE("a diverged trajectory is frozen and stays flagged") {
  const SdeModel model = models::make_cubic(1.0, 1.0, 0.0, 5.0);
  const TimeGrid grid(5.0, 4);
  const double x0[] = {5.0};
  const Trajectory ex = simulate(kExplicit, model, grid, zero_noise(4, 5.0), x0);
  REQUIRE(ex.blowup_index.has_value());
  const std::size_t b = *ex.blowup_index;
  for (std::size_t k = 0; k < grid.num_points(); ++k) CHECK(ex.finite[k] == (k < b ? 1 : 0));
  for (std::size_t k = b + 1; k < grid.num_points(); ++k) {
    CHECK(std::memcmp(ex.at(k).data(), ex.at(b).data(), sizeof(double)) == 0);
  }
}

TEST_CASE("zero model gives a constant trajectory") {
  const SdeModel zero = models::make_zero(1.5);
  const TimeGrid grid(1.0, 16);
  const IncrementArray noise = generate_increments({1, 1, 1, 16, 1.0});
  const double x0[] = {1.5};
  const Trajectory traj = simulate(kTamed, zero, grid, noise, x0);
  for (std::size_t k = 0; k < grid.num_points(); ++k) CHECK(traj.at(k)[0] == 1.5);
}

TEST_CASE("simulate rejects mismatched noise") {
  const SdeModel cubic = models::make_cubic(1.0, 1.0, 1.0, 2.0);
  const double x0[] = {2.0};
  CHECK_THROWS_AS(simulate(kTamed, cubic, TimeGrid(1.0, 8), zero_noise(16, 1.0), x0), DomainError);
  CHECK_THROWS_AS(simulate(kTamed, cubic, TimeGrid(1.0, 8), zero_noise(8, 1.0, 2), x0), DomainError);
}

TEST_CASE("interpolation between grid points") {
  const SdeModel cubic = models::make_cubic(1.0, 1.0, 1.0, 2.0);
  const TimeGrid grid(1.0, 8);
  const IncrementArray fine = generate_increments({77, 3, 1, 64, 1.0});
  const double x0[] = {2.0};
  const Trajectory traj = simulate(kTamed, cubic, grid, aggregate_increments(fine, 8), x0);

  for (std::size_t k = 0; k < grid.num_points(); ++k) {
    CHECK(interpolate(kTamed, cubic, grid, fine, traj, grid.point(k))[0] == traj.at(k)[0]);
  }
  // Frozen coefficients at the left grid point, noise summed directly.
  for (std::size_t j = 0; j < 64; ++j) {
    const std::size_t k = j / 8;
    const double xk = traj.at(k)[0];
    const double b = xk - xk * xk * xk;
    double w = 0.0;
    for (std::size_t f = k * 8; f < j; ++f) w += fine.increments[f];
    const double dt = static_cast<double>(j) / 64.0 - static_cast<double>(k) / 8.0;
    const double expected = xk + b / (1.0 + std::fabs(b) / std::sqrt(8.0)) * dt + w;
    CHECK(interpolate(kTamed, cubic, grid, fine, traj, static_cast<double>(j) / 64.0)[0] ==
          doctest::Approx(expected).epsilon(1e-12));
  }
  CHECK_THROWS_AS(interpolate(kTamed, cubic, grid, fine, traj, 0.01), DomainError);

  const SdeModel zero = models::make_zero(0.7);
  const Trajectory flat = simulate(kTamed, zero, grid, aggregate_increments(fine, 8), std::vector<double>{0.7});
  CHECK(interpolate(kTamed, zero, grid, fine, flat, 0.25 + 1.0 / 64.0)[0] == 0.7);
}

TEST_CASE("batched route matches per-path simulation bit for bit") {
  for (const SdeModel& model : {models::make_cubic(1.0, 1.0, 1.0, 2.0), models::make_gbm(0.05, 0.2, 1.0),
                                models::make_cubic_multiplicative(1.0, 1.0, 0.5, 2.0)}) {
    for (const SchemeSpec& scheme : {kExplicit, kTamed, SchemeSpec::tamed(0.25)}) {
      const TimeGrid grid(1.0, 32);
      const std::size_t lanes = 13;
      std::vector<IncrementArray> noise;
      std::vector<double> dw(grid.num_steps() * lanes), x0(lanes);
      for (std::size_t lane = 0; lane < lanes; ++lane) {
        noise.push_back(generate_increments({5, lane, 1, 32, 1.0}));
        for (std::size_t k = 0; k < grid.num_steps(); ++k) dw[k * lanes + lane] = noise.back().increments[k];
        x0[lane] = model.initial_state(5, lane)[0] + 0.1 * static_cast<double>(lane);
      }
      for (kernels::Isa isa : kernels::available_isas()) {
        const std::vector<double> batch = simulate_batch(scheme, *model.polynomial_form, grid, dw, x0, isa);
        for (std::size_t lane = 0; lane < lanes; ++lane) {
          const double start[] = {x0[lane]};
          const Trajectory traj = simulate(scheme, model, grid, noise[lane], start);
          for (std::size_t k = 0; k < grid.num_points(); ++k) {
            REQUIRE(std::memcmp(&batch[k * lanes + lane], traj.at(k).data(), sizeof(double)) == 0);
          }
        }
      }
    }
  }
}

TEST_CASE("taming vanishes for Lipschitz drift as n grows") {
  const SdeModel gbm = models::make_gbm(0.5, 0.3, 1.0);
  const IncrementArray fine = generate_increments({4, 0, 1, 4096, 1.0});
  double previous = INFINITY, first = 0.0;
  for (std::uint64_t n : {16u, 256u, 4096u}) {
    const TimeGrid grid(1.0, n);
    const IncrementArray noise = aggregate_increments(fine, n);
    const double x0[] = {1.0};
    const Trajectory a = simulate(kExplicit, gbm, grid, noise, x0);
    const Trajectory b = simulate(kTamed, gbm, grid, noise, x0);
    double worst = 0.0;
    for (std::size_t k = 0; k < grid.num_points(); ++k) worst = std::max(worst, std::fabs(a.at(k)[0] - b.at(k)[0]));
    CHECK(worst < previous);
    if (n == 16) first = worst;
    previous = worst;
  }
  CHECK(previous < first / 10.0);
}
