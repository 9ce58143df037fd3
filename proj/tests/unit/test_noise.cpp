#include <cmath>
#include <numeric>

#include "doctest.h"
#include "tamed/noise.hpp"
#include "tamed/sde_core.hpp"

using namespace tamed;

TEST_CASE("philox4x32-10 known answers") {
  using rng::philox4x32;
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) ==
        rng::Philox4x32Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
        rng::Philox4x32Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        rng::Philox4x32Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("inverse normal cdf") {
  CHECK(rng::normal_quantile(0.5) == 0.0);
  CHECK(rng::normal_quantile(0.975) == doctest::Approx(1.9599639845400536).epsilon(1e-14));
  CHECK(rng::normal_quantile(0.3) == doctest::Approx(-0.5244005127080407).epsilon(1e-14));
  CHECK(rng::normal_quantile(1e-10) == doctest::Approx(-6.361340902404056).epsilon(1e-14));
  CHECK(rng::normal_quantile(0.25) == -rng::normal_quantile(0.75));
}

TEST_CASE("uniforms stay inside the open interval") {
  CHECK(rng::uniform_open(0) > 0.0);
  CHECK(rng::uniform_open(~0ull) < 1.0);
  CHECK(std::isfinite(rng::normal_quantile(rng::uniform_open(~0ull))));
  CHECK(std::isfinite(rng::normal_quantile(rng::uniform_open(0))));
}

TEST_CASE("identical plans give bit-identical increments") {
  const NoisePlan plan{42, 7, 2, 64, 1.0};
  const IncrementArray a = generate_increments(plan);
  const IncrementArray b = generate_increments(plan);
  CHECK(a.increments == b.increments);
  CHECK(a.increments.size() == 128);
  const IncrementArray other = generate_increments({42, 8, 2, 64, 1.0});
  CHECK(other.increments != a.increments);
  const IncrementArray reseeded = generate_increments({43, 7, 2, 64, 1.0});
  CHECK(reseeded.increments != a.increments);
}

TEST_CASE("draws do not depend on the order they are requested in") {
  const rng::NormalStream stream(5, 9);
  std::vector<double> block(10);
  stream.fill(3, block);
  for (std::size_t i = 0; i < block.size(); ++i) CHECK(block[i] == stream.draw(3 + i));
}

TEST_CASE("increments have mean 0 and variance h") {
  const std::size_t M = 100000;
  const double h = 1.0 / 16.0;
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t pid = 0; pid < M / 16; ++pid) {
    const IncrementArray inc = generate_increments({3, pid, 1, 16, 1.0});
    for (double v : inc.increments) {
      sum += v;
      sum_sq += v * v;
    }
  }
  const double count = static_cast<double>(M);
  const double mean = sum / count;
  const double var = sum_sq / count - mean * mean;
  CHECK(std::fabs(mean) < 4.0 * std::sqrt(h / count));
  CHECK(std::fabs(var - h) < 5.0 * h * std::sqrt(2.0 / count));
}

TEST_CASE("aggregation sums nested blocks") {
  IncrementArray fine;
  fine.n = 4;
  fine.increments = {1.0, 2.0, 3.0, 4.0};
  fine.step_sizes = {0.25, 0.25, 0.25, 0.25};
  const IncrementArray coarse = aggregate_increments(fine, 2);
  CHECK(coarse.increments == std::vector<double>{3.0, 7.0});
  CHECK(coarse.step_sizes == std::vector<double>{0.5, 0.5});
  CHECK(aggregate_increments(fine, 4).increments == fine.increments);
  CHECK_THROWS_AS(aggregate_increments(fine, 3), DomainError);
  CHECK_THROWS_AS(aggregate_increments(fine, 8), DomainError);
}

TEST_CASE("aggregation is exactly associative across nested grids") {
  const IncrementArray fine = generate_increments({1, 2, 3, 1024, 1.0});
  const IncrementArray direct = aggregate_increments(fine, 16);
  const IncrementArray twice = aggregate_increments(aggregate_increments(fine, 128), 16);
  CHECK(direct.increments == twice.increments);
  const IncrementArray ragged = generate_increments({1, 2, 1, 64, 1.3});
  CHECK(aggregate_increments(ragged, 8).increments ==
        aggregate_increments(aggregate_increments(ragged, 32), 8).increments);
}

TEST_CASE("aggregated increments sum to the same Brownian endpoint") {
  const IncrementArray fine = generate_increments({9, 1, 1, 256, 1.0});
  const IncrementArray coarse = aggregate_increments(fine, 4);
  const double a = std::accumulate(fine.increments.begin(), fine.increments.end(), 0.0);
  const double b = std::accumulate(coarse.increments.begin(), coarse.increments.end(), 0.0);
  CHECK(a == doctest::Approx(b).epsilon(1e-12));
  const std::vector<double> w = brownian_path(fine);
  CHECK(w.size() == 257);
  CHECK(w.front() == 0.0);
  CHECK(w.back() == doctest::Approx(a).epsilon(1e-12));
}

TEST_CASE("degenerate plans are rejected") {
  CHECK_THROWS_AS(generate_increments({0, 0, 0, 4, 1.0}), DomainError);
  CHECK_THROWS_AS(generate_increments({0, 0, 1, 0, 1.0}), DomainError);
}
