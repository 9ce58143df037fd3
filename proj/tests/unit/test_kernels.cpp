#include <cmath>
#include <cstring>
#include <limits>
#include <random>

#include "doctest.h"
#include "tamed/kernels/kernels.hpp"

using namespace tamed::kernels;

namespace {

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("scalar kernel follows the step formula") {
  const PolynomialCoeffs cubic{1.0, -1.0, 1.0, 0.0};
  std::vector<double> x{2.0, 0.0};
  const std::vector<double> dw{0.1, -0.2};
  step_batch(Isa::Scalar, cubic, {0.25, false, 0.0}, x, dw);
  CHECK(x[0] == doctest::Approx(2.0 - 6.0 * 0.25 + 0.1));
  CHECK(x[1] == doctest::Approx(-0.2));
  std::vector<double> y{2.0};
  const std::vector<double> zero{0.0};
  step_batch(Isa::Scalar, cubic, {0.25, true, 0.5}, y, zero);
  CHECK(y[0] == doctest::Approx(2.0 - 6.0 / 4.0 * 0.25));
}

TEST_CASE("non-finite lanes are left untouched") {
  const PolynomialCoeffs cubic{1.0, -1.0, 1.0, 0.0};
  std::vector<double> x{std::numeric_limits<double>::infinity(), std::nan("")};
  const std::vector<double> dw{1.0, 1.0};
  step_batch(Isa::Scalar, cubic, {0.1, false, 0.0}, x, dw);
  CHECK(std::isinf(x[0]));
  CHECK(std::isnan(x[1]));
}

TEST_CASE("SIMD kernels are bit-identical to the scalar reference") {
  std::mt19937_64 gen(123);
  std::normal_distribution<double> g;
  const PolynomialCoeffs models[] = {{1.0, -1.0, 1.0, 0.0}, {0.05, 0.0, 0.0, 0.2}, {1.0, -1.0, 0.0, 0.5}, {}};
  for (Isa isa : available_isas()) {
    CAPTURE(isa_name(isa));
    for (const auto& coeffs : models) {
      for (std::size_t lanes : {1u, 3u, 4u, 5u, 8u, 63u, 64u}) {
        std::vector<double> x(lanes), dw(lanes);
        for (auto& v : x) v = 3.0 * g(gen);
        if (lanes > 2) {
          x[1] = std::numeric_limits<double>::infinity();
          x[2] = 1e200;  // overflows on the first step
        }
        std::vector<double> ref = x;
        for (bool tamed : {false, true}) {
          const StepParams params{1.0 / 16.0, tamed, 0.25};
          for (int k = 0; k < 40; ++k) {
            for (auto& v : dw) v = 0.25 * g(gen);
            step_batch(Isa::Scalar, coeffs, params, ref, dw);
            step_batch(isa, coeffs, params, x, dw);
            REQUIRE(same_bits(ref, x));
          }
        }
      }
    }
  }
}

TEST_CASE("dispatch reports what it can run") {
  CHECK(isa_available(Isa::Scalar));
  CHECK(isa_available(best_isa()));
  CHECK(isa_name(Isa::Scalar) == "scalar");
  CHECK(available_isas().front() == Isa::Scalar);
}
