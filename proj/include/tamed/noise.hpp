#pragma once

// Reproducible Brownian increments.
//
// Increments for a Monte Carlo path are a pure function of
// (master_seed, path_id): the generator is Philox4x32-10 keyed by
// master_seed ^ splitmix64(path_id) with the path id in the upper counter
// words, and standard normals come from Wichura's AS241 inverse normal CDF
// applied to 53-bit uniforms in (0, 1). Changing any of these breaks the
// golden values in the tests.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace tamed {

namespace rng {

using Philox4x32Counter = std::array<std::uint32_t, 4>;
using Philox4x32Key = std::array<std::uint32_t, 2>;

/// Ten-round Philox4x32 bijection.
Philox4x32Counter philox4x32(Philox4x32Counter counter, Philox4x32Key key);

std::uint64_t splitmix64(std::uint64_t x);

/// Maps 53 random bits to the open interval (0, 1).
double uniform_open(std::uint64_t bits);

/// Inverse of the standard normal CDF (AS241, ~1e-16 relative accuracy).
double normal_quantile(double p);

/// Counter-based standard normal stream for one path. Draw g is a pure
/// function of (master_seed, path_id, g).
class NormalStream {
 public:
  NormalStream(std::uint64_t master_seed, std::uint64_t path_id);

  double draw(std::uint64_t index) const;

  /// Fills out[i] with draw(first + i).
  void fill(std::uint64_t first, std::span<double> out) const;

 private:
  Philox4x32Key key_;
  std::uint32_t path_lo_;
  std::uint32_t path_hi_;
};

}  // namespace rng

struct NoisePlan {
  std::uint64_t master_seed = 0;
  std::uint64_t path_id = 0;
  std::size_t dim_noise = 1;
  std::uint64_t fine_n = 1;
  double horizon = 1.0;
};

/// Row-major (num_steps x m) array of Wiener increments over a uniform grid.
struct IncrementArray {
  std::uint64_t n = 1;  // steps per unit time
  std::size_t dim_noise = 1;
  double horizon = 1.0;
  std::vector<double> increments;
  std::vector<double> step_sizes;

  std::size_t num_steps() const { return step_sizes.size(); }
  std::span<const double> step(std::size_t k) const {
    return {increments.data() + k * dim_noise, dim_noise};
  }
};

/// Entry (k, j) = sqrt(h_k) * Z_{k m + j}.
IncrementArray generate_increments(const NoisePlan& plan);

/// Sums consecutive fine increments into the coarse grid with coarse_n
/// steps per unit time. Each coarse increment is accumulated left to right
/// starting from its first fine increment.
IncrementArray aggregate_increments(const IncrementArray& fine, std::uint64_t coarse_n);

/// W(t_k) for every fine grid point (k = 0..num_steps), accumulated left to
/// right. Row-major ((num_steps + 1) x m).
std::vector<double> brownian_path(const IncrementArray& noise);

}  // namespace tamed
