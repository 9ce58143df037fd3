#include "tamed/noise.hpp"

#include <cmath>

#include "tamed/sde_core.hpp"

namespace tamed {

namespace rng {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

double horner(const double (&c)[8], double x) {
  double r = c[7];
  for (int i = 6; i >= 0; --i) r = r * x + c[i];
  return r;
}

// Wichura (1988), algorithm AS241 PPND16.
constexpr double kA[8] = {3.3871328727963666080e0, 1.3314166789178437745e+2, 1.9715909503065514427e+3,
                          1.3731693765509461125e+4, 4.5921953931549871457e+4, 6.7265770927008700853e+4,
                          3.3430575583588128105e+4, 2.5090809287301226727e+3};
constexpr double kB[8] = {1.0,
                          4.2313330701600911252e+1,
                          6.8718700749205790830e+2,
                          5.3941960214247511077e+3,
                          2.1213794301586595867e+4,
                          3.9307895800092710610e+4,
                          2.8729085735721942674e+4,
                          5.2264952788528545610e+3};
constexpr double kC[8] = {1.42343711074968357734e0, 4.63033784615654529590e0, 5.76949722146069140550e0,
                          3.64784832476320460504e0, 1.27045825245236838258e0, 2.41780725177450611770e-1,
                          2.27238449892691845833e-2, 7.74545014278341407640e-4};
constexpr double kD[8] = {1.0,
                          2.05319162663775882187e0,
                          1.67638483018380384940e0,
                          6.89767334985100004550e-1,
                          1.48103976427480074590e-1,
                          1.51986665636164571966e-2,
                          5.47593808499534494600e-4,
                          1.05075007164441684324e-9};
constexpr double kE[8] = {6.65790464350110377720e0, 5.46378491116411436990e0, 1.78482653991729133580e0,
                          2.96560571828504891230e-1, 2.65321895265761230930e-2, 1.24266094738807843860e-3,
                          2.71155556874348757815e-5, 2.01033439929228813265e-7};
constexpr double kF[8] = {1.0,
                          5.99832206555887937690e-1,
                          1.36929880922735805310e-1,
                          1.48753612908506148525e-2,
                          7.86869131145613259100e-4,
                          1.84631831751005468180e-5,
                          1.42151175831644588870e-7,
                          2.04426310338993978564e-15};

}  // namespace

Philox4x32Counter philox4x32(Philox4x32Counter c, Philox4x32Key k) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, c[0], hi0, lo0);
    mulhilo(kPhiloxM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kPhiloxW0;
    k[1] += kPhiloxW1;
  }
  return c;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

double uniform_open(std::uint64_t bits) {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

double normal_quantile(double p) {
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q * horner(kA, r) / horner(kB, r);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  if (r <= 0.0) return q < 0.0 ? -HUGE_VAL : HUGE_VAL;
  r = std::sqrt(-std::log(r));
  double v;
  if (r <= 5.0) {
    r -= 1.6;
    v = horner(kC, r) / horner(kD, r);
  } else {
    r -= 5.0;
    v = horner(kE, r) / horner(kF, r);
  }
  return q < 0.0 ? -v : v;
}

NormalStream::NormalStream(std::uint64_t master_seed, std::uint64_t path_id)
    : path_lo_(static_cast<std::uint32_t>(path_id)), path_hi_(static_cast<std::uint32_t>(path_id >> 32)) {
  const std::uint64_t key = master_seed ^ splitmix64(path_id);
  key_ = {static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)};
}

namespace {

inline std::uint64_t half_bits(const Philox4x32Counter& w, unsigned half) {
  return (static_cast<std::uint64_t>(w[2 * half]) << 32) | w[2 * half + 1];
}

}  // namespace

double NormalStream::draw(std::uint64_t index) const {
  const std::uint64_t block = index >> 1;
  const auto w = philox4x32({static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32), path_lo_,
                             path_hi_},
                            key_);
  return normal_quantile(uniform_open(half_bits(w, static_cast<unsigned>(index & 1))));
}

void NormalStream::fill(std::uint64_t first, std::span<double> out) const {
  std::size_t i = 0;
  if (out.empty()) return;
  if (first & 1) {
    out[i++] = draw(first);
  }
  for (; i + 2 <= out.size(); i += 2) {
    const std::uint64_t block = (first + i) >> 1;
    const auto w = philox4x32({static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
                               path_lo_, path_hi_},
                              key_);
    out[i] = normal_quantile(uniform_open(half_bits(w, 0)));
    out[i + 1] = normal_quantile(uniform_open(half_bits(w, 1)));
  }
  if (i < out.size()) out[i] = draw(first + i);
}

}  // namespace rng

IncrementArray generate_increments(const NoisePlan& plan) {
  if (plan.dim_noise == 0) throw DomainError("generate_increments: dim_noise must be positive");
  if (plan.fine_n == 0) throw DomainError("generate_increments: fine_n must be positive");
  const TimeGrid grid(plan.horizon, plan.fine_n);

  IncrementArray out;
  out.n = plan.fine_n;
  out.dim_noise = plan.dim_noise;
  out.horizon = plan.horizon;
  out.step_sizes.resize(grid.num_steps());
  out.increments.resize(grid.num_steps() * plan.dim_noise);

  rng::NormalStream stream(plan.master_seed, plan.path_id);
  stream.fill(0, out.increments);
  for (std::size_t k = 0; k < grid.num_steps(); ++k) {
    const double h = grid.step_size(k);
    out.step_sizes[k] = h;
    const double root_h = std::sqrt(h);
    for (std::size_t j = 0; j < plan.dim_noise; ++j) out.increments[k * plan.dim_noise + j] *= root_h;
  }
  return out;
}

namespace {

// Sum of x[(begin + i) * stride] for i < width, restricted to indices below
// limit, as a balanced binary tree over the aligned power-of-two block.
// Nested power-of-two aggregations therefore reproduce direct aggregation
// bit for bit.
double tree_sum(const double* x, std::size_t stride, std::size_t begin, std::size_t width,
                std::size_t limit) {
  if (width == 1) return x[begin * stride];
  const std::size_t half = width / 2;
  const double left = tree_sum(x, stride, begin, half, limit);
  if (begin + half >= limit) return left;
  return left + tree_sum(x, stride, begin + half, half, limit);
}

}  // namespace

IncrementArray aggregate_increments(const IncrementArray& fine, std::uint64_t coarse_n) {
  if (coarse_n == 0 || fine.n % coarse_n != 0) {
    throw DomainError("aggregate_increments: coarse n " + std::to_string(coarse_n) + " does not divide fine n " +
                      std::to_string(fine.n));
  }
  const std::size_t ratio = fine.n / coarse_n;
  if ((ratio & (ratio - 1)) != 0) {
    throw DomainError("aggregate_increments: fine n / coarse n = " + std::to_string(ratio) +
                      " is not a power of two");
  }
  const TimeGrid coarse(fine.horizon, coarse_n);
  const std::size_t fine_steps = fine.num_steps();
  const std::size_t coarse_steps = coarse.num_steps();
  if ((coarse_steps - 1) * ratio >= fine_steps || coarse_steps * ratio < fine_steps) {
    throw DomainError("aggregate_increments: coarse grid is not nested in the fine grid");
  }
  if (ratio == 1) return fine;

  const std::size_t m = fine.dim_noise;
  IncrementArray out;
  out.n = coarse_n;
  out.dim_noise = m;
  out.horizon = fine.horizon;
  out.step_sizes.resize(coarse_steps);
  out.increments.resize(coarse_steps * m);
  for (std::size_t k = 0; k < coarse_steps; ++k) {
    out.step_sizes[k] = coarse.step_size(k);
    for (std::size_t j = 0; j < m; ++j) {
      out.increments[k * m + j] = tree_sum(fine.increments.data() + j, m, k * ratio, ratio, fine_steps);
    }
  }
  return out;
}

std::vector<double> brownian_path(const IncrementArray& noise) {
  const std::size_t m = noise.dim_noise;
  std::vector<double> w((noise.num_steps() + 1) * m, 0.0);
  for (std::size_t k = 0; k < noise.num_steps(); ++k) {
    for (std::size_t j = 0; j < m; ++j) w[(k + 1) * m + j] = w[k * m + j] + noise.increments[k * m + j];
  }
  return w;
}

}  // namespace tamed
