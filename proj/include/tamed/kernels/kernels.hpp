#pragma once

// Batched one-step kernels for scalar (d = m = 1) models whose coefficients
// are low-degree polynomials. Each lane is an independent Monte Carlo path.
//
// Every ISA variant performs the same IEEE operations in the same order
// (no fused multiply-add), so all variants produce bit-identical results.
// The scalar variant is the reference.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace tamed::kernels {

/// b(x) = drift_linear * x + drift_cubic * x^3
/// sigma(x) = diffusion_const + diffusion_linear * x
/// Zero coefficients drop their term entirely (so 0 * inf never appears).
struct PolynomialCoeffs {
  double drift_linear = 0.0;
  double drift_cubic = 0.0;
  double diffusion_const = 0.0;
  double diffusion_linear = 0.0;
};

/// Reference evaluation order shared by every kernel and by the models'
/// callbacks.
inline double poly_drift(const PolynomialCoeffs& c, double x) {
  double b = 0.0;
  if (c.drift_linear != 0.0) b = c.drift_linear * x;
  if (c.drift_cubic != 0.0) b = b + c.drift_cubic * ((x * x) * x);
  return b;
}

inline double poly_diffusion(const PolynomialCoeffs& c, double x) {
  double s = 0.0;
  if (c.diffusion_const != 0.0) s = c.diffusion_const;
  if (c.diffusion_linear != 0.0) s = s + c.diffusion_linear * x;
  return s;
}

struct StepParams {
  double h = 0.0;
  bool tamed = false;
  double tame_scale = 0.0;  // n^{-alpha}
};

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa);

/// Whether the variant is compiled in and the running CPU supports it.
bool isa_available(Isa isa);

/// Variants usable on this machine, scalar first.
std::vector<Isa> available_isas();

/// Widest available variant.
Isa best_isa();

/// x[i] <- x[i] + drift(x[i]) h + sigma(x[i]) dw[i] for each lane whose x[i]
/// is finite; non-finite lanes are left untouched. With params.tamed the
/// drift is replaced by b / (1 + tame_scale |b|).
void step_batch(Isa isa, const PolynomialCoeffs& coeffs, const StepParams& params,
                std::span<double> x, std::span<const double> dw);

namespace detail {
void step_batch_scalar(const PolynomialCoeffs&, const StepParams&, double* x, const double* dw,
                       std::size_t lanes);
#if defined(TAMED_HAVE_AVX2_KERNEL)
void step_batch_avx2(const PolynomialCoeffs&, const StepParams&, double* x, const double* dw,
                     std::size_t lanes);
#endif
#if defined(TAMED_HAVE_NEON_KERNEL)
void step_batch_neon(const PolynomialCoeffs&, const StepParams&, double* x, const double* dw,
                     std::size_t lanes);
#endif
}  // namespace detail

}  // namespace tamed::kernels
