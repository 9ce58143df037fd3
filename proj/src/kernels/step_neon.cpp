// AArch64 only; NEON is baseline there so no runtime probe is needed.

#include <arm_neon.h>

#include "tamed/kernels/kernels.hpp"

namespace tamed::kernels::detail {

void step_batch_neon(const PolynomialCoeffs& coeffs, const StepParams& params, double* x,
                     const double* dw, std::size_t lanes) {
  const float64x2_t zero = vdupq_n_f64(0.0);
  const float64x2_t one = vdupq_n_f64(1.0);
  const float64x2_t h = vdupq_n_f64(params.h);
  const float64x2_t scale = vdupq_n_f64(params.tame_scale);
  const float64x2_t lin = vdupq_n_f64(coeffs.drift_linear);
  const float64x2_t cub = vdupq_n_f64(coeffs.drift_cubic);
  const float64x2_t s0 = vdupq_n_f64(coeffs.diffusion_const);
  const float64x2_t s1 = vdupq_n_f64(coeffs.diffusion_linear);
  const bool has_lin = coeffs.drift_linear != 0.0;
  const bool has_cub = coeffs.drift_cubic != 0.0;
  const bool has_s0 = coeffs.diffusion_const != 0.0;
  const bool has_s1 = coeffs.diffusion_linear != 0.0;

  std::size_t i = 0;
  for (; i + 2 <= lanes; i += 2) {
    const float64x2_t xv = vld1q_f64(x + i);
    const uint64x2_t finite = vceqq_f64(vsubq_f64(xv, xv), zero);

    float64x2_t b = zero;
    if (has_lin) b = vmulq_f64(lin, xv);
    if (has_cub) b = vaddq_f64(b, vmulq_f64(cub, vmulq_f64(vmulq_f64(xv, xv), xv)));
    if (params.tamed) b = vdivq_f64(b, vaddq_f64(one, vmulq_f64(scale, vabsq_f64(b))));
    float64x2_t s = zero;
    if (has_s0) s = s0;
    if (has_s1) s = vaddq_f64(s, vmulq_f64(s1, xv));

    const float64x2_t dwv = vld1q_f64(dw + i);
    const float64x2_t next = vaddq_f64(vaddq_f64(xv, vmulq_f64(b, h)), vmulq_f64(s, dwv));
    vst1q_f64(x + i, vbslq_f64(finite, next, xv));
  }
  if (i < lanes) step_batch_scalar(coeffs, params, x + i, dw + i, lanes - i);
}

}  // namespace tamed::kernels::detail
