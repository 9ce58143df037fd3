// Compiled with -mavx2 only (no -mfma); selected at runtime.

#include <immintrin.h>

#include "tamed/kernels/kernels.hpp"

namespace tamed::kernels::detail {

void step_batch_avx2(const PolynomialCoeffs& coeffs, const StepParams& params, double* x,
                     const double* dw, std::size_t lanes) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  const __m256d h = _mm256_set1_pd(params.h);
  const __m256d scale = _mm256_set1_pd(params.tame_scale);
  const __m256d lin = _mm256_set1_pd(coeffs.drift_linear);
  const __m256d cub = _mm256_set1_pd(coeffs.drift_cubic);
  const __m256d s0 = _mm256_set1_pd(coeffs.diffusion_const);
  const __m256d s1 = _mm256_set1_pd(coeffs.diffusion_linear);
  const bool has_lin = coeffs.drift_linear != 0.0;
  const bool has_cub = coeffs.drift_cubic != 0.0;
  const bool has_s0 = coeffs.diffusion_const != 0.0;
  const bool has_s1 = coeffs.diffusion_linear != 0.0;

  std::size_t i = 0;
  for (; i + 4 <= lanes; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x + i);
    // x - x is 0 exactly when x is finite
    const __m256d finite = _mm256_cmp_pd(_mm256_sub_pd(xv, xv), zero, _CMP_EQ_OQ);

    __m256d b = zero;
    if (has_lin) b = _mm256_mul_pd(lin, xv);
    if (has_cub) b = _mm256_add_pd(b, _mm256_mul_pd(cub, _mm256_mul_pd(_mm256_mul_pd(xv, xv), xv)));
    if (params.tamed) {
      const __m256d abs_b = _mm256_andnot_pd(sign_mask, b);
      b = _mm256_div_pd(b, _mm256_add_pd(one, _mm256_mul_pd(scale, abs_b)));
    }
    __m256d s = zero;
    if (has_s0) s = s0;
    if (has_s1) s = _mm256_add_pd(s, _mm256_mul_pd(s1, xv));

    const __m256d dwv = _mm256_loadu_pd(dw + i);
    const __m256d next = _mm256_add_pd(_mm256_add_pd(xv, _mm256_mul_pd(b, h)), _mm256_mul_pd(s, dwv));
    _mm256_storeu_pd(x + i, _mm256_blendv_pd(xv, next, finite));
  }
  if (i < lanes) step_batch_scalar(coeffs, params, x + i, dw + i, lanes - i);
}

}  // namespace tamed::kernels::detail
