#include <cmath>

#include "tamed/kernels/kernels.hpp"

namespace tamed::kernels::detail {

void step_batch_scalar(const PolynomialCoeffs& coeffs, const StepParams& params, double* x,
                       const double* dw, std::size_t lanes) {
  for (std::size_t i = 0; i < lanes; ++i) {
    const double xi = x[i];
    if (!std::isfinite(xi)) continue;
    double b = poly_drift(coeffs, xi);
    if (params.tamed) b = b / (1.0 + params.tame_scale * std::fabs(b));
    const double s = poly_diffusion(coeffs, xi);
    x[i] = (xi + b * params.h) + s * dw[i];
  }
}

}  // namespace tamed::kernels::detail
