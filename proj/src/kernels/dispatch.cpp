#include <stdexcept>

#include "tamed/kernels/kernels.hpp"

namespace tamed::kernels {

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
    case Isa::Neon:
      return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(TAMED_HAVE_AVX2_KERNEL)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(TAMED_HAVE_NEON_KERNEL)
      return true;
#else
      return false;
#endif
  }
  return false;
}

std::vector<Isa> available_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon}) {
    if (isa_available(isa)) out.push_back(isa);
  }
  return out;
}

Isa best_isa() {
  static const Isa best = [] {
    if (isa_available(Isa::Avx2)) return Isa::Avx2;
    if (isa_available(Isa::Neon)) return Isa::Neon;
    return Isa::Scalar;
  }();
  return best;
}

void step_batch(Isa isa, const PolynomialCoeffs& coeffs, const StepParams& params,
                std::span<double> x, std::span<const double> dw) {
  if (dw.size() < x.size()) throw std::invalid_argument("step_batch: fewer increments than lanes");
  switch (isa) {
#if defined(TAMED_HAVE_AVX2_KERNEL)
    case Isa::Avx2:
      if (isa_available(Isa::Avx2)) {
        detail::step_batch_avx2(coeffs, params, x.data(), dw.data(), x.size());
        return;
      }
      break;
#endif
#if defined(TAMED_HAVE_NEON_KERNEL)
    case Isa::Neon:
      detail::step_batch_neon(coeffs, params, x.data(), dw.data(), x.size());
      return;
#endif
    default:
      break;
  }
  detail::step_batch_scalar(coeffs, params, x.data(), dw.data(), x.size());
}

}  // namespace tamed::kernels
