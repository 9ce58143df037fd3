#include "tamed/models.hpp"

#include <algorithm>
#include <cmath>

namespace tamed::models {

namespace {

SdeModel scalar_polynomial_model(std::string name, const kernels::PolynomialCoeffs& c, double x0) {
  SdeModel model;
  model.name = std::move(name);
  model.dim_state = 1;
  model.dim_noise = 1;
  model.drift = [c](double, std::span<const double> x, std::span<double> out) { out[0] = kernels::poly_drift(c, x[0]); };
  model.diffusion = [c](double, std::span<const double> x, std::span<double> out) {
    out[0] = kernels::poly_diffusion(c, x[0]);
  };
  model.initial_value = State{x0};
  model.polynomial_form = c;
  return model;
}

void require(bool ok, const char* what) {
  if (!ok) throw DomainError(what);
}

}  // namespace

SdeModel make_gbm(double mu, double xi, double x0) {
  require(std::isfinite(mu) && std::isfinite(xi), "gbm: parameters must be finite");
  require(x0 > 0.0 && std::isfinite(x0), "gbm: x0 must be positive");
  kernels::PolynomialCoeffs c;
  c.drift_linear = mu;
  c.diffusion_linear = xi;
  SdeModel model = scalar_polynomial_model("gbm", c, x0);
  model.exact_solution = [mu, xi, x0](double t, std::span<const double> w) {
    return State{x0 * std::exp((mu - 0.5 * xi * xi) * t + xi * w[0])};
  };
  auto& a = model.assumptions;
  a.coercivity_K = 2.0 * std::fabs(mu) + xi * xi;
  a.one_sided_L = std::max(std::fabs(mu), xi * xi);
  a.poly_degree_l = 0.0;
  a.a1 = a.a2 = a.a3 = a.a5 = true;
  return model;
}

SdeModel make_cubic(double a, double lam, double c, double x0) {
  require(std::isfinite(a) && std::isfinite(x0), "cubic: parameters must be finite");
  require(lam > 0.0 && std::isfinite(lam), "cubic: lam must be positive");
  require(c >= 0.0 && std::isfinite(c), "cubic: c must be nonnegative");
  kernels::PolynomialCoeffs coeffs;
  coeffs.drift_linear = a;
  coeffs.drift_cubic = -lam;
  coeffs.diffusion_const = c;
  SdeModel model = scalar_polynomial_model("cubic-additive", coeffs, x0);
  auto& m = model.assumptions;
  m.coercivity_K = std::max(2.0 * std::fabs(a), c * c);
  m.one_sided_L = std::fabs(a) + 1.5 * lam;
  m.poly_degree_l = 2.0;
  m.a1 = m.a2 = m.a3 = m.a5 = true;
  return model;
}

SdeModel make_cubic_multiplicative(double a, double lam, double xi, double x0) {
  require(std::isfinite(a) && std::isfinite(xi) && std::isfinite(x0), "cubic-multiplicative: parameters must be finite");
  require(lam > 0.0 && std::isfinite(lam), "cubic-multiplicative: lam must be positive");
  kernels::PolynomialCoeffs coeffs;
  coeffs.drift_linear = a;
  coeffs.drift_cubic = -lam;
  coeffs.diffusion_linear = xi;
  SdeModel model = scalar_polynomial_model("cubic-multiplicative", coeffs, x0);
  auto& m = model.assumptions;
  m.coercivity_K = std::max(2.0 * std::fabs(a), xi * xi);
  m.one_sided_L = std::max(std::fabs(a) + 1.5 * lam, xi * xi);
  m.poly_degree_l = 2.0;
  m.a1 = m.a2 = m.a3 = m.a5 = true;
  return model;
}

SdeModel make_cubic_3d(double a, double lam, double c, double x0) {
  require(std::isfinite(a) && std::isfinite(x0), "cubic-3d: parameters must be finite");
  require(lam > 0.0 && std::isfinite(lam), "cubic-3d: lam must be positive");
  require(c >= 0.0 && std::isfinite(c), "cubic-3d: c must be nonnegative");
  kernels::PolynomialCoeffs coeffs;
  coeffs.drift_linear = a;
  coeffs.drift_cubic = -lam;
  SdeModel model;
  model.name = "cubic-3d";
  model.dim_state = 3;
  model.dim_noise = 3;
  model.drift = [coeffs](double, std::span<const double> x, std::span<double> out) {
    for (std::size_t i = 0; i < 3; ++i) out[i] = kernels::poly_drift(coeffs, x[i]);
  };
  model.diffusion = [c](double, std::span<const double>, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t i = 0; i < 3; ++i) out[i * 3 + i] = c;
  };
  model.initial_value = State{x0, x0, x0};
  auto& m = model.assumptions;
  m.coercivity_K = std::max(2.0 * std::fabs(a), 3.0 * c * c);
  m.one_sided_L = std::fabs(a) + 1.5 * lam;
  m.poly_degree_l = 2.0;
  m.a1 = m.a2 = m.a3 = m.a5 = true;
  return model;
}

SdeModel make_zero(double x0, std::size_t dim) {
  require(dim >= 1, "zero: dimension must be positive");
  SdeModel model;
  if (dim == 1) {
    model = scalar_polynomial_model("zero", kernels::PolynomialCoeffs{}, x0);
  } else {
    model.name = "zero";
    model.dim_state = dim;
    model.dim_noise = dim;
    model.drift = [](double, std::span<const double>, std::span<double> out) {
      std::fill(out.begin(), out.end(), 0.0);
    };
    model.diffusion = [](double, std::span<const double>, std::span<double> out) {
      std::fill(out.begin(), out.end(), 0.0);
    };
    model.initial_value = State(dim, x0);
  }
  model.exact_solution = [x0, dim](double, std::span<const double>) { return State(dim, x0); };
  auto& m = model.assumptions;
  m.coercivity_K = 0.0;
  m.one_sided_L = 0.0;
  m.poly_degree_l = 0.0;
  m.a1 = m.a2 = m.a3 = m.a5 = true;
  return model;
}

const std::vector<ModelEntry>& registry() {
  static const std::vector<ModelEntry> entries = {
      {"gbm", {{"mu", 0.05}, {"xi", 0.2}, {"x0", 1.0}}},
      {"cubic-additive", {{"a", 1.0}, {"lam", 1.0}, {"c", 1.0}, {"x0", 2.0}}},
      {"cubic-multiplicative", {{"a", 1.0}, {"lam", 1.0}, {"xi", 0.5}, {"x0", 2.0}}},
      {"zero", {{"x0", 0.0}}},
      {"cubic-3d", {{"a", 1.0}, {"lam", 1.0}, {"c", 1.0}, {"x0", 2.0}}},
  };
  return entries;
}

SdeModel make_model(const std::string& name, const ParameterMap& overrides) {
  const auto& entries = registry();
  const auto it = std::find_if(entries.begin(), entries.end(), [&](const ModelEntry& e) { return e.name == name; });
  if (it == entries.end()) throw DomainError("unknown model '" + name + "'");
  ParameterMap p = it->defaults;
  for (const auto& [key, value] : overrides) {
    if (!p.count(key)) throw DomainError("model '" + name + "' has no parameter '" + key + "'");
    p[key] = value;
  }
  if (name == "gbm") return make_gbm(p["mu"], p["xi"], p["x0"]);
  if (name == "cubic-additive") return make_cubic(p["a"], p["lam"], p["c"], p["x0"]);
  if (name == "cubic-multiplicative") return make_cubic_multiplicative(p["a"], p["lam"], p["xi"], p["x0"]);
  if (name == "zero") return make_zero(p["x0"]);
  return make_cubic_3d(p["a"], p["lam"], p["c"], p["x0"]);
}

}  // namespace tamed::models
