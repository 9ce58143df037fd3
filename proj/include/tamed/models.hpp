#pragma once

// Shipped model zoo. All models are autonomous; the scalar ones expose a
// polynomial form so the estimators can use the batched kernels.

#include <map>
#include <string>
#include <vector>

#include "tamed/sde_core.hpp"

namespace tamed::models {

/// dX = mu X dt + xi X dW, with closed form x0 exp((mu - xi^2/2) t + xi W(t)).
SdeModel make_gbm(double mu, double xi, double x0);

/// Ginzburg-Landau type drift a x - lam x^3 with additive noise c.
SdeModel make_cubic(double a, double lam, double c, double x0);

/// Same drift with multiplicative noise xi x.
SdeModel make_cubic_multiplicative(double a, double lam, double xi, double x0);

/// Three uncoupled copies of make_cubic (d = m = 3, diagonal noise).
SdeModel make_cubic_3d(double a, double lam, double c, double x0);

/// b = 0, sigma = 0.
SdeModel make_zero(double x0 = 0.0, std::size_t dim = 1);

using ParameterMap = std::map<std::string, double>;

struct ModelEntry {
  std::string name;
  ParameterMap defaults;
};

/// Registered CLI names with their default parameters.
const std::vector<ModelEntry>& registry();

/// Builds a registered model, overriding defaults with `overrides`.
/// Throws DomainError for unknown names or parameters.
SdeModel make_model(const std::string& name, const ParameterMap& overrides = {});

}  // namespace tamed::models
