#pragma once

// Monte Carlo estimators: strong L^p error against a coupled reference,
// uniform moment bounds, one-step increment moments, log-log rate fits and
// falsification of declared assumption constants.
//
// Paths are grouped into fixed blocks of kPathBlock consecutive path ids.
// Sums run in path order inside a block and blocks are combined in block
// order, so every estimate is a function of (inputs, master_seed) only and
// does not depend on the executor or its worker count.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tamed/kernels/kernels.hpp"
#include "tamed/parallel.hpp"
#include "tamed/schemes.hpp"
#include "tamed/sde_core.hpp"

namespace tamed {

inline constexpr std::size_t kPathBlock = 64;

struct EstimatorContext {
  double horizon = 1.0;
  Executor* executor = nullptr;  // serial when null
  // Step scalar polynomial models through the batched kernels. The batched
  // and generic routes give bit-identical results.
  bool use_kernels = true;
  kernels::Isa isa = kernels::best_isa();
};

struct ErrorTable {
  std::vector<std::uint64_t> n_values;
  std::vector<double> errors;
  std::vector<double> std_errors;
  std::vector<double> nonfinite_fraction;
  double p = 2.0;
  std::size_t M = 0;
  std::string reference;  // "closed-form" | "tamed-at-fine_n" | "<scheme>-at-fine_n"
  std::string std_error_method = "delta";
  // False when more than half of the paths were non-finite for some n.
  bool valid = true;
};

struct MomentReport {
  std::uint64_t n = 0;
  double p = 2.0;
  double sup_moment = 0.0;            // E[ max_k |X_n(t_k)|^p ]
  double pointwise_sup_moment = 0.0;  // max_k E[ |X_n(t_k)|^p ]
  double divergence_fraction = 0.0;
  std::size_t M = 0;
  bool valid = true;
};

struct IncrementMoment {
  std::uint64_t n = 0;
  double p = 2.0;
  double value = 0.0;      // max over fine times t of E|X_n(t) - X_n(kappa_n(t))|^p
  double std_error = 0.0;  // Monte Carlo standard error at the maximizing time
  double argmax_time = 0.0;
  double nonfinite_fraction = 0.0;
  std::size_t M = 0;
  bool valid = true;
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double rate() const { return -slope; }
};

/// (E[max over coarse grid points of |X_ref - X_n|^p])^{1/p} for each n.
/// The reference is the closed form when the model has one, otherwise the
/// tamed scheme (scheme's alpha, or 1/2) at fine_n; reference_scheme
/// overrides that choice.
ErrorTable strong_error(const SdeModel& model, const SchemeSpec& scheme, std::span<const std::uint64_t> n_values,
                        std::uint64_t fine_n, double p, std::size_t M, std::uint64_t master_seed,
                        const EstimatorContext& ctx = {},
                        const std::optional<SchemeSpec>& reference_scheme = std::nullopt);

MomentReport moment_sup(const SdeModel& model, const SchemeSpec& scheme, std::uint64_t n, double p, std::size_t M,
                        std::uint64_t master_seed, const EstimatorContext& ctx = {});

IncrementMoment increment_moment(const SdeModel& model, const SchemeSpec& scheme, std::uint64_t n,
                                 std::uint64_t fine_n, double p, std::size_t M, std::uint64_t master_seed,
                                 const EstimatorContext& ctx = {});

/// Ordinary least squares of log(value) on log(n).
RateFit fit_loglog(std::span<const double> n_values, std::span<const double> values);
RateFit fit_rate(const ErrorTable& table);

struct AssumptionCheck {
  std::string name;
  bool checked = false;
  std::size_t violations = 0;
  // First violating sample.
  std::optional<double> witness_t;
  std::vector<double> witness_x;
  std::vector<double> witness_y;
  double witness_lhs = 0.0;
  double witness_rhs = 0.0;
};

struct SpotCheckReport {
  std::size_t samples = 0;
  double radius = 0.0;
  std::vector<AssumptionCheck> checks;
  std::vector<std::string> notes;

  std::size_t total_violations() const;
  const AssumptionCheck* find(const std::string& name) const;
};

/// Samples (t, x, y) with coordinates in [-radius, radius] (half uniformly,
/// half log-uniformly in magnitude) and counts violations of the declared
/// coercivity and Lipschitz inequalities. Finding none proves nothing.
SpotCheckReport spot_check_assumptions(const SdeModel& model, std::size_t num_samples, double radius,
                                       std::uint64_t seed, double horizon = 1.0);

}  // namespace tamed
