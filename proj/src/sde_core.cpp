#include "tamed/sde_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tamed {

namespace {

std::string describe_state(std::span<const double> x) {
  std::ostringstream os;
  os.precision(17);
  os << '[';
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) os << ", ";
    os << x[i];
  }
  os << ']';
  return os.str();
}

}  // namespace

void AssumptionMetadata::validate() const {
  for (const auto& c : {coercivity_K, one_sided_L, poly_degree_l}) {
    if (c && !(*c >= 0.0)) throw DomainError("assumption constants must be nonnegative");
  }
  if (a5 && (!one_sided_L || !poly_degree_l)) {
    throw DomainError("Lipschitz flag set without L and l");
  }
  if (a1 && !coercivity_K) throw DomainError("coercivity flag set without K");
}

void SdeModel::validate() const {
  if (dim_state == 0 || dim_noise == 0) throw DomainError(name + ": dimensions must be positive");
  if (!drift || !diffusion) throw DomainError(name + ": missing coefficient function");
  if (const auto* x0 = std::get_if<State>(&initial_value); x0 && x0->size() != dim_state) {
    throw DomainError(name + ": initial value has wrong dimension");
  }
  if (polynomial_form && (dim_state != 1 || dim_noise != 1)) {
    throw DomainError(name + ": polynomial form requires d = m = 1");
  }
  assumptions.validate();
}

State SdeModel::initial_state(std::uint64_t master_seed, std::uint64_t path_id) const {
  if (const auto* x0 = std::get_if<State>(&initial_value)) return *x0;
  State x = std::get<InitialSampler>(initial_value)(master_seed, path_id);
  if (x.size() != dim_state) throw DomainError(name + ": initial sampler returned wrong dimension");
  return x;
}

std::size_t steps_to_cover(double horizon, std::uint64_t n) {
  const double exact = horizon * static_cast<double>(n);
  const double nearest = std::round(exact);
  if (std::fabs(exact - nearest) <= 1e-9 * std::max(1.0, exact)) {
    return static_cast<std::size_t>(std::max(1.0, nearest));
  }
  return static_cast<std::size_t>(std::ceil(exact));
}

TimeGrid::TimeGrid(double horizon, std::uint64_t steps_per_unit) : horizon_(horizon), n_(steps_per_unit) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("time grid: horizon must be positive");
  if (steps_per_unit == 0) throw DomainError("time grid: n must be positive");
  num_steps_ = steps_to_cover(horizon, steps_per_unit);
  const double exact = horizon * static_cast<double>(steps_per_unit);
  ragged_last_ = std::fabs(exact - std::round(exact)) > 1e-9 * std::max(1.0, exact);
}

double TimeGrid::step_size(std::size_t k) const {
  if (ragged_last_ && k + 1 == num_steps_) return horizon_ - point(k);
  return 1.0 / static_cast<double>(n_);
}

double TimeGrid::point(std::size_t k) const {
  if (k >= num_steps_) return horizon_;
  return static_cast<double>(k) / static_cast<double>(n_);
}

std::size_t TimeGrid::kappa_index(double t) const {
  if (!(t >= 0.0 && t <= horizon_)) {
    std::ostringstream os;
    os << "kappa: t = " << t << " outside [0, " << horizon_ << "]";
    throw DomainError(os.str());
  }
  const double nd = static_cast<double>(n_);
  auto k = std::min(static_cast<std::size_t>(std::floor(t * nd)), num_steps_);
  // floor(n t) can be off by one when k/n * n does not round-trip.
  if (k < num_steps_ && point(k + 1) <= t) ++k;
  if (k > 0 && point(k) > t) --k;
  return k;
}

double kappa(const TimeGrid& grid, double t) {
  return grid.point(grid.kappa_index(t));
}

double euclidean_norm(std::span<const double> v) {
  if (v.size() == 1) return std::fabs(v[0]);
  double sum = 0.0;
  for (double x : v) sum += x * x;
  if (std::isfinite(sum) && sum > 1e-290) return std::sqrt(sum);
  double scale = 0.0;
  for (double x : v) scale = std::max(scale, std::fabs(x));
  if (scale == 0.0 || !std::isfinite(scale)) return scale;
  sum = 0.0;
  for (double x : v) sum += (x / scale) * (x / scale);
  return scale * std::sqrt(sum);
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double tame_scale(std::uint64_t n, double alpha) {
  if (n == 0) throw DomainError("tame_drift: n must be positive");
  if (!(alpha > 0.0 && alpha <= 0.5)) throw DomainError("tame_drift: alpha must lie in (0, 1/2]");
  return std::pow(static_cast<double>(n), -alpha);
}

void tame_in_place(std::span<double> b_value, double scale) {
  const double denom = 1.0 + scale * euclidean_norm(b_value);
  for (double& b : b_value) b = b / denom;
}

State tame_drift(std::span<const double> b_value, std::uint64_t n, double alpha) {
  const double scale = tame_scale(n, alpha);
  if (!all_finite(b_value)) throw NumericError("tame_drift: non-finite drift " + describe_state(b_value));
  State out(b_value.begin(), b_value.end());
  tame_in_place(out, scale);
  return out;
}

State eval_drift(const SdeModel& model, double t, std::span<const double> x) {
  if (x.size() != model.dim_state) throw DomainError(model.name + ": state has wrong dimension");
  State out(model.dim_state, 0.0);
  model.drift(t, x, out);
  if (!all_finite(out)) {
    std::ostringstream os;
    os << model.name << ": non-finite drift at t = " << t << ", x = " << describe_state(x);
    throw NumericError(os.str());
  }
  return out;
}

Matrix eval_diffusion(const SdeModel& model, double t, std::span<const double> x) {
  if (x.size() != model.dim_state) throw DomainError(model.name + ": state has wrong dimension");
  Matrix out(model.dim_state, model.dim_noise);
  model.diffusion(t, x, out.data);
  if (!all_finite(out.data)) {
    std::ostringstream os;
    os << model.name << ": non-finite diffusion at t = " << t << ", x = " << describe_state(x);
    throw NumericError(os.str());
  }
  return out;
}

}  // namespace tamed
