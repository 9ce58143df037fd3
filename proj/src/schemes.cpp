#include "tamed/schemes.hpp"

#include <algorithm>
#include <cmath>

namespace tamed {

void SchemeSpec::validate() const {
  if (kind == SchemeKind::TamedEuler) {
    if (!alpha) throw DomainError("tamed Euler requires alpha");
    if (!(*alpha > 0.0 && *alpha <= 0.5)) throw DomainError("tamed Euler: alpha must lie in (0, 1/2]");
  } else if (alpha) {
    throw DomainError("explicit Euler takes no alpha");
  }
}

std::string SchemeSpec::name() const { return kind == SchemeKind::TamedEuler ? "tamed" : "euler"; }

Stepper::Stepper(const SchemeSpec& spec, const SdeModel& model, std::uint64_t n)
    : model_(model),
      tamed_(spec.kind == SchemeKind::TamedEuler),
      tame_scale_(0.0),
      drift_(model.dim_state),
      sigma_(model.dim_state * model.dim_noise) {
  spec.validate();
  if (tamed_) tame_scale_ = tame_scale(n, *spec.alpha);
}

void Stepper::scheme_drift(double t, std::span<const double> x, std::span<double> out) {
  model_.drift(t, x, out);
  if (tamed_) tame_in_place(out, tame_scale_);
}

void Stepper::diffusion(double t, std::span<const double> x, std::span<double> out) { model_.diffusion(t, x, out); }

void Stepper::advance(double t, std::span<const double> x, double h, std::span<const double> dw,
                      std::span<double> out) {
  const std::size_t d = model_.dim_state;
  const std::size_t m = model_.dim_noise;
  scheme_drift(t, x, drift_);
  model_.diffusion(t, x, sigma_);
  for (std::size_t i = 0; i < d; ++i) {
    double acc = x[i] + drift_[i] * h;
    for (std::size_t j = 0; j < m; ++j) acc = acc + sigma_[i * m + j] * dw[j];
    out[i] = acc;
  }
}

StepOutcome step(const SchemeSpec& spec, const SdeModel& model, double t_k, std::span<const double> x, double h,
                 std::span<const double> dw, std::uint64_t n) {
  if (x.size() != model.dim_state) throw DomainError("step: state dimension mismatch");
  if (dw.size() != model.dim_noise) throw DomainError("step: noise dimension mismatch");
  if (!(h > 0.0)) throw DomainError("step: h must be positive");
  Stepper stepper(spec, model, n);
  StepOutcome out{State(model.dim_state), true};
  stepper.advance(t_k, x, h, dw, out.value);
  out.finite = all_finite(out.value);
  return out;
}

namespace {

void check_noise_matches(const SdeModel& model, const TimeGrid& grid, const IncrementArray& noise) {
  if (noise.n != grid.n() || noise.num_steps() != grid.num_steps() || noise.horizon != grid.horizon()) {
    throw DomainError("simulate: noise resolution does not match the grid");
  }
  if (noise.dim_noise != model.dim_noise) throw DomainError("simulate: noise dimension mismatch");
}

}  // namespace

Trajectory simulate(const SchemeSpec& spec, const SdeModel& model, const TimeGrid& grid,
                    const IncrementArray& noise, std::span<const double> x0) {
  check_noise_matches(model, grid, noise);
  const std::size_t d = model.dim_state;
  if (x0.size() != d) throw DomainError("simulate: initial value dimension mismatch");

  Trajectory traj{grid, d, std::vector<double>(grid.num_points() * d), std::vector<std::uint8_t>(grid.num_points(), 1),
                  std::nullopt};
  std::copy(x0.begin(), x0.end(), traj.values.begin());
  if (!all_finite(x0)) traj.blowup_index = 0;

  Stepper stepper(spec, model, grid.n());
  for (std::size_t k = 0; k < grid.num_steps(); ++k) {
    const std::span<const double> cur{traj.values.data() + k * d, d};
    const std::span<double> next{traj.values.data() + (k + 1) * d, d};
    if (traj.blowup_index) {
      std::copy(cur.begin(), cur.end(), next.begin());
      continue;
    }
    stepper.advance(grid.point(k), cur, grid.step_size(k), noise.step(k), next);
    if (!all_finite(next)) traj.blowup_index = k + 1;
  }
  if (traj.blowup_index) std::fill(traj.finite.begin() + *traj.blowup_index, traj.finite.end(), 0);
  return traj;
}

State interpolate(const SchemeSpec& spec, const SdeModel& model, const TimeGrid& grid,
                  const IncrementArray& fine_noise, const Trajectory& trajectory, double t) {
  if (fine_noise.n % grid.n() != 0) throw DomainError("interpolate: fine n is not a multiple of the grid n");
  if (fine_noise.horizon != grid.horizon() || fine_noise.dim_noise != model.dim_noise) {
    throw DomainError("interpolate: fine noise does not match the model and grid");
  }
  const TimeGrid fine_grid(grid.horizon(), fine_noise.n);
  const std::size_t j = fine_grid.kappa_index(t);
  if (fine_grid.point(j) != t) throw DomainError("interpolate: t is not a fine grid point");
  const std::size_t ratio = fine_noise.n / grid.n();
  const std::size_t k = std::min(j / ratio, grid.num_steps());

  const std::size_t d = model.dim_state;
  const std::size_t m = model.dim_noise;
  const auto xk = trajectory.at(k);
  State out(xk.begin(), xk.end());
  if (j == k * ratio || !all_finite(xk)) return out;

  std::vector<double> dw(m, 0.0);
  for (std::size_t f = k * ratio; f < j; ++f) {
    const auto inc = fine_noise.step(f);
    for (std::size_t c = 0; c < m; ++c) dw[c] = (f == k * ratio) ? inc[c] : dw[c] + inc[c];
  }
  Stepper stepper(spec, model, grid.n());
  State drift(d);
  std::vector<double> sigma(d * m);
  const double tk = grid.point(k);
  stepper.scheme_drift(tk, xk, drift);
  stepper.diffusion(tk, xk, sigma);
  const double dt = t - tk;
  for (std::size_t i = 0; i < d; ++i) {
    double inc = drift[i] * dt;
    for (std::size_t c = 0; c < m; ++c) inc = inc + sigma[i * m + c] * dw[c];
    out[i] = xk[i] + inc;
  }
  return out;
}

std::vector<double> simulate_batch(const SchemeSpec& spec, const kernels::PolynomialCoeffs& coeffs,
                                   const TimeGrid& grid, std::span<const double> dw, std::span<const double> x0,
                                   kernels::Isa isa) {
  spec.validate();
  const std::size_t lanes = x0.size();
  if (dw.size() != grid.num_steps() * lanes) throw DomainError("simulate_batch: noise shape mismatch");
  if (lanes == 0) return {};
  kernels::StepParams params;
  params.tamed = spec.kind == SchemeKind::TamedEuler;
  if (params.tamed) params.tame_scale = tame_scale(grid.n(), *spec.alpha);

  std::vector<double> values(grid.num_points() * lanes);
  for (std::size_t lane = 0; lane < lanes; ++lane) values[lane] = x0[lane];
  for (std::size_t k = 0; k < grid.num_steps(); ++k) {
    std::copy_n(values.begin() + k * lanes, lanes, values.begin() + (k + 1) * lanes);
    params.h = grid.step_size(k);
    kernels::step_batch(isa, coeffs, params, {values.data() + (k + 1) * lanes, lanes}, dw.subspan(k * lanes, lanes));
  }
  return values;
}

}  // namespace tamed
