#pragma once

// Explicit and tamed Euler one-step maps, full-grid simulation, and the
// continuous-time interpolant between grid points.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tamed/kernels/kernels.hpp"
#include "tamed/noise.hpp"
#include "tamed/sde_core.hpp"

namespace tamed {

enum class SchemeKind { ExplicitEuler, TamedEuler };

struct SchemeSpec {
  SchemeKind kind = SchemeKind::TamedEuler;
  std::optional<double> alpha = 0.5;

  static SchemeSpec explicit_euler() { return {SchemeKind::ExplicitEuler, std::nullopt}; }
  static SchemeSpec tamed(double alpha = 0.5) { return {SchemeKind::TamedEuler, alpha}; }

  void validate() const;
  std::string name() const;  // "euler" | "tamed"

  friend bool operator==(const SchemeSpec&, const SchemeSpec&) = default;
};

struct StepOutcome {
  State value;
  bool finite = true;
};

/// Reusable one-step evaluator; holds scratch space for the coefficients.
class Stepper {
 public:
  Stepper(const SchemeSpec& spec, const SdeModel& model, std::uint64_t n);

  /// out = x + b_n(t, x) h + sigma(t, x) dw. Non-finite results are written
  /// as computed.
  void advance(double t, std::span<const double> x, double h, std::span<const double> dw, std::span<double> out);

  /// Drift actually used by the scheme at (t, x): b or its tamed version.
  void scheme_drift(double t, std::span<const double> x, std::span<double> out);
  void diffusion(double t, std::span<const double> x, std::span<double> out);

 private:
  const SdeModel& model_;
  bool tamed_;
  double tame_scale_;
  std::vector<double> drift_;
  std::vector<double> sigma_;
};

StepOutcome step(const SchemeSpec& spec, const SdeModel& model, double t_k, std::span<const double> x, double h,
                 std::span<const double> dw, std::uint64_t n);

struct Trajectory {
  TimeGrid grid;
  std::size_t dim_state = 1;
  std::vector<double> values;  // row-major (num_points x d)
  std::vector<std::uint8_t> finite;
  // First grid index holding a non-finite state; later values repeat it.
  std::optional<std::size_t> blowup_index;

  std::span<const double> at(std::size_t k) const { return {values.data() + k * dim_state, dim_state}; }
  bool diverged() const { return blowup_index.has_value(); }
};

Trajectory simulate(const SchemeSpec& spec, const SdeModel& model, const TimeGrid& grid,
                    const IncrementArray& noise, std::span<const double> x0);

/// X_n(t) = X_n(t_k) + b_n(t_k, X_n(t_k)) (t - t_k) + sigma(t_k, X_n(t_k)) (W(t) - W(t_k)),
/// with t_k = kappa_n(t). t must be a point of fine_noise's grid, whose n is
/// a multiple of the trajectory grid's n.
State interpolate(const SchemeSpec& spec, const SdeModel& model, const TimeGrid& grid,
                  const IncrementArray& fine_noise, const Trajectory& trajectory, double t);

/// Many independent scalar paths of a polynomial-coefficient model stepped
/// together. dw is row-major (num_steps x lanes); result is row-major
/// (num_points x lanes). Lanes that become non-finite stop updating.
std::vector<double> simulate_batch(const SchemeSpec& spec, const kernels::PolynomialCoeffs& coeffs,
                                   const TimeGrid& grid, std::span<const double> dw, std::span<const double> x0,
                                   kernels::Isa isa);

}  // namespace tamed
