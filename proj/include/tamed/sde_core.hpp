#pragma once

// Core SDE types: the model description, its assumption metadata, the
// uniform time grid with its left-endpoint map, and the drift taming
// transform.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "tamed/kernels/kernels.hpp"

namespace tamed {

using State = std::vector<double>;

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Row-major d x m matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
};

// Coefficient callbacks write into caller-provided storage so the inner
// simulation loop does not allocate. Diffusion output is row-major d x m.
using DriftFn = std::function<void(double t, std::span<const double> x, std::span<double> out)>;
using DiffusionFn = std::function<void(double t, std::span<const double> x, std::span<double> out)>;

/// Draws X(0) for one Monte Carlo path. Must be a pure function of its
/// arguments.
using InitialSampler = std::function<State(std::uint64_t master_seed, std::uint64_t path_id)>;

/// Closed-form strong solution evaluated from the driving Brownian value
/// W(t) (length m).
using ExactSolutionFn = std::function<State(double t, std::span<const double> brownian_at_t)>;

/// Constants a model author declares for the coercivity and the
/// one-sided Lipschitz / polynomial growth conditions.
/// Flags are declarations only; spot_check_assumptions tries to falsify
/// them.
struct AssumptionMetadata {
  std::optional<double> coercivity_K;
  std::optional<double> one_sided_L;
  std::optional<double> poly_degree_l;
  bool a1 = false;  // coercivity
  bool a2 = false;  // local one-sided Lipschitz
  bool a3 = false;  // locally bounded drift
  bool a5 = false;  // global one-sided Lipschitz, polynomially Lipschitz drift

  /// Throws DomainError when the Lipschitz flag is set without L and l, or a
  /// constant is negative.
  void validate() const;
};

struct SdeModel {
  std::string name;
  std::size_t dim_state = 1;
  std::size_t dim_noise = 1;
  DriftFn drift;
  DiffusionFn diffusion;
  std::variant<State, InitialSampler> initial_value;
  AssumptionMetadata assumptions;
  std::optional<ExactSolutionFn> exact_solution;
  // Present when d = m = 1 and b(x) = c1 x + c3 x^3, sigma(x) = s0 + s1 x.
  // Lets the estimators step many paths at once through the SIMD kernels.
  // The drift/diffusion callbacks must evaluate exactly the same formula.
  std::optional<kernels::PolynomialCoeffs> polynomial_form;

  void validate() const;

  State initial_state(std::uint64_t master_seed, std::uint64_t path_id) const;
};

class TimeGrid {
 public:
  TimeGrid(double horizon, std::uint64_t steps_per_unit);

  double horizon() const { return horizon_; }
  std::uint64_t n() const { return n_; }
  std::size_t num_steps() const { return num_steps_; }
  std::size_t num_points() const { return num_steps_ + 1; }

  /// t_k = k/n, with the last point clamped to T.
  double point(std::size_t k) const;
  /// 1/n, except a shortened final step when T is not a multiple of 1/n.
  double step_size(std::size_t k) const;

  /// Index k of the grid point floor(n t)/n.
  std::size_t kappa_index(double t) const;

 private:
  double horizon_;
  std::uint64_t n_;
  std::size_t num_steps_;
  bool ragged_last_;
};

/// Number of steps of length 1/n needed to cover [0, T]; an n*T within
/// 1e-9 relative of an integer is treated as that integer.
std::size_t steps_to_cover(double horizon, std::uint64_t n);

/// floor(n t)/n for t in [0, T]; the result is always a grid point <= t.
double kappa(const TimeGrid& grid, double t);

/// Euclidean norm with overflow-safe rescaling; |x| for d = 1.
double euclidean_norm(std::span<const double> v);

/// b / (1 + n^{-alpha} |b|). Throws NumericError for non-finite input and
/// DomainError for alpha outside (0, 1/2] or n = 0.
State tame_drift(std::span<const double> b_value, std::uint64_t n, double alpha);

/// In-place taming without validation, used inside the stepping loop.
void tame_in_place(std::span<double> b_value, double tame_scale);

/// n^{-alpha}.
double tame_scale(std::uint64_t n, double alpha);

State eval_drift(const SdeModel& model, double t, std::span<const double> x);
Matrix eval_diffusion(const SdeModel& model, double t, std::span<const double> x);

bool all_finite(std::span<const double> v);

}  // namespace tamed
