#include "tamed/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "tamed/noise.hpp"

namespace tamed {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Values of a block of paths on one grid, row-major (points x lanes x d).
struct PathBlock {
  std::size_t points = 0;
  std::size_t lanes = 0;
  std::size_t d = 1;
  std::vector<double> data;
  std::vector<std::uint8_t> finite;  // whole path finite, per lane

  std::span<const double> at(std::size_t k, std::size_t lane) const {
    return {data.data() + (k * lanes + lane) * d, d};
  }

  void mark_finite() {
    finite.assign(lanes, 1);
    for (std::size_t k = 0; k < points; ++k) {
      for (std::size_t lane = 0; lane < lanes; ++lane) {
        if (finite[lane] && !all_finite(at(k, lane))) finite[lane] = 0;
      }
    }
  }
};

// Fine noise and initial values for one block of consecutive path ids, and
// simulation of those paths on any grid nested in the fine one.
class BlockSimulator {
 public:
  BlockSimulator(const SdeModel& model, const EstimatorContext& ctx, std::uint64_t master_seed,
                 std::uint64_t fine_n, std::size_t first_path, std::size_t end_path)
      : model_(model), ctx_(ctx), batched_(ctx.use_kernels && model.polynomial_form.has_value()) {
    for (std::size_t pid = first_path; pid < end_path; ++pid) {
      fine_.push_back(generate_increments({master_seed, pid, model.dim_noise, fine_n, ctx.horizon}));
      x0_.push_back(model.initial_state(master_seed, pid));
    }
  }

  std::size_t lanes() const { return fine_.size(); }
  const IncrementArray& fine(std::size_t lane) const { return fine_[lane]; }

  PathBlock simulate(const SchemeSpec& scheme, std::uint64_t n) const {
    const TimeGrid grid(ctx_.horizon, n);
    const std::size_t lanes = fine_.size();
    const std::size_t d = model_.dim_state;
    PathBlock block{grid.num_points(), lanes, d, {}, {}};

    if (batched_) {
      std::vector<double> dw(grid.num_steps() * lanes);
      std::vector<double> x0(lanes);
      for (std::size_t lane = 0; lane < lanes; ++lane) {
        const IncrementArray coarse = aggregate_increments(fine_[lane], n);
        for (std::size_t k = 0; k < grid.num_steps(); ++k) dw[k * lanes + lane] = coarse.increments[k];
        x0[lane] = x0_[lane][0];
      }
      block.data = simulate_batch(scheme, *model_.polynomial_form, grid, dw, x0, ctx_.isa);
    } else {
      block.data.resize(grid.num_points() * lanes * d);
      for (std::size_t lane = 0; lane < lanes; ++lane) {
        const IncrementArray coarse = aggregate_increments(fine_[lane], n);
        const Trajectory traj = tamed::simulate(scheme, model_, grid, coarse, x0_[lane]);
        for (std::size_t k = 0; k < grid.num_points(); ++k) {
          const auto v = traj.at(k);
          std::copy(v.begin(), v.end(), block.data.begin() + (k * lanes + lane) * d);
        }
      }
    }
    block.mark_finite();
    return block;
  }

 private:
  const SdeModel& model_;
  const EstimatorContext& ctx_;
  bool batched_;
  std::vector<IncrementArray> fine_;
  std::vector<State> x0_;
};

std::size_t block_count(std::size_t M) { return (M + kPathBlock - 1) / kPathBlock; }

template <class Fn>
void for_each_block(const EstimatorContext& ctx, std::size_t M, Fn&& fn) {
  SerialExecutor serial;
  Executor& exec = ctx.executor ? *ctx.executor : serial;
  exec.for_each(block_count(M), [&](std::size_t b) {
    const std::size_t begin = b * kPathBlock;
    fn(b, begin, std::min(M, begin + kPathBlock));
  });
}

void check_nested(std::uint64_t n, std::uint64_t fine_n) {
  if (n == 0 || fine_n == 0 || fine_n % n != 0) {
    throw DomainError("n = " + std::to_string(n) + " does not divide fine_n = " + std::to_string(fine_n));
  }
  const std::uint64_t ratio = fine_n / n;
  if ((ratio & (ratio - 1)) != 0) {
    throw DomainError("fine_n / n = " + std::to_string(ratio) + " is not a power of two");
  }
}

double squared_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    s += diff * diff;
  }
  return s;
}

// |v|^p from |v|^2.
double power_from_square(double sq, double p) { return p == 2.0 ? sq : std::pow(sq, 0.5 * p); }

void check_p_and_M(double p, std::size_t M) {
  if (!(p > 0.0) || !std::isfinite(p)) throw DomainError("moment order p must be positive");
  if (M == 0) throw DomainError("number of paths M must be positive");
}

}  // namespace

ErrorTable strong_error(const SdeModel& model, const SchemeSpec& scheme, std::span<const std::uint64_t> n_values,
                        std::uint64_t fine_n, double p, std::size_t M, std::uint64_t master_seed,
                        const EstimatorContext& ctx, const std::optional<SchemeSpec>& reference_scheme) {
  model.validate();
  scheme.validate();
  check_p_and_M(p, M);
  if (n_values.empty()) throw DomainError("strong_error: empty n ladder");
  for (auto n : n_values) check_nested(n, fine_n);

  std::optional<SchemeSpec> ref_scheme = reference_scheme;
  if (!ref_scheme && !model.exact_solution) ref_scheme = SchemeSpec::tamed(scheme.alpha.value_or(0.5));
  if (ref_scheme) ref_scheme->validate();

  ErrorTable table;
  table.n_values.assign(n_values.begin(), n_values.end());
  table.p = p;
  table.M = M;
  table.reference = ref_scheme ? ref_scheme->name() + "-at-fine_n" : "closed-form";

  const TimeGrid fine_grid(ctx.horizon, fine_n);
  const std::size_t num_n = n_values.size();
  // sup_diff[i * M + path] = max_k |X_ref - X_n|^p, NaN when non-finite
  std::vector<double> sup_diff(num_n * M, kNaN);

  for_each_block(ctx, M, [&](std::size_t, std::size_t begin, std::size_t end) {
    const BlockSimulator sim(model, ctx, master_seed, fine_n, begin, end);
    const std::size_t lanes = sim.lanes();
    const std::size_t d = model.dim_state;

    std::optional<PathBlock> ref_block;
    std::vector<std::vector<double>> brownian;
    if (ref_scheme) {
      ref_block = sim.simulate(*ref_scheme, fine_n);
    } else {
      for (std::size_t lane = 0; lane < lanes; ++lane) brownian.push_back(brownian_path(sim.fine(lane)));
    }
    const std::size_t m = model.dim_noise;
    State ref_value(d);
    auto reference_at = [&](std::size_t lane, std::size_t f) -> std::span<const double> {
      if (ref_block) return ref_block->at(f, lane);
      const std::span<const double> w{brownian[lane].data() + f * m, m};
      ref_value = (*model.exact_solution)(fine_grid.point(f), w);
      return ref_value;
    };

    for (std::size_t i = 0; i < num_n; ++i) {
      const std::uint64_t n = n_values[i];
      const std::size_t ratio = fine_n / n;
      const PathBlock coarse = sim.simulate(scheme, n);
      for (std::size_t lane = 0; lane < lanes; ++lane) {
        if (!coarse.finite[lane] || (ref_block && !ref_block->finite[lane])) continue;
        double worst = 0.0;
        bool finite = true;
        for (std::size_t k = 0; k < coarse.points; ++k) {
          const std::size_t f = std::min(k * ratio, fine_grid.num_steps());
          const auto ref = reference_at(lane, f);
          if (!all_finite(ref)) {
            finite = false;
            break;
          }
          worst = std::max(worst, power_from_square(squared_distance(ref, coarse.at(k, lane)), p));
        }
        if (finite) sup_diff[i * M + begin + lane] = worst;
      }
    }
  });

  for (std::size_t i = 0; i < num_n; ++i) {
    const std::span<const double> values{sup_diff.data() + i * M, M};
    std::size_t finite = 0;
    double sum = 0.0;
    for (double v : values) {
      if (std::isnan(v)) continue;
      ++finite;
      sum += v;
    }
    const double nonfinite = static_cast<double>(M - finite) / static_cast<double>(M);
    table.nonfinite_fraction.push_back(nonfinite);
    if (nonfinite > 0.5) table.valid = false;
    if (finite == 0) {
      table.errors.push_back(kNaN);
      table.std_errors.push_back(kNaN);
      continue;
    }
    const double mean = sum / static_cast<double>(finite);
    double ss = 0.0;
    for (double v : values) {
      if (!std::isnan(v)) ss += (v - mean) * (v - mean);
    }
    const double error = std::pow(mean, 1.0 / p);
    double se = kNaN;
    if (finite >= 2) {
      const double se_mean = std::sqrt(ss / static_cast<double>(finite - 1) / static_cast<double>(finite));
      se = mean > 0.0 ? (1.0 / p) * std::pow(mean, 1.0 / p - 1.0) * se_mean : 0.0;
    }
    table.errors.push_back(error);
    table.std_errors.push_back(se);
  }
  return table;
}

MomentReport moment_sup(const SdeModel& model, const SchemeSpec& scheme, std::uint64_t n, double p, std::size_t M,
                        std::uint64_t master_seed, const EstimatorContext& ctx) {
  model.validate();
  scheme.validate();
  check_p_and_M(p, M);
  const TimeGrid grid(ctx.horizon, n);
  const std::size_t points = grid.num_points();

  std::vector<double> path_sup(M, kNaN);
  std::vector<std::vector<double>> block_sums(block_count(M));

  for_each_block(ctx, M, [&](std::size_t b, std::size_t begin, std::size_t end) {
    const BlockSimulator sim(model, ctx, master_seed, n, begin, end);
    const PathBlock block = sim.simulate(scheme, n);
    std::vector<double> sums(points, 0.0);
    for (std::size_t lane = 0; lane < block.lanes; ++lane) {
      if (!block.finite[lane]) continue;
      double worst = 0.0;
      for (std::size_t k = 0; k < points; ++k) {
        const double v = power_from_square(squared_norm(block.at(k, lane)), p);
        sums[k] += v;
        worst = std::max(worst, v);
      }
      path_sup[begin + lane] = worst;
    }
    block_sums[b] = std::move(sums);
  });

  MomentReport report;
  report.n = n;
  report.p = p;
  report.M = M;
  std::size_t finite = 0;
  double sum = 0.0;
  for (double v : path_sup) {
    if (std::isnan(v)) continue;
    ++finite;
    sum += v;
  }
  report.divergence_fraction = static_cast<double>(M - finite) / static_cast<double>(M);
  report.valid = report.divergence_fraction <= 0.5;
  if (finite == 0) {
    report.sup_moment = kNaN;
    report.pointwise_sup_moment = kNaN;
    return report;
  }
  report.sup_moment = sum / static_cast<double>(finite);
  std::vector<double> totals(points, 0.0);
  for (const auto& sums : block_sums) {
    for (std::size_t k = 0; k < points; ++k) totals[k] += sums[k];
  }
  report.pointwise_sup_moment = *std::max_element(totals.begin(), totals.end()) / static_cast<double>(finite);
  return report;
}

IncrementMoment increment_moment(const SdeModel& model, const SchemeSpec& scheme, std::uint64_t n,
                                 std::uint64_t fine_n, double p, std::size_t M, std::uint64_t master_seed,
                                 const EstimatorContext& ctx) {
  model.validate();
  scheme.validate();
  check_p_and_M(p, M);
  if (p < 2.0) throw DomainError("increment_moment: p must be at least 2");
  check_nested(n, fine_n);

  const TimeGrid grid(ctx.horizon, n);
  const TimeGrid fine_grid(ctx.horizon, fine_n);
  const std::size_t fine_points = fine_grid.num_points();
  const std::size_t ratio = fine_n / n;
  const std::size_t d = model.dim_state;
  const std::size_t m = model.dim_noise;

  struct Partial {
    std::vector<double> sum;
    std::vector<double> sum_sq;
    std::size_t finite = 0;
  };
  std::vector<Partial> partials(block_count(M));

  for_each_block(ctx, M, [&](std::size_t b, std::size_t begin, std::size_t end) {
    const BlockSimulator sim(model, ctx, master_seed, fine_n, begin, end);
    const PathBlock block = sim.simulate(scheme, n);
    Partial part{std::vector<double>(fine_points, 0.0), std::vector<double>(fine_points, 0.0), 0};
    Stepper stepper(scheme, model, n);
    std::vector<double> drift(d), sigma(d * m), dw(m), inc(d);

    for (std::size_t lane = 0; lane < block.lanes; ++lane) {
      if (!block.finite[lane]) continue;
      ++part.finite;
      const IncrementArray& fine = sim.fine(lane);
      for (std::size_t k = 0; k < grid.num_steps(); ++k) {
        const auto xk = block.at(k, lane);
        const double tk = grid.point(k);
        stepper.scheme_drift(tk, xk, drift);
        stepper.diffusion(tk, xk, sigma);
        const std::size_t first = k * ratio;
        // Fine times strictly inside the coarse interval, plus T when the
        // last coarse step is shortened.
        const std::size_t last = std::min(first + ratio - 1, fine_grid.num_steps());
        for (std::size_t j = first + 1; j <= last; ++j) {
          const auto step = fine.step(j - 1);
          for (std::size_t c = 0; c < m; ++c) dw[c] = (j == first + 1) ? step[c] : dw[c] + step[c];
          const double dt = fine_grid.point(j) - tk;
          for (std::size_t i = 0; i < d; ++i) {
            double v = drift[i] * dt;
            for (std::size_t c = 0; c < m; ++c) v = v + sigma[i * m + c] * dw[c];
            inc[i] = v;
          }
          const double value = power_from_square(squared_norm(inc), p);
          part.sum[j] += value;
          part.sum_sq[j] += value * value;
        }
      }
    }
    partials[b] = std::move(part);
  });

  IncrementMoment out;
  out.n = n;
  out.p = p;
  out.M = M;
  std::vector<double> sum(fine_points, 0.0), sum_sq(fine_points, 0.0);
  std::size_t finite = 0;
  for (const auto& part : partials) {
    finite += part.finite;
    for (std::size_t j = 0; j < fine_points; ++j) {
      sum[j] += part.sum[j];
      sum_sq[j] += part.sum_sq[j];
    }
  }
  out.nonfinite_fraction = static_cast<double>(M - finite) / static_cast<double>(M);
  out.valid = out.nonfinite_fraction <= 0.5;
  if (finite == 0) {
    out.value = out.std_error = kNaN;
    return out;
  }
  const double F = static_cast<double>(finite);
  std::size_t best = 0;
  for (std::size_t j = 1; j < fine_points; ++j) {
    if (sum[j] > sum[best]) best = j;
  }
  out.value = sum[best] / F;
  out.argmax_time = fine_grid.point(best);
  out.std_error = kNaN;
  if (finite >= 2) {
    const double var = std::max(0.0, (sum_sq[best] / F - out.value * out.value) * F / (F - 1.0));
    out.std_error = std::sqrt(var / F);
  }
  return out;
}

RateFit fit_loglog(std::span<const double> n_values, std::span<const double> values) {
  if (n_values.size() != values.size() || n_values.size() < 2) {
    throw DomainError("fit: need at least two (n, value) pairs");
  }
  const std::size_t count = n_values.size();
  std::vector<double> x(count), y(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (!(n_values[i] > 0.0) || !(values[i] > 0.0) || !std::isfinite(values[i])) {
      throw DomainError("fit: n and values must be positive and finite");
    }
    x[i] = std::log(n_values[i]);
    y[i] = std::log(values[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(count);
  my /= static_cast<double>(count);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw DomainError("fit: n values must not all be equal");
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

RateFit fit_rate(const ErrorTable& table) {
  if (table.n_values.size() < 3) throw DomainError("fit_rate: need at least three n values");
  std::vector<double> n(table.n_values.begin(), table.n_values.end());
  for (double e : table.errors) {
    if (!(e > 0.0)) throw DomainError("fit_rate: errors must be positive");
  }
  return fit_loglog(n, table.errors);
}

std::size_t SpotCheckReport::total_violations() const {
  std::size_t total = 0;
  for (const auto& c : checks) total += c.violations;
  return total;
}

const AssumptionCheck* SpotCheckReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

SpotCheckReport spot_check_assumptions(const SdeModel& model, std::size_t num_samples, double radius,
                                       std::uint64_t seed, double horizon) {
  model.validate();
  if (!(radius > 0.0)) throw DomainError("spot_check: radius must be positive");
  const auto& meta = model.assumptions;
  const std::size_t d = model.dim_state;
  const std::size_t m = model.dim_noise;

  SpotCheckReport report;
  report.samples = num_samples;
  report.radius = radius;
  const bool has_K = meta.coercivity_K.has_value();
  const bool has_A5 = meta.one_sided_L.has_value() && meta.poly_degree_l.has_value();
  for (const auto& [name, checked] : {std::pair<const char*, bool>{"coercivity drift", has_K},
                                      {"coercivity diffusion", has_K},
                                      {"one-sided Lipschitz drift", has_A5},
                                      {"Lipschitz diffusion", has_A5},
                                      {"polynomial Lipschitz drift", has_A5}}) {
    AssumptionCheck check;
    check.name = name;
    check.checked = checked;
    report.checks.push_back(std::move(check));
  }
  if (!has_K) report.notes.push_back("no coercivity constant K declared; coercivity checks skipped");
  if (!has_A5) report.notes.push_back("no L and l declared; Lipschitz checks skipped");

  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double log_hi = std::log10(radius);
  const double log_lo = std::min(-3.0, log_hi - 1.0);
  auto coordinate = [&](std::size_t sample) {
    if (sample % 2 == 0) return radius * (2.0 * unit(gen) - 1.0);
    const double mag = std::pow(10.0, log_lo + (log_hi - log_lo) * unit(gen));
    return unit(gen) < 0.5 ? -mag : mag;
  };

  std::vector<double> x(d), y(d), bx(d), by(d), sx(d * m), sy(d * m);
  constexpr double kSlack = 1e-12;

  auto record = [&](AssumptionCheck& check, double lhs, double rhs, double scale, double t) {
    if (lhs <= rhs + kSlack * scale) return;
    if (check.violations++ == 0) {
      check.witness_t = t;
      check.witness_x = x;
      check.witness_y = y;
      check.witness_lhs = lhs;
      check.witness_rhs = rhs;
    }
  };

  for (std::size_t s = 0; s < num_samples; ++s) {
    const double t = horizon * unit(gen);
    for (std::size_t i = 0; i < d; ++i) x[i] = coordinate(s);
    for (std::size_t i = 0; i < d; ++i) y[i] = coordinate(s + 1);
    model.drift(t, x, bx);
    model.drift(t, y, by);
    model.diffusion(t, x, sx);
    model.diffusion(t, y, sy);
    if (!all_finite(bx) || !all_finite(by) || !all_finite(sx) || !all_finite(sy)) continue;

    const double x2 = squared_norm(x);
    const double y2 = squared_norm(y);
    if (has_K) {
      const double K = *meta.coercivity_K;
      double xb = 0.0;
      for (std::size_t i = 0; i < d; ++i) xb += x[i] * bx[i];
      const double bound = K * (1.0 + x2);
      record(report.checks[0], 2.0 * xb, bound, 2.0 * std::sqrt(x2) * euclidean_norm(bx) + bound, t);
      const double s2 = squared_norm(sx);
      record(report.checks[1], s2, bound, s2 + bound, t);
    }
    if (has_A5) {
      const double L = *meta.one_sided_L;
      const double l = *meta.poly_degree_l;
      double inner = 0.0, db2 = 0.0, dxy2 = 0.0, ds2 = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        inner += (x[i] - y[i]) * (bx[i] - by[i]);
        db2 += (bx[i] - by[i]) * (bx[i] - by[i]);
        dxy2 += (x[i] - y[i]) * (x[i] - y[i]);
      }
      for (std::size_t i = 0; i < d * m; ++i) ds2 += (sx[i] - sy[i]) * (sx[i] - sy[i]);
      const double dist = std::sqrt(dxy2);
      const double bsum = euclidean_norm(bx) + euclidean_norm(by);
      record(report.checks[2], inner, L * dxy2, dist * bsum + L * dxy2, t);
      record(report.checks[3], ds2, L * dxy2, squared_norm(sx) + squared_norm(sy) + L * dxy2, t);
      const double poly_rhs = L * (1.0 + std::pow(std::sqrt(x2), l) + std::pow(std::sqrt(y2), l)) * dist;
      record(report.checks[4], std::sqrt(db2), poly_rhs, bsum + poly_rhs, t);
    }
  }
  return report;
}

}  // namespace tamed
