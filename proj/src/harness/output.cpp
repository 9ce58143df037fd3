#include <cmath>
#include <cstdio>
#include <sstream>

#include "tamed/harness.hpp"

namespace tamed::harness {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

namespace {

std::string alpha_field(const ExperimentConfig& c) { return c.scheme == "tamed" ? format_number(c.alpha) : ""; }

}  // namespace

std::string convergence_csv(const ExperimentConfig& c, const ErrorTable& table) {
  std::ostringstream os;
  os << kConvergenceHeader << '\n';
  for (std::size_t i = 0; i < table.n_values.size(); ++i) {
    os << table.n_values[i] << ',' << format_number(table.errors[i]) << ',' << format_number(table.std_errors[i])
       << ',' << format_number(table.p) << ',' << table.M << ',' << c.scheme << ',' << alpha_field(c) << ','
       << c.model << '\n';
  }
  return os.str();
}

std::string moments_csv(const ExperimentConfig& c, const std::vector<MomentReport>& reports) {
  std::ostringstream os;
  os << kMomentsHeader << '\n';
  for (const auto& r : reports) {
    os << r.n << ',' << format_number(r.p) << ',' << r.M << ',' << format_number(r.sup_moment) << ','
       << format_number(r.pointwise_sup_moment) << ',' << format_number(r.divergence_fraction) << ',' << c.scheme
       << ',' << alpha_field(c) << ',' << c.model << '\n';
  }
  return os.str();
}

std::string increments_csv(const ExperimentConfig& c, const std::vector<IncrementMoment>& rows) {
  std::ostringstream os;
  os << kIncrementsHeader << '\n';
  for (const auto& r : rows) {
    os << r.n << ',' << c.fine_n << ',' << format_number(r.p) << ',' << r.M << ',' << format_number(r.value) << ','
       << format_number(r.std_error) << ',' << c.scheme << ',' << alpha_field(c) << ',' << c.model << '\n';
  }
  return os.str();
}

std::string divergence_csv(const ExperimentConfig& c, const std::vector<MomentReport>& explicit_rows,
                           const std::vector<MomentReport>& tamed_rows) {
  std::ostringstream os;
  os << kDivergenceHeader << '\n';
  for (std::size_t i = 0; i < explicit_rows.size(); ++i) {
    os << explicit_rows[i].n << ',' << explicit_rows[i].M << ',' << format_number(explicit_rows[i].divergence_fraction)
       << ',' << format_number(tamed_rows[i].divergence_fraction) << ',' << format_number(c.alpha) << ',' << c.model
       << '\n';
  }
  return os.str();
}

std::string trajectory_csv(const Trajectory& trajectory) {
  std::ostringstream os;
  os << 't';
  for (std::size_t i = 0; i < trajectory.dim_state; ++i) os << ",x_" << i;
  os << ",finite\n";
  for (std::size_t k = 0; k < trajectory.grid.num_points(); ++k) {
    os << format_number(trajectory.grid.point(k));
    for (double v : trajectory.at(k)) os << ',' << format_number(v);
    os << ',' << int(trajectory.finite[k]) << '\n';
  }
  return os.str();
}

}  // namespace tamed::harness
