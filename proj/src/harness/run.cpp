#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "json.hpp"

#include "tamed/harness.hpp"
#include "tamed/noise.hpp"

namespace tamed::harness {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

void write_file(const std::string& path, const std::string& contents) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << contents;
}

json config_json(const ExperimentConfig& c) {
  json params = json::object();
  for (const auto& entry : models::registry()) {
    if (entry.name != c.model) continue;
    for (const auto& [k, v] : entry.defaults) params[k] = v;
  }
  for (const auto& [k, v] : c.model_params) params[k] = v;
  return {{"command", c.command}, {"model", c.model},   {"model_params", params}, {"scheme", c.scheme},
          {"alpha", c.alpha},     {"n_values", c.n_values}, {"fine_n", c.fine_n},  {"p", c.p},
          {"M", c.M},             {"T", c.T},           {"seed", c.master_seed}, {"path_id", c.path_id}};
}

json fit_json(const RateFit& fit) {
  return {{"slope", fit.slope}, {"intercept", fit.intercept}, {"r_squared", fit.r_squared}, {"rate", fit.rate()}};
}

std::string fit_line(const char* label, const RateFit& fit) {
  return std::string(label) + " rate=" + format_number(fit.rate()) + " slope=" + format_number(fit.slope) +
         " intercept=" + format_number(fit.intercept) + " r_squared=" + format_number(fit.r_squared);
}

}  // namespace

std::string resolve_output_path(const ExperimentConfig& config) {
  if (!config.output_path.empty()) return config.output_path;
  fs::path dir = ".";
  if (const char* env = std::getenv(std::string(kOutputDirEnv).c_str()); env && *env) dir = env;
  return (dir / (config.command + ".csv")).string();
}

RunResult run(const ExperimentConfig& config, std::ostream& log) {
  validate(config);
  const auto started = std::chrono::steady_clock::now();

  const SdeModel model = models::make_model(config.model, config.model_params);
  const SchemeSpec scheme = scheme_of(config);
  ThreadPoolExecutor pool(config.workers);

  EstimatorContext ctx;
  ctx.horizon = config.T;
  ctx.executor = &pool;
  if (config.kernel == "off") {
    ctx.use_kernels = false;
  } else if (config.kernel == "scalar") {
    ctx.isa = kernels::Isa::Scalar;
  } else if (config.kernel == "avx2") {
    ctx.isa = kernels::Isa::Avx2;
  } else if (config.kernel == "neon") {
    ctx.isa = kernels::Isa::Neon;
  }

  RunResult result;
  result.csv_path = resolve_output_path(config);
  result.manifest_path = result.csv_path + ".manifest.json";

  json manifest;
  manifest["tool"] = "tamed-sde";
  manifest["version"] = std::string(kVersion);
  manifest["config"] = config_json(config);
  manifest["master_seed"] = config.master_seed;
  manifest["workers"] = pool.concurrency();
  manifest["kernel"] = ctx.use_kernels ? std::string(kernels::isa_name(ctx.isa)) : "off";
  manifest["csv"] = result.csv_path;

  std::string csv;
  bool valid = true;

  if (config.command == "convergence") {
    const ErrorTable table =
        strong_error(model, scheme, config.n_values, config.fine_n, config.p, config.M, config.master_seed, ctx);
    csv = convergence_csv(config, table);
    valid = table.valid;
    manifest["reference"] = table.reference;
    manifest["std_error_method"] = table.std_error_method;
    manifest["nonfinite_fraction"] = table.nonfinite_fraction;
    if (valid && table.n_values.size() >= 3) {
      const RateFit fit = fit_rate(table);
      result.summary = fit_line("convergence", fit);
      manifest["fit"] = fit_json(fit);
    }
  } else if (config.command == "moments") {
    std::vector<MomentReport> rows;
    for (auto n : config.n_values) {
      rows.push_back(moment_sup(model, scheme, n, config.p, config.M, config.master_seed, ctx));
      valid = valid && rows.back().valid;
    }
    csv = moments_csv(config, rows);
  } else if (config.command == "increments") {
    std::vector<IncrementMoment> rows;
    std::vector<double> ns, values;
    for (auto n : config.n_values) {
      rows.push_back(increment_moment(model, scheme, n, config.fine_n, config.p, config.M, config.master_seed, ctx));
      valid = valid && rows.back().valid;
      ns.push_back(static_cast<double>(n));
      values.push_back(rows.back().value);
    }
    csv = increments_csv(config, rows);
    if (valid && ns.size() >= 2 && std::all_of(values.begin(), values.end(), [](double v) { return v > 0.0; })) {
      const RateFit fit = fit_loglog(ns, values);
      result.summary = fit_line("increments", fit);
      manifest["fit"] = fit_json(fit);
    }
  } else if (config.command == "diverge-demo") {
    std::vector<MomentReport> explicit_rows, tamed_rows;
    for (auto n : config.n_values) {
      explicit_rows.push_back(
          moment_sup(model, SchemeSpec::explicit_euler(), n, config.p, config.M, config.master_seed, ctx));
      tamed_rows.push_back(
          moment_sup(model, SchemeSpec::tamed(config.alpha), n, config.p, config.M, config.master_seed, ctx));
    }
    csv = divergence_csv(config, explicit_rows, tamed_rows);
  } else if (config.command == "simulate") {
    const TimeGrid grid(config.T, config.n_values.front());
    const IncrementArray fine =
        generate_increments({config.master_seed, config.path_id, model.dim_noise, config.fine_n, config.T});
    const IncrementArray noise = aggregate_increments(fine, grid.n());
    const Trajectory traj =
        simulate(scheme, model, grid, noise, model.initial_state(config.master_seed, config.path_id));
    csv = trajectory_csv(traj);
    manifest["diverged"] = traj.diverged();
  } else if (config.command == "spot-check") {
    const SpotCheckReport report = spot_check_assumptions(model, config.M, 1000.0, config.master_seed, config.T);
    std::string text = "check,checked,violations,samples,radius\n";
    for (const auto& check : report.checks) {
      text += check.name + ',' + (check.checked ? "1" : "0") + ',' + std::to_string(check.violations) + ',' +
              std::to_string(report.samples) + ',' + format_number(report.radius) + '\n';
    }
    csv = text;
    valid = report.total_violations() == 0;
    manifest["notes"] = report.notes;
  }

  write_file(result.csv_path, csv);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  manifest["valid"] = valid;
  manifest["wall_time_seconds"] = wall;
  if (!result.summary.empty()) manifest["summary"] = result.summary;
  write_file(result.manifest_path, manifest.dump(2) + "\n");

  log << "wrote " << result.csv_path << '\n';
  if (!result.summary.empty()) log << result.summary << '\n';
  if (!valid) log << "estimate invalid: more than half of the paths were non-finite (or assumption violated)\n";
  result.exit_code = valid ? 0 : 2;
  return result;
}

}  // namespace tamed::harness
