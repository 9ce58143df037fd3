#pragma once

// Experiment configuration, CSV/manifest formats and the command runner
// behind the tamed-sde executable.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tamed/estimators.hpp"
#include "tamed/models.hpp"

namespace tamed::harness {

inline constexpr std::string_view kVersion = "0.1.0";
inline constexpr std::string_view kOutputDirEnv = "TAMED_SDE_OUTPUT_DIR";

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string command = "convergence";
  std::string model = "cubic-additive";
  models::ParameterMap model_params;
  std::string scheme = "tamed";
  double alpha = 0.5;
  std::vector<std::uint64_t> n_values = {32, 64, 128, 256, 512};
  std::uint64_t fine_n = 8192;
  double p = 2.0;
  std::size_t M = 1000;
  double T = 1.0;
  std::uint64_t master_seed = 0;
  std::uint64_t path_id = 0;
  std::string output_path;
  std::size_t workers = 0;     // 0 = available parallelism
  std::string kernel = "auto";  // auto | off | scalar | avx2 | neon

  // Where each key was last set ("file.cfg:12" or "--flag"); used to point
  // validation errors at their source.
  std::map<std::string, std::string> origin;
};

/// Applies one `key = value` setting. Throws ConfigError prefixed with
/// `where`.
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value,
                   const std::string& where);

/// Parses line-oriented `key = value` text ('#' starts a comment) on top of
/// `config`.
void parse_config_text(ExperimentConfig& config, std::string_view text, const std::string& source_name);
void load_config_file(ExperimentConfig& config, const std::string& path);

/// Throws ConfigError naming the origin of the offending key.
void validate(const ExperimentConfig& config);

SchemeSpec scheme_of(const ExperimentConfig& config);

/// Numbers are written with 17 significant digits.
std::string format_number(double value);

// CSV headers, fixed per command.
inline constexpr std::string_view kConvergenceHeader = "n,error,std_error,p,M,scheme,alpha,model";
inline constexpr std::string_view kMomentsHeader =
    "n,p,M,sup_moment,pointwise_sup_moment,divergence_fraction,scheme,alpha,model";
inline constexpr std::string_view kIncrementsHeader = "n,fine_n,p,M,increment_moment,std_error,scheme,alpha,model";
inline constexpr std::string_view kDivergenceHeader =
    "n,M,explicit_divergence_fraction,tamed_divergence_fraction,alpha,model";

std::string convergence_csv(const ExperimentConfig& config, const ErrorTable& table);
std::string moments_csv(const ExperimentConfig& config, const std::vector<MomentReport>& reports);
std::string increments_csv(const ExperimentConfig& config, const std::vector<IncrementMoment>& rows);
std::string divergence_csv(const ExperimentConfig& config, const std::vector<MomentReport>& explicit_rows,
                           const std::vector<MomentReport>& tamed_rows);
std::string trajectory_csv(const Trajectory& trajectory);

struct RunResult {
  int exit_code = 0;  // 0 ok, 2 invalid estimate (CSV still written)
  std::string csv_path;
  std::string manifest_path;
  std::string summary;  // fit line, when the command produces one
};

/// Resolves the CSV path: output_path, else $TAMED_SDE_OUTPUT_DIR (or the
/// working directory) joined with "<command>.csv".
std::string resolve_output_path(const ExperimentConfig& config);

/// Runs a validated configuration. Writes the CSV and a JSON manifest next
/// to it (CSV path + ".manifest.json").
RunResult run(const ExperimentConfig& config, std::ostream& log);

/// Entry point of the executable; returns the process exit status.
int main_entry(int argc, char** argv);

}  // namespace tamed::harness
