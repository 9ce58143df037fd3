#include <iostream>

#include "CLI11.hpp"
#include "tamed/harness.hpp"

namespace tamed::harness {

int main_entry(int argc, char** argv) {
  CLI::App app{"Tamed Euler SDE experiments"};
  app.set_version_flag("--version", std::string(kVersion));

  std::string command;
  std::string config_path;
  std::vector<std::string> params;
  bool list_models = false;
  // Flag values are applied after the config file so flags win.
  std::vector<std::pair<std::string, std::string>> overrides;
  auto flag = [&](const std::string& name, const std::string& key, const std::string& help) {
    app.add_option_function<std::string>(
        name, [&overrides, key](const std::string& v) { overrides.emplace_back(key, v); }, help);
  };

  app.add_option("command", command, "convergence | moments | increments | diverge-demo | simulate | spot-check");
  app.add_option("-c,--config", config_path, "key = value config file");
  app.add_flag("--list-models", list_models, "print registered models and their parameters");
  flag("--model", "model", "registered model name");
  app.add_option("--param", params, "model parameter override, name=value (repeatable)");
  flag("--scheme", "scheme", "euler | tamed");
  flag("--alpha", "alpha", "taming exponent in (0, 1/2]");
  flag("--n", "n_values", "comma-separated ascending step counts");
  flag("--fine-n", "fine_n", "finest step count (reference and noise resolution)");
  flag("-p,--moment", "p", "moment order");
  flag("-M,--paths", "M", "number of Monte Carlo paths");
  flag("-T,--horizon", "T", "time horizon");
  flag("--seed", "seed", "master seed");
  flag("--path-id", "path_id", "path index for simulate");
  flag("-o,--output", "output", "CSV output path");
  flag("-j,--workers", "workers", "worker threads (0 = available parallelism)");
  flag("--kernel", "kernel", "auto | off | scalar | avx2 | neon");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (list_models) {
    for (const auto& entry : models::registry()) {
      std::cout << entry.name;
      for (const auto& [k, v] : entry.defaults) std::cout << ' ' << k << '=' << format_number(v);
      std::cout << '\n';
    }
    return 0;
  }

  ExperimentConfig config;
  try {
    if (!config_path.empty()) load_config_file(config, config_path);
    if (!command.empty()) apply_setting(config, "command", command, "command line");
    for (const auto& [key, value] : overrides) apply_setting(config, key, value, "--" + key);
    for (const auto& p : params) {
      const auto eq = p.find('=');
      if (eq == std::string::npos) throw ConfigError("--param: expected name=value, got '" + p + "'");
      apply_setting(config, "model." + p.substr(0, eq), p.substr(eq + 1), "--param");
    }
    validate(config);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  }

  try {
    return run(config, std::cout).exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace tamed::harness
