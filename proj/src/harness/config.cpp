#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tamed/harness.hpp"

namespace tamed::harness {

namespace {

const std::vector<std::string> kCommands = {"convergence", "moments", "increments", "diverge-demo", "simulate",
                                            "spot-check"};

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void fail(const std::string& where, const std::string& message) {
  throw ConfigError(where + ": " + message);
}

double parse_real(const std::string& value, const std::string& key, const std::string& where) {
  double out = 0.0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) fail(where, key + ": '" + value + "' is not a number");
  return out;
}

std::uint64_t parse_unsigned(const std::string& value, const std::string& key, const std::string& where) {
  std::uint64_t out = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) fail(where, key + ": '" + value + "' is not a nonnegative integer");
  return out;
}

std::vector<std::uint64_t> parse_list(const std::string& value, const std::string& key, const std::string& where) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_unsigned(trim(item), key, where));
  if (out.empty()) fail(where, key + ": empty list");
  return out;
}

std::string origin_of(const ExperimentConfig& config, const std::string& key) {
  const auto it = config.origin.find(key);
  return it == config.origin.end() ? "default " + key : it->second;
}

}  // namespace

void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value,
                   const std::string& where) {
  if (key == "command") {
    config.command = value;
  } else if (key == "model") {
    config.model = value;
  } else if (key.rfind("model.", 0) == 0 && key.size() > 6) {
    config.model_params[key.substr(6)] = parse_real(value, key, where);
  } else if (key == "scheme") {
    config.scheme = value;
  } else if (key == "alpha") {
    config.alpha = parse_real(value, key, where);
  } else if (key == "n_values") {
    config.n_values = parse_list(value, key, where);
  } else if (key == "fine_n") {
    config.fine_n = parse_unsigned(value, key, where);
  } else if (key == "p") {
    config.p = parse_real(value, key, where);
  } else if (key == "M") {
    config.M = parse_unsigned(value, key, where);
  } else if (key == "T") {
    config.T = parse_real(value, key, where);
  } else if (key == "seed") {
    config.master_seed = parse_unsigned(value, key, where);
  } else if (key == "path_id") {
    config.path_id = parse_unsigned(value, key, where);
  } else if (key == "output") {
    config.output_path = value;
  } else if (key == "workers") {
    config.workers = parse_unsigned(value, key, where);
  } else if (key == "kernel") {
    config.kernel = value;
  } else {
    fail(where, "unknown key '" + key + "'");
  }
  config.origin[key.rfind("model.", 0) == 0 ? "model" : key] = where;
}

void parse_config_text(ExperimentConfig& config, std::string_view text, const std::string& source_name) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string content = trim(line);
    if (content.empty()) continue;
    const std::string where = source_name + ":" + std::to_string(line_no);
    const auto eq = content.find('=');
    if (eq == std::string::npos) fail(where, "expected 'key = value'");
    const std::string key = trim(std::string_view(content).substr(0, eq));
    const std::string value = trim(std::string_view(content).substr(eq + 1));
    if (key.empty()) fail(where, "missing key");
    apply_setting(config, key, value, where);
  }
}

void load_config_file(ExperimentConfig& config, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  parse_config_text(config, buffer.str(), path);
}

void validate(const ExperimentConfig& c) {
  auto check = [&](bool ok, const std::string& key, const std::string& message) {
    if (!ok) fail(origin_of(c, key), message);
  };
  check(std::find(kCommands.begin(), kCommands.end(), c.command) != kCommands.end(), "command",
        "unknown command '" + c.command + "'");
  check(c.scheme == "euler" || c.scheme == "tamed", "scheme", "scheme must be 'euler' or 'tamed'");
  check(c.alpha > 0.0 && c.alpha <= 0.5, "alpha", "alpha must lie in (0, 1/2]");
  check(!c.n_values.empty(), "n_values", "n_values must not be empty");
  // Blame fine_n for nesting problems when it was set explicitly.
  const std::string nesting_key = c.origin.count("fine_n") ? "fine_n" : "n_values";
  for (std::size_t i = 0; i < c.n_values.size(); ++i) {
    const auto n = c.n_values[i];
    check(n > 0, "n_values", "n_values must be positive");
    check(i == 0 || n > c.n_values[i - 1], "n_values", "n_values must be strictly ascending");
    check(c.fine_n > 0 && c.fine_n % n == 0, nesting_key,
          std::to_string(n) + " does not divide fine_n = " + std::to_string(c.fine_n));
    const auto ratio = c.fine_n / n;
    check((ratio & (ratio - 1)) == 0, nesting_key,
          "fine_n / " + std::to_string(n) + " = " + std::to_string(ratio) + " is not a power of two");
  }
  check(c.p > 0.0, "p", "p must be positive");
  check(c.command != "increments" || c.p >= 2.0, "p", "increments requires p >= 2");
  check(c.M >= 1, "M", "M must be positive");
  check(c.T > 0.0 && std::isfinite(c.T), "T", "T must be positive and finite");
  check(c.kernel == "auto" || c.kernel == "off" || c.kernel == "scalar" || c.kernel == "avx2" || c.kernel == "neon",
        "kernel", "kernel must be one of auto, off, scalar, avx2, neon");
  if (c.kernel == "avx2") check(kernels::isa_available(kernels::Isa::Avx2), "kernel", "avx2 kernel unavailable");
  if (c.kernel == "neon") check(kernels::isa_available(kernels::Isa::Neon), "kernel", "neon kernel unavailable");
  try {
    (void)models::make_model(c.model, c.model_params);
  } catch (const DomainError& e) {
    fail(origin_of(c, "model"), e.what());
  }
}

SchemeSpec scheme_of(const ExperimentConfig& config) {
  return config.scheme == "euler" ? SchemeSpec::explicit_euler() : SchemeSpec::tamed(config.alpha);
}

}  // namespace tamed::harness
