#pragma once

#include <algorithm>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "tensionlab/io.hpp"

namespace tensionlab {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline int edit_distance(const std::string& a, const std::string& b) {
  std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1,
                         prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace detail

inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "command",  "kind",      "family",    "k",          "s",       "delta",
      "potential", "potential_scale", "eps", "eps_list",  "s_list",  "n",
      "T0",       "T_max",     "N0",        "N_max",      "eta",     "r",
      "output_dir", "cache_dir", "threads", "seed",       "input",   "output",
      "use_cache"};
  return keys;
}

struct RunConfig {
  std::string command;
  json raw;
};

// Validates keys and ranges, fills defaults. Throws ConfigError naming the
// offending field; unknown keys get an edit-distance suggestion.
inline RunConfig validate_config(json cfg) {
  if (!cfg.is_object()) throw ConfigError("config: top level must be a JSON object");
  for (const auto& [key, _] : cfg.items()) {
    const auto& known = config_keys();
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      std::string best;
      int best_d = 1 << 30;
      for (const auto& k : known) {
        const int d = detail::edit_distance(key, k);
        if (d < best_d) {
          best_d = d;
          best = k;
        }
      }
      throw ConfigError("config: unknown key \"" + key + "\" (did you mean \"" + best + "\"?)");
    }
  }
  if (!cfg.contains("command")) throw ConfigError("config: missing \"command\"");
  const std::string command = cfg.at("command").get<std::string>();
  static const std::vector<std::string> commands = {"tension", "sweep-eps", "sweep-s",
                                                   "profile", "check", "export"};
  if (std::find(commands.begin(), commands.end(), command) == commands.end())
    throw ConfigError("config: unknown command \"" + command + "\"");

  auto require_range = [&](const char* field, double lo, double hi, bool lo_strict,
                           bool hi_strict) {
    if (!cfg.contains(field)) return;
    if (!cfg.at(field).is_number())
      throw ConfigError(std::string("config: \"") + field + "\" must be a number");
    const double v = cfg.at(field).get<double>();
    const bool lo_ok = lo_strict ? v > lo : v >= lo;
    const bool hi_ok = hi_strict ? v < hi : v <= hi;
    if (!lo_ok || !hi_ok)
      throw ConfigError(std::string("config: \"") + field + "\" out of range");
  };
  require_range("s", 0.0, 1.0, false, true);
  require_range("delta", 0.0, 1e30, true, false);
  require_range("eps", 0.0, 1.0, true, false);
  require_range("eta", 0.0, 0.5, true, true);
  require_range("r", 0.0, 1e30, true, false);
  require_range("potential_scale", 0.0, 1e30, true, false);
  if (cfg.contains("k") && (!cfg.at("k").is_number_integer() || cfg.at("k").get<int>() < 0))
    throw ConfigError("config: \"k\" must be an integer >= 0");
  if (cfg.contains("n") && (!cfg.at("n").is_number_integer() || cfg.at("n").get<int>() < 8))
    throw ConfigError("config: \"n\" must be an integer >= 8");
  if (cfg.contains("threads") &&
      (!cfg.at("threads").is_number_integer() || cfg.at("threads").get<int>() < 1))
    throw ConfigError("config: \"threads\" must be an integer >= 1");
  for (const char* list : {"eps_list", "s_list"}) {
    if (!cfg.contains(list)) continue;
    if (!cfg.at(list).is_array() || cfg.at(list).empty())
      throw ConfigError(std::string("config: \"") + list + "\" must be a nonempty array");
    for (const auto& v : cfg.at(list)) {
      if (!v.is_number() || !(v.get<double>() > 0.0))
        throw ConfigError(std::string("config: \"") + list + "\" entries must be positive numbers");
    }
  }

  // Defaults.
  if (!cfg.contains("potential")) cfg["potential"] = "quartic";
  if (!cfg.contains("output_dir")) cfg["output_dir"] = ".";
  if (!cfg.contains("cache_dir")) cfg["cache_dir"] = "";
  if (!cfg.contains("threads")) cfg["threads"] = 1;
  if (!cfg.contains("seed")) cfg["seed"] = 0;
  if (!cfg.contains("use_cache")) cfg["use_cache"] = true;
  if (!cfg.contains("delta")) cfg["delta"] = 1.0;

  const std::string pot = cfg.at("potential").get<std::string>();
  if (pot != "quartic" && pot != "truncated_quadratic")
    throw ConfigError("config: \"potential\" must be quartic or truncated_quadratic");

  return RunConfig{command, std::move(cfg)};
}

inline RunConfig load_config(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  json parsed;
  try {
    parsed = json::parse(text);
  } catch (const json::parse_error& e) {
    // nlohmann reports a byte offset; convert to line/column.
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError("config: parse error at line " + std::to_string(line) + ", column " +
                      std::to_string(col) + ": " + e.what());
  }
  return validate_config(std::move(parsed));
}

}  // namespace tensionlab
