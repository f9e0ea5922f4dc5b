#pragma once

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "starpdd/baselines.hpp"
#include "starpdd/channel.hpp"
#include "starpdd/errors.hpp"
#include "starpdd/pdd.hpp"

namespace starpdd {

struct ExperimentConfig {
  SystemConfig system;
  PddOptions pdd;
  std::vector<SchemeId> schemes = all_schemes();
  bool schemes_set = false;
  std::vector<int> n_values = {10, 20, 30, 40};
  std::vector<int> k_values = {2, 4, 6};
  int realizations = 20;
  std::string out;
  int ao_amp_levels = 11;
  int ao_phase_levels = 16;
  int jobs = 1;

  void validate() const {
    system.validate();
    pdd.validate();
    if (schemes.empty()) {
      throw ConfigError("config: scheme list must not be empty");
    }
    if (n_values.empty()) {
      throw ConfigError("config: n_values must not be empty");
    }
    if (k_values.empty()) {
      throw ConfigError("config: k_values must not be empty");
    }
    for (int n : n_values) {
      if (n < 1) throw ConfigError("config: n_values entries must be >= 1");
    }
    for (int k : k_values) {
      if (k < 1 || k % 2 != 0) {
        throw ConfigError("config: k_values entries must be positive and even");
      }
    }
    if (realizations < 1) {
      throw ConfigError("config: realizations must be >= 1");
    }
    if (ao_amp_levels < 2 || ao_phase_levels < 2) {
      throw ConfigError("config: ao grid levels must be >= 2");
    }
    if (jobs < 1) throw ConfigError("config: jobs must be >= 1");
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] inline void config_fail(const std::string& origin, int line,
                                     const std::string& what) {
  throw ConfigError(origin + ":" + std::to_string(line) + ": " + what);
}

inline double parse_double(const std::string& v, const std::string& origin,
                           int line, const std::string& key) {
  const std::string t = trim(v);
  char* end = nullptr;
  const double x = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size()) {
    config_fail(origin, line, "value '" + v + "' for key '" + key +
                                  "' is not a number");
  }
  return x;
}

inline long long parse_int(const std::string& v, const std::string& origin,
                           int line, const std::string& key) {
  const std::string t = trim(v);
  char* end = nullptr;
  const long long x = std::strtoll(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size()) {
    config_fail(origin, line, "value '" + v + "' for key '" + key +
                                  "' is not an integer");
  }
  return x;
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(v);
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

}  // namespace detail

/// Parses the flat [system]/[pdd]/[experiment] key-value format. Unknown
/// sections or keys are rejected with file:line context; an empty input
/// yields the built-in defaults.
inline ExperimentConfig parse_config(const std::string& text,
                                     const std::string& origin = "<config>") {
  ExperimentConfig cfg;
  std::string section;
  std::stringstream stream(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(stream, raw)) {
    ++lineno;
    std::string line = raw;
    const size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        detail::config_fail(origin, lineno, "malformed section header");
      }
      section = detail::trim(line.substr(1, line.size() - 2));
      if (section != "system" && section != "pdd" && section != "experiment") {
        detail::config_fail(origin, lineno,
                            "unknown section [" + section + "]");
      }
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      detail::config_fail(origin, lineno, "expected 'key = value'");
    }
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (section.empty()) {
      detail::config_fail(origin, lineno,
                          "key '" + key + "' appears before any section");
    }

    if (section == "system") {
      if (key == "m") {
        cfg.system.m = static_cast<int>(
            detail::parse_int(value, origin, lineno, key));
      } else if (key == "n") {
        cfg.system.n = static_cast<int>(
            detail::parse_int(value, origin, lineno, key));
      } else if (key == "k") {
        cfg.system.k = static_cast<int>(
            detail::parse_int(value, origin, lineno, key));
      } else if (key == "pt_dbm") {
        cfg.system.pt_dbm = detail::parse_double(value, origin, lineno, key);
      } else if (key == "noise_dbm") {
        cfg.system.noise_dbm = detail::parse_double(value, origin, lineno, key);
      } else if (key == "rician_db") {
        cfg.system.rician_db = detail::parse_double(value, origin, lineno, key);
      } else if (key == "path_loss_exponent") {
        cfg.system.path_loss_exponent =
            detail::parse_double(value, origin, lineno, key);
      } else if (key == "pl0_db") {
        cfg.system.pl0_db = detail::parse_double(value, origin, lineno, key);
      } else if (key == "bs_distance_m") {
        cfg.system.bs_distance_m =
            detail::parse_double(value, origin, lineno, key);
      } else if (key == "bs_angle_deg") {
        cfg.system.bs_angle_deg =
            detail::parse_double(value, origin, lineno, key);
      } else if (key == "user_radius_m") {
        cfg.system.user_radius_m =
            detail::parse_double(value, origin, lineno, key);
      } else if (key == "seed") {
        cfg.system.seed = static_cast<std::uint64_t>(
            detail::parse_int(value, origin, lineno, key));
      } else {
        detail::config_fail(origin, lineno,
                            "unknown key '" + key + "' in section [system]");
      }
    } else if (section == "pdd") {
      if (key == "rho0") {
        cfg.pdd.rho0 = detail::parse_double(value, origin, lineno, key);
      } else if (key == "shrink") {
        cfg.pdd.c = detail::parse_double(value, origin, lineno, key);
      } else if (key == "eta0") {
        cfg.pdd.eta0 = detail::parse_double(value, origin, lineno, key);
      } else if (key == "delta_threshold") {
        cfg.pdd.delta_threshold =
            detail::parse_double(value, origin, lineno, key);
      } else if (key == "inner_tol") {
        cfg.pdd.inner_tol = detail::parse_double(value, origin, lineno, key);
      } else if (key == "inner_max") {
        cfg.pdd.inner_max = static_cast<int>(
            detail::parse_int(value, origin, lineno, key));
      } else if (key == "outer_max") {
        cfg.pdd.outer_max = static_cast<int>(
            detail::parse_int(value, origin, lineno, key));
      } else {
        detail::config_fail(origin, lineno,
                            "unknown key '" + key + "' in section [pdd]");
      }
    } else {
      if (key == "schemes") {
        cfg.schemes.clear();
        for (const std::string& name : detail::split_list(value)) {
          try {
            cfg.schemes.push_back(parse_scheme(name));
          } catch (const InvalidInputError& e) {
            detail::config_fail(origin, lineno, e.what());
          }
        }
        cfg.schemes_set = true;
      } else if (key == "n_values") {
        cfg.n_values.clear();
        for (const std::string& item : detail::split_list(value)) {
          cfg.n_values.push_back(static_cast<int>(
              detail::parse_int(item, origin, lineno, key)));
        }
      } else if (key == "k_values") {
        cfg.k_values.clear();
        for (const std::string& item : detail::split_list(value)) {
          cfg.k_values.push_back(static_cast<int>(
              detail::parse_int(item, origin, lineno, key)));
        }
      } else if (key == "realizations") {
        cfg.realizations = static_cast<int>(
            detail::parse_int(value, origin, lineno, key));
      } else if (key == "out") {
        cfg.out = value;
      } else if (key == "ao_amp_levels") {
        cfg.ao_amp_levels = static_cast<int>(
            detail::parse_int(value, origin, lineno, key));
      } else if (key == "ao_phase_levels") {
        cfg.ao_phase_levels = static_cast<int>(
            detail::parse_int(value, origin, lineno, key));
      } else if (key == "jobs") {
        cfg.jobs = static_cast<int>(
            detail::parse_int(value, origin, lineno, key));
      } else {
        detail::config_fail(
            origin, lineno, "unknown key '" + key + "' in section [experiment]");
      }
    }
  }
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open config file '" + path + "'");
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

}  // namespace starpdd
