#include "fanlab/cli/config.hpp"

#include <fstream>
#include <sstream>

namespace fanlab::cli {

namespace {

std::vector<KeySpec> with_common(std::vector<KeySpec> keys) {
  keys.push_back({"out", "out", "output directory"});
  keys.push_back({"plot", false, "also write SVG plots"});
  keys.push_back({"workers", 0, "worker threads (0: all hardware threads)"});
  return keys;
}

const std::map<std::string, std::vector<KeySpec>>& table() {
  static const std::map<std::string, std::vector<KeySpec>> t = {
      {"simulate",
       with_common({
           {"lambda", 1.0, "density left of the origin"},
           {"rho", 0.0, "density right of the origin"},
           {"t", 64.0, "final time"},
           {"seed", 7, "base seed"},
           {"replicas", 1, "independent runs"},
           {"window", 0, "half-width L of the window (0: 3t)"},
       })},
      {"coupling-verify",
       with_common({
           {"lambda", 0.7, "density of the initial height left of 0"},
           {"rho", 0.3, "density right of 0"},
           {"times", json::array({1.0, 5.0, 20.0}), "query times, nondecreasing"},
           {"window", 200, "half-width L of the initial height"},
           {"seeds", 10, "number of seeds"},
           {"seed", 1, "base seed"},
       })},
      {"lpp-shape",
       with_common({
           {"n", json::array({200}), "diagonal lengths"},
           {"thetas", json::array({0.25, 0.5}), "directions theta in (0, 1)"},
           {"replicas", 20, "replicas per row"},
           {"seed", 1, "base seed"},
           {"strict", false, "exit 3 if the one-sided bound or the envelope fails"},
       })},
      {"hydro-check",
       with_common({
           {"lambda", 0.8, "density left of the origin"},
           {"rho", 0.2, "density right of the origin"},
           {"n", 256, "scale; the comparison covers |y| <= 4n"},
           {"t_multiplier", 1.0, "t = t_multiplier * n; 0 or in (1/2, 2]"},
           {"replicas", 4, "independent runs"},
           {"seed", 1, "base seed"},
           {"eps1", 0.05, "reporting exponent: deviations are divided by t^(1 - eps1)"},
           {"profile_points", 201, "points in the profile dump"},
           {"grid_step", 1e-3, "grid step of the Hopf-Lax evaluator (relative to t)"},
           {"strict", false, "exit 3 if a normalized deviation exceeds 1"},
       })},
      {"sll",
       with_common({
           {"lambda", 1.0, "density left of the origin"},
           {"rho", 0.0, "density right of the origin"},
           {"m", 16, "dyadic subdivision, a power of two >= 16"},
           {"n_min", 4, "smallest dyadic scale"},
           {"n_max", 7, "largest dyadic scale; the horizon is 2^(n_max + 1)"},
           {"replicas", 50, "independent runs"},
           {"seed", 1, "base seed"},
           {"beta", 0.9, "oscillation exponent"},
           {"ks_threshold", 0.2, "pass threshold for the KS distance at the horizon"},
           {"strict", false, "exit 3 if the KS check fails"},
       })},
  };
  return t;
}

json parse_flag(const KeySpec& spec, const std::string& text) {
  const json& d = spec.fallback;
  try {
    if (d.is_string()) return text;
    if (d.is_boolean()) {
      if (text == "true" || text == "1") return true;
      if (text == "false" || text == "0") return false;
      throw ConfigError("");
    }
    json v = json::parse(text);
    if (d.is_array() && !v.is_array()) v = json::array({v});
    return v;
  } catch (const std::exception&) {
    throw ConfigError("cannot parse value '" + text + "' for key '" + spec.name + "'");
  }
}

void check_type(const KeySpec& spec, const json& v) {
  const json& d = spec.fallback;
  const bool ok = (d.is_number() && v.is_number()) || (d.is_boolean() && v.is_boolean()) ||
                  (d.is_string() && v.is_string()) || (d.is_array() && v.is_array());
  if (!ok) throw ConfigError("key '" + spec.name + "' has the wrong type (expected like " + d.dump() + ")");
}

const KeySpec& find_key(const std::string& command, const std::string& key) {
  for (const auto& k : schema(command)) {
    if (k.name == key) return k;
  }
  throw ConfigError("unknown key '" + key + "' for command '" + command + "'");
}

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [name, keys] : table()) v.push_back(name);
    return v;
  }();
  return names;
}

const std::vector<KeySpec>& schema(const std::string& command) {
  const auto it = table().find(command);
  if (it == table().end()) throw ConfigError("unknown command '" + command + "'");
  return it->second;
}

json resolve_config(const std::string& command, const std::optional<std::string>& config_path,
                    const std::map<std::string, std::string>& overrides) {
  json cfg = json::object();
  for (const auto& k : schema(command)) cfg[k.name] = k.fallback;

  if (config_path) {
    std::ifstream in(*config_path);
    if (!in) throw ConfigError("cannot open config file " + *config_path);
    json file;
    try {
      file = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("config file " + *config_path + " is not valid JSON: " + e.what());
    }
    if (!file.is_object()) throw ConfigError("config file must hold a JSON object");
    for (const auto& [key, value] : file.items()) {
      const KeySpec& spec = find_key(command, key);
      check_type(spec, value);
      cfg[key] = value;
    }
  }
  for (const auto& [key, text] : overrides) {
    const KeySpec& spec = find_key(command, key);
    json v = parse_flag(spec, text);
    check_type(spec, v);
    cfg[key] = std::move(v);
  }
  return cfg;
}

double get_double(const json& cfg, const std::string& key) {
  const json& v = cfg.at(key);
  if (!v.is_number()) throw ConfigError("key '" + key + "' must be a number");
  return v.get<double>();
}

std::int64_t get_int(const json& cfg, const std::string& key, std::int64_t min_value) {
  const json& v = cfg.at(key);
  if (!v.is_number_integer()) throw ConfigError("key '" + key + "' must be an integer");
  const auto x = v.get<std::int64_t>();
  if (x < min_value) throw ConfigError("key '" + key + "' must be >= " + std::to_string(min_value));
  return x;
}

bool get_bool(const json& cfg, const std::string& key) {
  const json& v = cfg.at(key);
  if (!v.is_boolean()) throw ConfigError("key '" + key + "' must be true or false");
  return v.get<bool>();
}

std::string get_string(const json& cfg, const std::string& key) {
  const json& v = cfg.at(key);
  if (!v.is_string()) throw ConfigError("key '" + key + "' must be a string");
  return v.get<std::string>();
}

std::vector<double> get_double_list(const json& cfg, const std::string& key) {
  const json& v = cfg.at(key);
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError("key '" + key + "' must be a list of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<std::int64_t> get_int_list(const json& cfg, const std::string& key, std::int64_t min_value) {
  const json& v = cfg.at(key);
  std::vector<std::int64_t> out;
  for (const auto& e : v) {
    if (!e.is_number_integer()) throw ConfigError("key '" + key + "' must be a list of integers");
    const auto x = e.get<std::int64_t>();
    if (x < min_value) throw ConfigError("key '" + key + "' entries must be >= " + std::to_string(min_value));
    out.push_back(x);
  }
  return out;
}

}  // namespace fanlab::cli
