#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace fanlab::cli {

using json = nlohmann::json;

// Bad configuration: unknown key, wrong type, out-of-range value. Exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct KeySpec {
  std::string name;
  json fallback;
  std::string help;
};

const std::vector<std::string>& commands();

// Every key a command accepts, with its default. Throws ConfigError for an
// unknown command.
const std::vector<KeySpec>& schema(const std::string& command);

// Defaults, then the JSON file (if any), then `overrides` (flag text parsed
// against the default's type). Unknown keys in either source are errors.
json resolve_config(const std::string& command, const std::optional<std::string>& config_path,
                    const std::map<std::string, std::string>& overrides);

// Typed accessors that turn a type mismatch into ConfigError.
double get_double(const json& cfg, const std::string& key);
std::int64_t get_int(const json& cfg, const std::string& key, std::int64_t min_value);
bool get_bool(const json& cfg, const std::string& key);
std::string get_string(const json& cfg, const std::string& key);
std::vector<double> get_double_list(const json& cfg, const std::string& key);
std::vector<std::int64_t> get_int_list(const json& cfg, const std::string& key, std::int64_t min_value);

}  // namespace fanlab::cli
