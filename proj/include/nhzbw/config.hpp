#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "nhzbw/model.hpp"

namespace nhzbw {

/// Malformed or unknown input; the message names the offending token.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ordered `key = value` pairs from a config file.
struct KeyValues {
  std::vector<std::pair<std::string, std::string>> entries;
  std::filesystem::path source;

  const std::string* find(const std::string& key) const;
};

/// Parses `key = value` lines; `#` starts a comment; duplicate keys are errors.
KeyValues parse_key_values(const std::string& text, const std::filesystem::path& source = {});
KeyValues read_key_values(const std::filesystem::path& path);

/// Strict decimal/exponent parse of the whole token.
double parse_number(const std::string& token, const std::string& context);

ModelSpec<double> model_from_key_values(const KeyValues& kv);
ModelSpec<double> load_model(const std::filesystem::path& path);

/// Ordered echo of every model parameter, for manifests.
std::map<std::string, std::string> describe_model(const ModelSpec<double>& m);

}  // namespace nhzbw
