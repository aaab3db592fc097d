#include "nhzbw/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace nhzbw {

namespace {

std::string trim(const std::string& s) {
  auto b = std::find_if_not(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
  auto e = std::find_if_not(s.rbegin(), s.rend(), [](unsigned char c) { return std::isspace(c); });
  if (b >= e.base()) return {};
  return std::string(b, e.base());
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

const std::string* KeyValues::find(const std::string& key) const {
  for (const auto& [k, v] : entries)
    if (k == key) return &v;
  return nullptr;
}

KeyValues parse_key_values(const std::string& text, const std::filesystem::path& source) {
  KeyValues kv;
  kv.source = source;
  std::istringstream in(text);
  std::string line;
  int lineNo = 0;
  std::set<std::string> seen;
  const std::string where = source.empty() ? std::string("<config>") : source.string();
  while (std::getline(in, line)) {
    ++lineNo;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(where + ":" + std::to_string(lineNo) + ": expected 'key = value', got '" +
                        line + "'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError(where + ":" + std::to_string(lineNo) + ": empty key or value in '" + line +
                        "'");
    if (!seen.insert(key).second)
      throw ConfigError(where + ":" + std::to_string(lineNo) + ": duplicate key '" + key + "'");
    kv.entries.emplace_back(std::move(key), std::move(value));
  }
  return kv;
}

KeyValues read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_key_values(ss.str(), path);
}

double parse_number(const std::string& token, const std::string& context) {
  double value = 0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value, std::chars_format::general);
  if (ec != std::errc() || ptr != last || first == last || !std::isfinite(value))
    throw ConfigError("invalid number '" + token + "' for " + context);
  return value;
}

ModelSpec<double> model_from_key_values(const KeyValues& kv) {
  const std::string* name = kv.find("model");
  if (!name) throw ConfigError("missing key 'model' in " + kv.source.string());
  ModelSpec<double> m;
  std::vector<std::pair<std::string, double*>> allowed;
  if (*name == "dirac") {
    m = ModelSpec<double>::dirac(-1.0);
    allowed = {{"kappa", &m.kappa}};
  } else if (*name == "polariton") {
    m = ModelSpec<double>::polariton();
    allowed = {{"E0", &m.E0},       {"gamma0", &m.gamma0}, {"gamma2", &m.gamma2},
               {"gamma4", &m.gamma4}, {"kinetic", &m.kinetic}, {"alpha", &m.alpha},
               {"a", &m.a},         {"beta", &m.beta},     {"b", &m.b},
               {"Delta", &m.Delta}};
  } else {
    throw ConfigError("unknown model '" + *name + "'");
  }
  for (const auto& [key, value] : kv.entries) {
    if (key == "model") continue;
    auto it = std::find_if(allowed.begin(), allowed.end(),
                           [&](const auto& p) { return p.first == key; });
    if (it == allowed.end())
      throw ConfigError("unknown key '" + key + "' for model '" + *name + "'");
    *it->second = parse_number(value, "key '" + key + "'");
  }
  return m;
}

ModelSpec<double> load_model(const std::filesystem::path& path) {
  return model_from_key_values(read_key_values(path));
}

std::map<std::string, std::string> describe_model(const ModelSpec<double>& m) {
  if (m.kind == ModelKind::Dirac) return {{"model", "dirac"}, {"kappa", format_double(m.kappa)}};
  return {{"model", "polariton"},
          {"E0", format_double(m.E0)},
          {"gamma0", format_double(m.gamma0)},
          {"gamma2", format_double(m.gamma2)},
          {"gamma4", format_double(m.gamma4)},
          {"kinetic", format_double(m.kinetic)},
          {"alpha", format_double(m.alpha)},
          {"a", format_double(m.a)},
          {"beta", format_double(m.beta)},
          {"b", format_double(m.b)},
          {"Delta", format_double(m.Delta)}};
}

}  // namespace nhzbw
