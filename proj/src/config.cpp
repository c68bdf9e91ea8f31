#include "simplexi/config.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

#include "simplexi/report.hpp"

namespace simplexi {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::int64_t parse_int(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw UsageError(key + ": expected an integer, got '" + text + "'");
  return v;
}

double parse_number(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  const auto slash = t.find('/');
  auto one = [&](const std::string& part) {
    double v = 0;
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc() || ptr != part.data() + part.size() || part.empty())
      throw UsageError(key + ": expected a number, got '" + text + "'");
    return v;
  };
  if (slash == std::string::npos) return one(t);
  const double den = one(trim(t.substr(slash + 1)));
  if (den == 0) throw UsageError(key + ": zero denominator in '" + text + "'");
  return one(trim(t.substr(0, slash))) / den;
}

std::uint64_t parse_seed(const std::string& text) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw UsageError("seed: expected a nonnegative integer, got '" + text + "'");
  return v;
}

std::pair<std::string, std::string> parse_override(const std::string& arg) {
  std::string s = arg;
  if (s.rfind("--", 0) == 0) s = s.substr(2);
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0) throw UsageError("expected --key=value, got '" + arg + "'");
  return {trim(s.substr(0, eq)), trim(s.substr(eq + 1))};
}

std::string RunConfig::get(const std::string& key, const std::string& fallback) const {
  const auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

std::string RunConfig::require(const std::string& key) const {
  const auto it = values.find(key);
  if (it == values.end() || it->second.empty())
    throw UsageError(command + ": missing required parameter '" + key + "'");
  return it->second;
}

std::int64_t RunConfig::get_int(const std::string& key, std::int64_t fallback) const {
  return has(key) ? parse_int(key, values.at(key)) : fallback;
}

std::int64_t RunConfig::require_int(const std::string& key) const { return parse_int(key, require(key)); }

double RunConfig::get_double(const std::string& key, double fallback) const {
  return has(key) ? parse_number(key, values.at(key)) : fallback;
}

double RunConfig::require_double(const std::string& key) const {
  return parse_number(key, require(key));
}

bool RunConfig::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string v = values.at(key);
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw UsageError(key + ": expected a boolean, got '" + v + "'");
}

std::vector<std::string> RunConfig::get_list(const std::string& key) const {
  std::vector<std::string> out;
  if (!has(key)) return out;
  std::stringstream ss(values.at(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

RunConfig resolve_config(const std::string& command, const std::optional<std::filesystem::path>& file,
                         const std::vector<std::string>& overrides,
                         const std::optional<std::string>& env_seed) {
  RunConfig cfg;
  cfg.command = command;
  if (file) {
    std::ifstream in(*file);
    if (!in) throw UsageError("cannot read config file " + file->string());
    cfg.values = read_key_values(in);
  }
  for (const auto& arg : overrides) {
    auto [k, v] = parse_override(arg);
    cfg.values[k] = v;
  }
  if (env_seed && !env_seed->empty()) cfg.values["seed"] = *env_seed;
  cfg.seed = cfg.has("seed") ? parse_seed(cfg.values.at("seed")) : 0;
  cfg.values["seed"] = std::to_string(cfg.seed);
  cfg.out_dir = cfg.get("out", "out");
  cfg.values["out"] = cfg.out_dir.string();
  return cfg;
}

void write_manifest(const RunConfig& cfg, const KeyValues& extra) {
  std::ostringstream s;
  s << "# resolved configuration\n";
  s << "command=" << cfg.command << '\n';
  write_key_values(s, cfg.values);
  s << "# run record\n";
  write_key_values(s, extra);
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm);
  s << "timestamp=" << stamp << '\n';
  save_text(cfg.out_dir / "manifest.txt", s.str());
}

}  // namespace simplexi
