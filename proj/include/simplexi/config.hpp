#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "simplexi/snapshot.hpp"

namespace simplexi {

/// A missing or malformed command-line / config-file parameter.
class UsageError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

/// Resolved parameters for one CLI command. Precedence, lowest first:
/// config file, --key=value flags, SIMPLEXI_SEED (seed only).
struct RunConfig {
  std::string command;
  KeyValues values;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir;

  bool has(const std::string& key) const { return values.count(key) != 0; }
  std::string get(const std::string& key, const std::string& fallback) const;
  std::string require(const std::string& key) const;

  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::int64_t require_int(const std::string& key) const;
  /// Accepts plain decimals and "a/b" fractions (p=1/500).
  double get_double(const std::string& key, double fallback) const;
  double require_double(const std::string& key) const;
  bool get_bool(const std::string& key, bool fallback) const;
  /// Comma-separated list; empty when the key is absent.
  std::vector<std::string> get_list(const std::string& key) const;
};

std::int64_t parse_int(const std::string& key, const std::string& text);
double parse_number(const std::string& key, const std::string& text);
std::uint64_t parse_seed(const std::string& text);

/// "key=value" -> (key, value); a leading "--" is stripped.
std::pair<std::string, std::string> parse_override(const std::string& arg);

RunConfig resolve_config(const std::string& command, const std::optional<std::filesystem::path>& file,
                         const std::vector<std::string>& overrides,
                         const std::optional<std::string>& env_seed);

/// manifest.txt in out_dir: the resolved config, `extra` (timings, output
/// names) and a UTC timestamp. The only file a run writes that varies
/// between identical invocations.
void write_manifest(const RunConfig& cfg, const KeyValues& extra);

}  // namespace simplexi
