#pragma once

// Layered settings: defaults < config file < environment < flags.
//
// Config files are TOML-like:
//
//   [run]
//   n = 32
//   rounds = 2
//   [prover]
//   url = "http://localhost:8000/v1/chat/completions"
//
// Every key is `section.name`; unknown keys are errors.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "proofsmith/io.hpp"

namespace proofsmith {

enum class ValueType { kString, kInt, kBool, kDouble };

struct ConfigKey {
  std::string key;
  ValueType type;
  std::string default_value;
  std::string help;
};

// The full key table.
const std::vector<ConfigKey>& config_schema();

class Config {
 public:
  // Starts from the schema defaults.
  Config();

  // Throws ConfigError on unreadable files, syntax errors, unknown keys.
  void load_file(const std::filesystem::path& path);
  void load_text(std::string_view text, std::string_view origin);
  // PROVER_URL, PROVER_TOKEN, PROVER_MODEL, VERIFIER_CMD, RUN_SEED.
  void load_env();
  // Throws ConfigError for unknown keys or values of the wrong type.
  void set(const std::string& key, const std::string& value, const std::string& origin);
  // `key=value`.
  void set_assignment(const std::string& assignment, const std::string& origin);
  // Restores settings serialized by to_json.
  void load_json(const Json& j, const std::string& origin);

  const std::string& get(const std::string& key) const;
  std::string get_string(const std::string& key) const { return get(key); }
  long long get_int(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  double get_double(const std::string& key) const;
  const std::string& origin(const std::string& key) const;

  // Nested by section with typed values; secrets are redacted.
  OrderedJson to_json(bool redact_secrets = true) const;
  // One `key = value  (origin)` line per key.
  std::string describe() const;

 private:
  std::map<std::string, std::string> values_;
  std::map<std::string, std::string> origins_;
};

bool parse_bool(std::string_view text, bool* out);

}  // namespace proofsmith
