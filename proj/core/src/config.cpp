#include "proofsmith/config.hpp"

#include <charconv>
#include <cstdlib>

#include "proofsmith/errors.hpp"
#include "text_util.hpp"

namespace proofsmith {

const std::vector<ConfigKey>& config_schema() {
  static const std::vector<ConfigKey> schema = {
      {"run.n", ValueType::kInt, "32", "samples per statement"},
      {"run.rounds", ValueType::kInt, "2", "self-correction rounds after the first attempt"},
      {"run.tokens_first", ValueType::kInt, "30000", "max completion tokens of the first attempt"},
      {"run.tokens_total", ValueType::kInt, "40000", "completion tokens per sample across all rounds"},
      {"run.token_budget", ValueType::kInt, "0", "completion tokens for the whole run (0 = unlimited)"},
      {"run.error_messages", ValueType::kBool, "true", "show verifier diagnostics in correction prompts"},
      {"run.prior_cot", ValueType::kBool, "true", "show earlier reasoning in correction prompts"},
      {"run.all_prior_rounds", ValueType::kBool, "true", "show every earlier round, not just the latest"},
      {"run.seed", ValueType::kInt, "0", "run seed for per-sample seeds"},
      {"run.temperature", ValueType::kDouble, "1.0", "sampling temperature"},
      {"run.max_generations", ValueType::kInt, "8", "concurrent generation requests"},
      {"run.max_verifications", ValueType::kInt, "16", "concurrent verifications"},
      {"prover.backend", ValueType::kString, "auto", "mock, http, or auto (mock if a script is set, else http)"},
      {"prover.mock_script", ValueType::kString, "", "JSON-lines script for the mock backend"},
      {"prover.url", ValueType::kString, "", "chat completion endpoint"},
      {"prover.token", ValueType::kString, "", "bearer token"},
      {"prover.model", ValueType::kString, "", "model name sent to the endpoint"},
      {"prover.max_retries", ValueType::kInt, "3", "retries after a transient backend failure"},
      {"prover.initial_template", ValueType::kString, "prover_initial", "template of first attempts"},
      {"prover.correction_template", ValueType::kString, "prover_correction", "template of correction rounds"},
      {"prompts.dir", ValueType::kString, "", "directory of <id>.txt templates overriding the built-in ones"},
      {"verifier.backend", ValueType::kString, "auto", "toy, subprocess, or auto (subprocess if a command is set)"},
      {"verifier.command", ValueType::kString, "", "verifier process command line"},
      {"verifier.pool", ValueType::kInt, "1", "verifier processes"},
      {"verifier.timeout_ms", ValueType::kInt, "60000", "time limit per verification"},
      {"verifier.retries", ValueType::kInt, "2", "retries when the verifier process dies"},
      {"sft.k", ValueType::kInt, "2", "max proofs kept per statement"},
      {"synthesis.formalizations", ValueType::kInt, "2", "formalization attempts per informal statement"},
      {"synthesis.faithfulness_votes", ValueType::kInt, "3", "faithfulness judge queries per formalization"},
      {"synthesis.gate_votes", ValueType::kInt, "4", "correctness/simplicity judge queries"},
      {"synthesis.judge_max_tokens", ValueType::kInt, "4096", "max tokens per judge call"},
      {"synthesis.max_tokens", ValueType::kInt, "30000", "max tokens per solve/variant/formalize call"},
  };
  return schema;
}

namespace {

const ConfigKey* find_key(const std::string& key) {
  for (const auto& k : config_schema()) {
    if (k.key == key) return &k;
  }
  return nullptr;
}

bool valid_value(ValueType type, const std::string& v) {
  switch (type) {
    case ValueType::kString: return true;
    case ValueType::kBool: {
      bool b;
      return parse_bool(v, &b);
    }
    case ValueType::kInt: {
      long long x;
      const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
      return !v.empty() && res.ec == std::errc() && res.ptr == v.data() + v.size();
    }
    case ValueType::kDouble: {
      char* end = nullptr;
      std::strtod(v.c_str(), &end);
      return !v.empty() && end == v.c_str() + v.size();
    }
  }
  return false;
}

std::string unquote(std::string v) {
  if (v.size() >= 2 && ((v.front() == '"' && v.back() == '"') || (v.front() == '\'' && v.back() == '\''))) {
    return v.substr(1, v.size() - 2);
  }
  return v;
}

}  // namespace

bool parse_bool(std::string_view text, bool* out) {
  const std::string t = detail::to_lower(std::string(text));
  if (t == "true" || t == "1" || t == "yes" || t == "on") {
    *out = true;
    return true;
  }
  if (t == "false" || t == "0" || t == "no" || t == "off") {
    *out = false;
    return true;
  }
  return false;
}

Config::Config() {
  for (const auto& k : config_schema()) {
    values_[k.key] = k.default_value;
    origins_[k.key] = "default";
  }
}

void Config::set(const std::string& key, const std::string& value, const std::string& origin) {
  const ConfigKey* k = find_key(key);
  if (!k) throw ConfigError(origin + ": unknown setting '" + key + "'");
  if (!valid_value(k->type, value)) throw ConfigError(origin + ": invalid value '" + value + "' for " + key);
  values_[key] = value;
  origins_[key] = origin;
}

void Config::set_assignment(const std::string& assignment, const std::string& origin) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError(origin + ": expected key=value, got '" + assignment + "'");
  set(detail::trim(assignment.substr(0, eq)), unquote(detail::trim(assignment.substr(eq + 1))), origin);
}

void Config::load_text(std::string_view text, std::string_view origin) {
  std::string section;
  int line_no = 0;
  for (const auto& raw : detail::split(text, '\n')) {
    ++line_no;
    std::string line = raw;
    // A '#' starts a comment unless it sits inside quotes.
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line.erase(i);
        break;
      }
    }
    line = detail::trim(line);
    if (line.empty()) continue;
    const std::string where = std::string(origin) + ":" + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": unterminated section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    std::string key = detail::trim(line.substr(0, eq));
    if (!section.empty()) key = section + "." + key;
    set(key, unquote(detail::trim(line.substr(eq + 1))), where);
  }
}

void Config::load_file(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  load_text(text, path.string());
}

void Config::load_env() {
  static const std::pair<const char*, const char*> kVars[] = {
      {"PROVER_URL", "prover.url"},       {"PROVER_TOKEN", "prover.token"}, {"PROVER_MODEL", "prover.model"},
      {"VERIFIER_CMD", "verifier.command"}, {"RUN_SEED", "run.seed"},
  };
  for (const auto& [var, key] : kVars) {
    if (const char* v = std::getenv(var); v && *v) set(key, v, std::string("env ") + var);
  }
}

void Config::load_json(const Json& j, const std::string& origin) {
  for (const auto& [section, entries] : j.items()) {
    if (!entries.is_object()) continue;
    for (const auto& [name, value] : entries.items()) {
      const std::string key = section + "." + name;
      if (key == "prover.token" && value == "***") continue;
      set(key, value.is_string() ? value.get<std::string>() : value.dump(), origin);
    }
  }
}

const std::string& Config::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown setting '" + key + "'");
  return it->second;
}

long long Config::get_int(const std::string& key) const { return std::stoll(get(key)); }

bool Config::get_bool(const std::string& key) const {
  bool b = false;
  parse_bool(get(key), &b);
  return b;
}

double Config::get_double(const std::string& key) const { return std::strtod(get(key).c_str(), nullptr); }

const std::string& Config::origin(const std::string& key) const {
  const auto it = origins_.find(key);
  if (it == origins_.end()) throw ConfigError("unknown setting '" + key + "'");
  return it->second;
}

OrderedJson Config::to_json(bool redact_secrets) const {
  OrderedJson j = OrderedJson::object();
  for (const auto& k : config_schema()) {
    const auto dot = k.key.find('.');
    const std::string section = k.key.substr(0, dot);
    const std::string name = k.key.substr(dot + 1);
    const std::string& v = values_.at(k.key);
    OrderedJson value;
    switch (k.type) {
      case ValueType::kString: value = v; break;
      case ValueType::kInt: value = get_int(k.key); break;
      case ValueType::kBool: value = get_bool(k.key); break;
      case ValueType::kDouble: value = get_double(k.key); break;
    }
    if (redact_secrets && k.key == "prover.token" && !v.empty()) value = "***";
    j[section][name] = value;
  }
  return j;
}

std::string Config::describe() const {
  std::string out;
  for (const auto& k : config_schema()) {
    std::string v = values_.at(k.key);
    if (k.key == "prover.token" && !v.empty()) v = "***";
    out += k.key + " = " + v + "  (" + origins_.at(k.key) + ")\n";
  }
  return out;
}

}  // namespace proofsmith
