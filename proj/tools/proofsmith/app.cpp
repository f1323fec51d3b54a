#include "app.hpp"

#include <charconv>
#include <filesystem>

#include "proofsmith/errors.hpp"
#include "proofsmith/http_backend.hpp"
#include "proofsmith/mock_backend.hpp"
#include "proofsmith/subprocess_verifier.hpp"
#include "proofsmith/toy_system.hpp"

namespace proofsmith::cli {

void add_common_options(CLI::App& cmd, CommonOptions& opts) {
  cmd.add_option("--config", opts.config_file, "TOML-like settings file");
  cmd.add_option("--set", opts.set, "override a setting, key=value (repeatable)");
  cmd.add_flag("--dry-run", opts.dry_run, "print the resolved plan and exit without backend calls");
}

Config resolve_config(const CommonOptions& opts) {
  Config cfg;
  if (!opts.config_file.empty()) cfg.load_file(opts.config_file);
  cfg.load_env();
  for (const auto& s : opts.set) cfg.set_assignment(s, "--set");
  return cfg;
}

std::string default_of(const std::string& key) {
  for (const auto& k : config_schema()) {
    if (k.key == key) return k.default_value;
  }
  return {};
}

TemplateRegistry load_templates(const Config& cfg) {
  TemplateRegistry t = TemplateRegistry::builtin();
  if (const auto& dir = cfg.get("prompts.dir"); !dir.empty()) t.load_directory(dir);
  return t;
}

std::shared_ptr<ProverBackend> make_prover_backend(const Config& cfg) {
  std::string kind = cfg.get("prover.backend");
  if (kind == "auto") kind = !cfg.get("prover.mock_script").empty() ? "mock" : "http";
  if (kind == "mock") {
    const auto& script = cfg.get("prover.mock_script");
    if (script.empty()) throw ConfigError("prover.backend=mock needs prover.mock_script");
    if (!std::filesystem::exists(script)) throw ConfigError("mock script not found: " + script);
    return MockBackend::from_file(script);
  }
  if (kind == "http") {
    if (cfg.get("prover.url").empty()) {
      throw ConfigError("no prover backend configured: set prover.mock_script, or PROVER_URL for HTTP");
    }
    HttpBackendOptions o;
    o.url = cfg.get("prover.url");
    o.token = cfg.get("prover.token");
    o.model = cfg.get("prover.model");
    return std::make_shared<HttpBackend>(o);
  }
  throw ConfigError("unknown prover.backend '" + kind + "'");
}

std::unique_ptr<Verifier> make_verifier(const Config& cfg) {
  std::string kind = cfg.get("verifier.backend");
  if (kind == "auto") kind = cfg.get("verifier.command").empty() ? "toy" : "subprocess";
  if (kind == "toy") return std::make_unique<toy::ToyVerifier>();
  if (kind == "subprocess") {
    SubprocessOptions o;
    o.command = cfg.get("verifier.command");
    o.pool_size = static_cast<int>(cfg.get_int("verifier.pool"));
    return std::make_unique<SubprocessVerifier>(o);
  }
  throw ConfigError("unknown verifier.backend '" + kind + "'");
}

RetryPolicy retry_policy(const Config& cfg) {
  RetryPolicy r;
  r.max_retries = static_cast<int>(cfg.get_int("prover.max_retries"));
  return r;
}

ProveConfig prove_config(const Config& cfg) {
  ProveConfig p;
  p.n_samples = static_cast<int>(cfg.get_int("run.n"));
  p.max_rounds = static_cast<int>(cfg.get_int("run.rounds"));
  p.budgets.first_round_tokens = static_cast<int>(cfg.get_int("run.tokens_first"));
  p.budgets.total_tokens = static_cast<int>(cfg.get_int("run.tokens_total"));
  p.flags.include_error_messages = cfg.get_bool("run.error_messages");
  p.flags.include_prior_cot = cfg.get_bool("run.prior_cot");
  p.flags.all_prior_rounds = cfg.get_bool("run.all_prior_rounds");
  p.run_seed = static_cast<std::uint64_t>(cfg.get_int("run.seed"));
  p.temperature = cfg.get_double("run.temperature");
  p.model = cfg.get("prover.model");
  p.initial_template = cfg.get("prover.initial_template");
  p.correction_template = cfg.get("prover.correction_template");
  p.verify.timeout = std::chrono::milliseconds(cfg.get_int("verifier.timeout_ms"));
  p.verify_retries = static_cast<int>(cfg.get_int("verifier.retries"));
  p.max_generations = static_cast<int>(cfg.get_int("run.max_generations"));
  p.max_verifications = static_cast<int>(cfg.get_int("run.max_verifications"));
  return p;
}

SynthesisOptions synthesis_options(const Config& cfg) {
  SynthesisOptions s;
  s.formalizations = static_cast<int>(cfg.get_int("synthesis.formalizations"));
  s.faithfulness_votes = static_cast<int>(cfg.get_int("synthesis.faithfulness_votes"));
  s.gate_votes = static_cast<int>(cfg.get_int("synthesis.gate_votes"));
  s.judge_max_tokens = static_cast<int>(cfg.get_int("synthesis.judge_max_tokens"));
  s.max_tokens = static_cast<int>(cfg.get_int("synthesis.max_tokens"));
  s.seed = static_cast<std::uint64_t>(cfg.get_int("run.seed"));
  s.workers = static_cast<int>(cfg.get_int("run.max_generations"));
  s.verify.timeout = std::chrono::milliseconds(cfg.get_int("verifier.timeout_ms"));
  return s;
}

std::string call_count(const ProverBackend& backend) {
  if (const auto* mock = dynamic_cast<const MockBackend*>(&backend)) return std::to_string(mock->calls());
  return "n/a";
}

std::vector<long long> parse_int_list(const std::string& text) {
  std::vector<long long> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = std::min(text.find(',', start), text.size());
    const std::string item = text.substr(start, comma - start);
    long long v = 0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || res.ec != std::errc() || res.ptr != item.data() + item.size()) {
      throw ConfigError("expected a comma-separated list of integers, got '" + text + "'");
    }
    out.push_back(v);
    start = comma + 1;
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = std::min(text.find(',', start), text.size());
    const std::string item = text.substr(start, comma - start);
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || end != item.c_str() + item.size()) {
      throw ConfigError("expected a comma-separated list of numbers, got '" + text + "'");
    }
    out.push_back(v);
    start = comma + 1;
  }
  return out;
}

}  // namespace proofsmith::cli
