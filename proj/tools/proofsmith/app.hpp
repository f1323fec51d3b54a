#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "proofsmith/config.hpp"
#include "proofsmith/pipeline.hpp"
#include "proofsmith/prompts.hpp"
#include "proofsmith/prover.hpp"
#include "proofsmith/synthesis.hpp"
#include "proofsmith/verifier.hpp"

namespace proofsmith::cli {

enum ExitCode { kOk = 0, kConfigError = 1, kPartialFailure = 2 };

// Options every subcommand accepts.
struct CommonOptions {
  std::string config_file;
  std::vector<std::string> set;
  bool dry_run = false;
};

void add_common_options(CLI::App& cmd, CommonOptions& opts);

// defaults < --config file < environment < --set.
Config resolve_config(const CommonOptions& opts);

// Applies a flag value to `key` only when the flag was given.
template <typename T>
void apply_flag(Config& cfg, const CLI::App& cmd, const std::string& flag, const std::string& key, const T& value) {
  if (cmd.count(flag) == 0) return;
  if constexpr (std::is_same_v<T, bool>) {
    cfg.set(key, value ? "true" : "false", "flag " + flag);
  } else if constexpr (std::is_arithmetic_v<T>) {
    cfg.set(key, std::to_string(value), "flag " + flag);
  } else {
    cfg.set(key, value, "flag " + flag);
  }
}

// Default of a config key, for flag help texts.
std::string default_of(const std::string& key);

TemplateRegistry load_templates(const Config& cfg);
std::shared_ptr<ProverBackend> make_prover_backend(const Config& cfg);
std::unique_ptr<Verifier> make_verifier(const Config& cfg);
RetryPolicy retry_policy(const Config& cfg);
ProveConfig prove_config(const Config& cfg);
SynthesisOptions synthesis_options(const Config& cfg);

// Total backend calls, when the backend can report them.
std::string call_count(const ProverBackend& backend);

std::vector<long long> parse_int_list(const std::string& text);
std::vector<double> parse_double_list(const std::string& text);

// Subcommand registration. Each returns a callback producing the exit code.
using Runner = std::function<int()>;
Runner add_prove(CLI::App& app);
Runner add_stats(CLI::App& app);
Runner add_negate(CLI::App& app);
Runner add_average(CLI::App& app);
Runner add_rl_prep(CLI::App& app);
Runner add_synthesize(CLI::App& app);
Runner add_scaffold(CLI::App& app);
Runner add_repair(CLI::App& app);
Runner add_serve_verifier(CLI::App& app);

}  // namespace proofsmith::cli
