#pragma once

// Parallel sampling with serial self-correction, and benchmark runs over a
// corpus.

#include <cstdint>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>
#include <utility>
#include <vector>

#include "proofsmith/io.hpp"
#include "proofsmith/prompts.hpp"
#include "proofsmith/prover.hpp"
#include "proofsmith/statements.hpp"
#include "proofsmith/verifier.hpp"

namespace proofsmith {

inline constexpr std::string_view kNoProofBlockMessage = "no proof block emitted";

struct Budgets {
  int first_round_tokens = 30'000;
  int total_tokens = 40'000;  // per sample, across all rounds
};

struct CorrectionFlags {
  bool include_error_messages = true;
  bool include_prior_cot = true;
  // false: a correction prompt shows only the latest failed attempt.
  bool all_prior_rounds = true;
};

struct ProveConfig {
  int n_samples = 32;
  int max_rounds = 2;
  Budgets budgets;
  CorrectionFlags flags;
  std::uint64_t run_seed = 0;
  double temperature = 1.0;
  std::string model;
  std::string initial_template = std::string(templates::kProverInitial);
  std::string correction_template = std::string(templates::kProverCorrection);
  VerifyOptions verify;
  int verify_retries = 2;
  int max_generations = 8;
  int max_verifications = 16;
};

OrderedJson prove_config_to_json(const ProveConfig& cfg);
ProveConfig prove_config_from_json(const Json& j);

struct AttemptTrace {
  std::string statement_id;
  int sample_index = 0;
  int round = 0;
  std::string prompt;
  GenerationResult generation;
  Verdict verdict;
  // Generation or verification could not complete (backend down, budget).
  bool backend_failure = false;
  std::string error;
};

OrderedJson trace_to_json(const AttemptTrace& t);
AttemptTrace trace_from_json(const Json& j);

struct ProblemResult {
  std::string statement_id;
  std::vector<AttemptTrace> attempts;  // sorted by (sample, round)
  bool solved = false;
  std::optional<std::pair<int, int>> first_success;  // (sample, round)
  long long tokens_spent = 0;
  int n_samples = 0;
  int passing_samples = 0;
  bool partial_failure = false;
};

// Builds a ProblemResult from its traces.
ProblemResult summarize(std::string statement_id, int n_samples, std::vector<AttemptTrace> attempts);

// Where already-finished attempts come from and new ones go to. Used for
// resuming runs.
class TraceStore {
 public:
  virtual ~TraceStore() = default;
  virtual std::optional<AttemptTrace> lookup(const std::string& statement_id, int sample, int round) = 0;
  virtual void record(const AttemptTrace& trace) = 0;
};

// What the orchestration talks to. The semaphores cap concurrent backend
// calls across all statements of a run.
class ProvingContext {
 public:
  ProvingContext(Prover& prover, Verifier& verifier, const TemplateRegistry& templates, int max_generations = 8,
                 int max_verifications = 16);

  Prover& prover;
  Verifier& verifier;
  const TemplateRegistry& templates;
  TraceStore* store = nullptr;

  GenerationResult generate(const GenerationRequest& req);
  Verdict verify(const FormalStatement& stmt, const std::string& proof, const VerifyOptions& opts);

 private:
  std::counting_semaphore<4096> generations_;
  std::counting_semaphore<4096> verifications_;
};

// All rounds of one sample, stopping on the first pass, a backend failure,
// or an exhausted per-sample token budget.
std::vector<AttemptTrace> prove_sample(const FormalStatement& stmt, int sample_index, const ProveConfig& cfg,
                                       ProvingContext& ctx);

// Throws PreconditionError unless n_samples >= 1 and max_rounds >= 0.
ProblemResult prove_statement(const FormalStatement& stmt, const ProveConfig& cfg, ProvingContext& ctx);

struct RunReport {
  std::vector<ProblemResult> results;  // corpus order
  std::size_t excluded = 0;            // statements with partial failures
  OrderedJson metrics;
};

// Throws EmptyCorpus. All (statement, sample) pairs share one worker pool.
RunReport run_benchmark(const std::vector<FormalStatement>& corpus, const ProveConfig& cfg, ProvingContext& ctx);

// Metrics over statements without partial failures.
OrderedJson run_metrics(const std::vector<ProblemResult>& results, std::size_t* excluded = nullptr);

}  // namespace proofsmith
