#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "proofsmith/errors.hpp"
#include "proofsmith/prompts.hpp"
#include "proofsmith/statements.hpp"
#include "proofsmith/verifier.hpp"

namespace proofsmith {

// ---- prompts ----------------------------------------------------------------

struct PriorAttempt {
  std::string cot_text;
  std::string proof_text;
  std::vector<Diagnostic> diagnostics;
};

struct AttemptContext {
  FormalStatement statement;
  std::vector<PriorAttempt> prior_attempts;
  bool include_error_messages = true;
  bool include_prior_cot = true;
};

// Substitutes {formal_statement} and, when present, {informal_statement}.
std::string build_initial_prompt(const FormalStatement& stmt, std::string_view template_id,
                                 const TemplateRegistry& templates);

// One diagnostic as it appears in a correction prompt.
std::string render_diagnostic(const Diagnostic& d);

// Renders every prior attempt into {prior_attempts}. The flags drop the
// diagnostics or the reasoning of earlier rounds.
std::string build_correction_prompt(const AttemptContext& ctx, std::string_view template_id,
                                    const TemplateRegistry& templates);

// ---- generation -------------------------------------------------------------

enum class FinishReason { kStop, kLength, kBackendError };
std::string_view to_string(FinishReason r);
FinishReason finish_reason_from_string(std::string_view s);

struct GenerationResult {
  std::string full_text;
  std::string cot_text;
  std::string proof_text;
  int prompt_tokens = 0;
  int completion_tokens = 0;
  FinishReason finish_reason = FinishReason::kStop;
  std::string error;  // set when finish_reason is kBackendError
};

struct ProofBlock {
  std::string cot_text;
  std::string proof_text;
};

// Last complete ```lean / ```lean4 block; text before its opening fence is the
// reasoning. Without a block the whole text is reasoning.
ProofBlock parse_proof_block(std::string_view full_text);

// What the request is for. Backends that script replies key on these.
struct RequestTags {
  std::string statement_id;
  int sample_index = 0;
  int round = 0;
  std::string purpose = "prove";
};

struct GenerationRequest {
  std::string prompt;
  int max_tokens = 30'000;
  double temperature = 1.0;
  std::uint64_t seed = 0;
  std::string model;  // overrides the backend's default model when set
  RequestTags tags;
};

struct BackendReply {
  std::string text;
  std::optional<int> completion_tokens;
  std::optional<int> prompt_tokens;
  bool truncated = false;
};

// Raised by backends for failures worth retrying (transport errors, 5xx).
class TransientBackendError : public Error {
 public:
  using Error::Error;
};

class ProverBackend {
 public:
  virtual ~ProverBackend() = default;
  // Throws TransientBackendError (retried) or BackendError (not retried).
  virtual BackendReply complete(const GenerationRequest& request) = 0;
  virtual std::string id() const = 0;
};

// Whitespace-separated token count, used when a backend reports no usage.
int count_tokens(std::string_view text);

struct RetryPolicy {
  int max_retries = 3;
  std::vector<std::chrono::milliseconds> backoff{std::chrono::seconds(1), std::chrono::seconds(4),
                                                 std::chrono::seconds(16)};
  // Replaced in tests to avoid real sleeps.
  std::function<void(std::chrono::milliseconds)> sleep;
};

// Run-level cap on completion tokens shared by all concurrent generations.
// A limit of 0 means unlimited.
class TokenBudget {
 public:
  explicit TokenBudget(std::int64_t limit = 0) : limit_(limit) {}

  // Reserves `tokens` or throws BudgetExhausted.
  void reserve(std::int64_t tokens);
  // Returns the unused part of a reservation.
  void settle(std::int64_t reserved, std::int64_t used);
  std::int64_t spent() const { return committed_.load(); }
  std::int64_t limit() const { return limit_; }

 private:
  std::int64_t limit_;
  std::atomic<std::int64_t> committed_{0};
};

class Prover {
 public:
  Prover(std::shared_ptr<ProverBackend> backend, RetryPolicy retry = {},
         std::shared_ptr<TokenBudget> budget = nullptr);

  // Never throws for backend failures: after retries the result carries
  // finish_reason=kBackendError and empty texts. Throws BudgetExhausted and
  // std::invalid_argument (max_tokens <= 0).
  GenerationResult generate(const GenerationRequest& request);

  // Like generate, but surfaces exhausted retries as BackendError.
  BackendReply call_with_retry(const GenerationRequest& request);

  const ProverBackend& backend() const { return *backend_; }
  std::string backend_id() const { return backend_->id(); }

 private:
  std::shared_ptr<ProverBackend> backend_;
  RetryPolicy retry_;
  std::shared_ptr<TokenBudget> budget_;
};

}  // namespace proofsmith
