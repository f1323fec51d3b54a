#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "proofsmith/io.hpp"
#include "proofsmith/statements.hpp"

namespace proofsmith {

enum class Severity { kError, kWarning };

struct Diagnostic {
  int line = 1;
  int col = 1;
  Severity severity = Severity::kError;
  std::string message;

  bool operator==(const Diagnostic&) const = default;
};

struct GoalState {
  std::vector<std::pair<std::string, std::string>> hypotheses;
  std::string target;

  bool operator==(const GoalState&) const = default;
};

struct Verdict {
  bool pass = false;
  std::vector<Diagnostic> diagnostics;
  std::vector<GoalState> goals;
  std::chrono::milliseconds wall_time{0};
  std::string backend;
  bool timed_out = false;

  bool has_errors() const;
};

// Equal in everything but wall_time.
bool same_outcome(const Verdict& a, const Verdict& b);

struct VerifyOptions {
  std::chrono::milliseconds timeout{60'000};
  bool extract_goals = true;
};

constexpr std::string_view kTimeoutMessage = "timeout";

// The verdict reported when a check exceeds its time limit: a failure with a
// single synthetic "timeout" diagnostic.
Verdict timeout_verdict(std::string backend, std::chrono::milliseconds elapsed);

class Verifier {
 public:
  virtual ~Verifier() = default;

  // Throws BackendUnavailable when the backend cannot answer (retriable).
  virtual Verdict verify(const FormalStatement& stmt, const std::string& proof,
                         const VerifyOptions& options) = 0;

  virtual std::string id() const = 0;

  // Replaces the part of `proof` starting at the location `at` points to with
  // `replacement`. The default treats (line, col) as a 1-based character
  // position in the proof text.
  virtual std::string splice(const std::string& proof, const Diagnostic& at,
                             const std::string& replacement) const;

  // Extracts the proof body out of a prover's code block (which may restate
  // the theorem). The default returns the text unchanged.
  virtual std::string proof_body(const std::string& proof_text) const { return proof_text; }
};

std::vector<GoalState> extract_goals(Verifier& verifier, const FormalStatement& stmt,
                                     const std::string& partial_proof,
                                     const VerifyOptions& options = {});

// `<base_name>_goal<index>`; hypotheses become explicit binders in order.
FormalStatement goal_to_statement(const GoalState& goal, const std::string& base_name,
                                  int index = 0, const std::string& base_id = {});

// The first diagnostic marking where a proof stopped making progress: an error,
// or the warning on a `sorry` step. Empty when neither exists.
std::optional<Diagnostic> failure_point(const Verdict& verdict);

// Wire encodings shared by the subprocess protocol and result files.
OrderedJson diagnostic_to_json(const Diagnostic& d);
Diagnostic diagnostic_from_json(const Json& j);
OrderedJson goal_to_json(const GoalState& g);
GoalState goal_from_json(const Json& j);
OrderedJson verdict_to_json(const Verdict& v);
Verdict verdict_from_json(const Json& j);

std::string_view to_string(Severity s);

}  // namespace proofsmith
