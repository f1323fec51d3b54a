#pragma once

// Statement synthesis: formal scaffolding from failed proofs, and the
// informal pipeline (variants -> double formalization -> faithfulness vote
// -> correctness/simplicity gate -> dedup).

#include <optional>
#include <string>
#include <vector>

#include "proofsmith/corpus.hpp"
#include "proofsmith/io.hpp"
#include "proofsmith/prompts.hpp"
#include "proofsmith/prover.hpp"
#include "proofsmith/statements.hpp"
#include "proofsmith/verifier.hpp"

namespace proofsmith {

// ---- formal scaffolding -------------------------------------------------------

// Goals left open by each failed attempt become statements, each followed by
// its negation; identical goals are kept once. Throws PreconditionError if an
// attempt verifies.
std::vector<FormalStatement> formal_scaffold(const FormalStatement& stmt, const std::vector<std::string>& failed_attempts,
                                             Verifier& verifier, const VerifyOptions& options = {});

// ---- judges -------------------------------------------------------------------

enum class Vote { kYes, kNo, kUnsure };
enum class Faithfulness { kAppropriate, kInappropriate };

std::string_view to_string(Vote v);
std::string_view to_string(Faithfulness f);

struct JudgeVerdict {
  std::optional<Faithfulness> faithfulness;
  Vote correctness = Vote::kUnsure;
  Vote simplicity = Vote::kUnsure;
  std::string raw_text;
};

// First <judge>A, B</judge> span; values outside {yes, no, unsure} or a
// missing tag throw JudgeParseError.
JudgeVerdict parse_judge_tags(std::string_view text);

// Last `Judgement: Appropriate|Inappropriate` line. Throws JudgeParseError.
Faithfulness parse_faithfulness(std::string_view text);

enum class GateDecision { kKeep, kKeepNegated, kDiscard };
std::string_view to_string(GateDecision d);

struct GateVote {
  std::string raw_text;
  Vote correctness = Vote::kUnsure;
  Vote simplicity = Vote::kUnsure;
  bool parse_error = false;
};

// Discard if every judge calls it simple; keep on a strict majority of yes,
// keep_negated on a strict majority of no, else discard.
GateDecision decide_gate(const std::vector<GateVote>& votes);

// Parse failures become unsure votes.
GateVote gate_vote_from_text(std::string raw);

// ---- backends -----------------------------------------------------------------

struct SynthesisOptions {
  int formalizations = 2;
  int faithfulness_votes = 3;
  int gate_votes = 4;
  int judge_max_tokens = 4'096;
  int max_tokens = 30'000;
  std::uint64_t seed = 0;
  int workers = 8;
  VerifyOptions verify;
};

struct SynthesisBackends {
  Prover& llm;         // natural-language solutions and variants
  Prover& formalizer;  // informal -> formal statement
  Prover& judge;       // faithfulness and correctness/simplicity
  Verifier& verifier;  // syntax check with proof `sorry`
  const TemplateRegistry& templates;
};

// ---- informal pipeline --------------------------------------------------------

enum class VariantDirection { kSimpler, kHarder };
std::string_view to_string(VariantDirection d);

// Segments between <newproblem> and </newproblem>. Nested or unclosed tags
// skip the affected span and append a warning.
std::vector<std::string> extract_tagged_spans(std::string_view text, std::vector<std::string>* warnings = nullptr);

struct VariantResult {
  VariantDirection direction = VariantDirection::kSimpler;
  std::string solution;  // transcript of the solve call
  std::string reply;     // transcript of the variant call
  std::vector<std::string> variants;
  std::vector<std::string> warnings;
};

// Solves the problem first, then asks once for harder variants (solved) or
// simpler ones (unsolved). Throws ExtractionEmpty or BackendError.
VariantResult generate_variants(const std::string& problem, const std::string& problem_id, bool solved,
                                SynthesisBackends& backends, const SynthesisOptions& options);

struct FaithfulVote {
  std::string raw_text;
  std::optional<Faithfulness> value;  // empty when unparseable
};

struct FormalizationAttempt {
  std::string reply;
  std::string statement_text;
  bool syntax_ok = false;
  std::string syntax_error;
  std::vector<FaithfulVote> votes;
  bool faithful = false;
};

struct FormalizationOutcome {
  std::vector<FormalizationAttempt> attempts;
  std::optional<FormalStatement> kept;  // first attempt passing both checks
};

// True when `appropriate` votes are a strict majority.
bool faithful_majority(const std::vector<FaithfulVote>& votes);

FormalizationOutcome formalize_and_check(const std::string& informal, const std::string& item_id,
                                         SynthesisBackends& backends, const SynthesisOptions& options);

struct GateOutcome {
  std::vector<GateVote> votes;
  GateDecision decision = GateDecision::kDiscard;
};

GateOutcome correctness_simplicity_gate(const FormalStatement& stmt, SynthesisBackends& backends,
                                        const SynthesisOptions& options);

struct SynthesisReport {
  std::vector<FormalStatement> emitted;
  // {"id", "problem_id", "direction", "informal", "formalizations",
  //  "faithful_votes", "gate_votes", "decision", "emitted"}
  std::vector<OrderedJson> audit;
  std::vector<std::string> failures;  // per-problem errors; the batch goes on
  std::vector<std::string> warnings;
};

// The informal problem text of a corpus entry: its docstring if present,
// else the formal statement.
std::string problem_text(const FormalStatement& stmt);

SynthesisReport synthesize(const std::vector<CorpusEntry>& corpus, SynthesisBackends& backends,
                           const SynthesisOptions& options);

// Re-derives an audit record's decision from its stored transcripts:
// "keep", "keep_negated", "discard" or "no_formalization".
std::string recompute_decision(const Json& audit_record);

}  // namespace proofsmith
