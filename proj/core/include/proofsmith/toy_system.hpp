#pragma once

// A desk-scale formal system used as the built-in verifier backend.
//
// Statements: goals `<expr> = <expr>` over Int variables with `+`, `*`,
// nonnegative integer literals and parentheses. Binders are either
// `(x : Int)` variables or `(h : x = <expr>)` hypotheses.
//
// Proofs: whitespace-separated steps, each one of
//   rw <h>     substitute hypothesis h (x = e) for x, left to right
//   add_zero   t + 0 -> t        zero_add   0 + t -> t
//   mul_one    t * 1 -> t        one_mul    1 * t -> t
//   mul_zero   t * 0 -> 0
//   comm_add   swap the top-level sum of the lhs (or rhs if lhs is not a sum)
//   norm       fold every all-constant subexpression
//   sorry      give up, leaving the goal open
// Rewrites apply to every matching subterm, innermost first. A step that
// changes nothing fails. The proof passes iff it ends on `t = t`.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "proofsmith/statements.hpp"
#include "proofsmith/verifier.hpp"

namespace proofsmith::toy {

struct Expr {
  enum class Kind { kLit, kVar, kAdd, kMul };

  Kind kind = Kind::kLit;
  std::int64_t value = 0;
  std::string name;
  std::vector<Expr> args;  // two operands for kAdd/kMul

  static Expr lit(std::int64_t v);
  static Expr var(std::string n);
  static Expr add(Expr l, Expr r);
  static Expr mul(Expr l, Expr r);

  bool operator==(const Expr&) const = default;
};

struct Equation {
  Expr lhs;
  Expr rhs;
  bool operator==(const Equation&) const = default;
};

// Throws ParseError (offsets relative to `text`).
Expr parse_expr(std::string_view text);
Equation parse_equation(std::string_view text);

// Minimal-parenthesis printing; parse_expr(print(e)) == e.
std::string print(const Expr& e);
std::string print(const Equation& eq);

struct Hypothesis {
  std::string name;
  std::string var;
  Expr value;
};

struct Problem {
  std::vector<std::string> variables;
  std::vector<Hypothesis> hypotheses;
  // Binder order, as (name, printed type).
  std::vector<std::pair<std::string, std::string>> context;
  Equation goal;
};

// Returns the reason when the statement is outside the fragment.
struct Lowering {
  std::optional<Problem> problem;
  std::string reason;
};
Lowering lower(const FormalStatement& stmt);

struct Step {
  std::string text;     // e.g. "rw hx"
  std::string tactic;   // e.g. "rw"
  std::string argument;
  int token_offset = 1;  // 1-based index of the step's first token
};

std::vector<Step> tokenize_proof(std::string_view body);

// nullopt when the step does not apply; `why` then holds a detail message.
std::optional<Equation> apply_step(const Problem& problem, const Equation& goal, const Step& step,
                                   std::string* why = nullptr);

bool closed(const Equation& goal);

class ToyVerifier final : public Verifier {
 public:
  Verdict verify(const FormalStatement& stmt, const std::string& proof,
                 const VerifyOptions& options) override;
  std::string id() const override { return "toy"; }

  // Diagnostic columns are token offsets; the splice keeps the steps before
  // that token and appends the replacement's steps.
  std::string splice(const std::string& proof, const Diagnostic& at,
                     const std::string& replacement) const override;

  // Accepts a bare step list, `by <steps>`, or a restated theorem
  // `theorem ... := by <steps>`. Line comments are dropped.
  std::string proof_body(const std::string& proof_text) const override;
};

}  // namespace proofsmith::toy
