#pragma once

// Header-level handling of formal theorem statements.
//
// Only the `theorem <name> <binders...> : <goal> := ...` skeleton is parsed.
// Binder types and goals stay opaque balanced-token text; the tokens given
// meaning are `theorem`, `:`, `:=`, brackets, `¬`, `∀` and `,`.

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace proofsmith {

enum class BinderKind { kExplicit, kInstanceImplicit };

// Bracket a binder was written with. Anything but kParen is instance-implicit.
enum class BinderStyle { kParen, kBrace, kBracket, kStrictBrace };

struct Binder {
  std::string name;
  std::string type_text;
  BinderKind kind = BinderKind::kExplicit;
  BinderStyle style = BinderStyle::kParen;
  // `[Fintype α]` has no name; `name` is then "_" and rendering omits it.
  bool anonymous = false;

  bool operator==(const Binder&) const = default;
};

enum class Provenance { kIngested, kNegation, kExtractedGoal, kInformalSynthesis };

std::string_view to_string(Provenance p);
Provenance provenance_from_string(std::string_view s);

struct FormalStatement {
  std::string id;
  std::string name;
  std::vector<Binder> binders;
  std::string goal_text;
  std::string raw_text;
  Provenance provenance = Provenance::kIngested;
  std::optional<std::string> docstring;
};

// Equality of the parsed header (name, binders, goal, docstring). Ignores id,
// raw_text and provenance.
bool same_structure(const FormalStatement& a, const FormalStatement& b);

// Throws ParseError or MultipleTheorems.
FormalStatement parse_theorem(std::string_view text);

// Canonical single-declaration text ending in `:= by sorry`.
std::string render(const FormalStatement& stmt);

// Text of one binder as it appears in a header or quantifier prefix.
std::string render_binder(const Binder& b);

// `<name>Neg : ¬ ∀ <binders>, <goal>`. Throws AlreadyNegated when the input
// is itself a negation.
FormalStatement negate(const FormalStatement& stmt);

// Like negate, but picks `Neg`, `Neg2`, `Neg3`, ... so the new name is absent
// from `taken`, then inserts it.
FormalStatement negate(const FormalStatement& stmt, std::set<std::string>& taken);

// Negates every statement of a corpus with collision-free names.
std::vector<FormalStatement> negate_all(const std::vector<FormalStatement>& corpus);

// Key used by dedup: trailing whitespace trimmed per line, blank-line runs
// collapsed to one.
std::string normalized_text(std::string_view text);

// First occurrence of each normalized text wins; order is stable.
std::vector<FormalStatement> dedup(const std::vector<FormalStatement>& statements);

// The text a statement is identified by: raw_text if present, else render().
std::string source_text(const FormalStatement& stmt);

}  // namespace proofsmith
