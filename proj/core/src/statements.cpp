#include "proofsmith/statements.hpp"

#include <algorithm>

#include "proofsmith/errors.hpp"
#include "text_util.hpp"

namespace proofsmith {
namespace {

constexpr std::string_view kNot = "¬";
constexpr std::string_view kForall = "∀";

struct Bracket {
  std::string_view open;
  std::string_view close;
};

// Every bracket pair counted for depth. Only the first four open binders.
constexpr Bracket kBrackets[] = {
    {"(", ")"}, {"{", "}"}, {"[", "]"}, {"⦃", "⦄"}, {"⟨", "⟩"},
};

bool starts_with_at(std::string_view text, std::size_t pos, std::string_view token) {
  return text.substr(pos, token.size()) == token;
}

// Returns the length of an opening bracket at pos, or 0.
std::size_t open_len(std::string_view text, std::size_t pos, std::string_view* close = nullptr) {
  for (const auto& b : kBrackets) {
    if (starts_with_at(text, pos, b.open)) {
      if (close) *close = b.close;
      return b.open.size();
    }
  }
  return 0;
}

std::size_t close_len(std::string_view text, std::size_t pos, std::string_view* which = nullptr) {
  for (const auto& b : kBrackets) {
    if (starts_with_at(text, pos, b.close)) {
      if (which) *which = b.close;
      return b.close.size();
    }
  }
  return 0;
}

// Copy of the source with comments blanked to spaces, byte offsets intact.
// Doc comments (`/-- ... -/`) are collected with their spans.
struct Masked {
  std::string text;
  struct Doc {
    std::size_t begin;
    std::size_t end;
    std::string body;
  };
  std::vector<Doc> docs;
};

Masked mask_comments(std::string_view src) {
  Masked out{std::string(src), {}};
  std::string& m = out.text;
  std::size_t i = 0;
  while (i < src.size()) {
    if (src[i] == '"') {
      ++i;
      while (i < src.size() && src[i] != '"') {
        i += (src[i] == '\\' && i + 1 < src.size()) ? 2 : 1;
      }
      ++i;
      continue;
    }
    if (starts_with_at(src, i, "--")) {
      while (i < src.size() && src[i] != '\n') m[i++] = ' ';
      continue;
    }
    if (starts_with_at(src, i, "/-")) {
      const bool doc = starts_with_at(src, i, "/--") && !starts_with_at(src, i, "/--/");
      const std::size_t begin = i;
      int depth = 0;
      std::size_t j = i;
      while (j < src.size()) {
        if (starts_with_at(src, j, "/-")) {
          ++depth;
          j += 2;
        } else if (starts_with_at(src, j, "-/")) {
          --depth;
          j += 2;
          if (depth == 0) break;
        } else {
          ++j;
        }
      }
      if (depth != 0) throw ParseError(begin, "end of block comment '-/'");
      if (doc) {
        std::string body(src.substr(begin + 3, j - begin - 5));
        out.docs.push_back({begin, j, detail::trim(body)});
      }
      for (std::size_t k = begin; k < j; ++k) m[k] = (src[k] == '\n') ? '\n' : ' ';
      i = j;
      continue;
    }
    ++i;
  }
  return out;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

std::size_t skip_space(std::string_view text, std::size_t pos) {
  while (pos < text.size() && is_space(text[pos])) ++pos;
  return pos;
}

// All offsets where the keyword `theorem` stands as its own token.
std::vector<std::size_t> theorem_offsets(std::string_view masked) {
  std::vector<std::size_t> found;
  constexpr std::string_view kw = "theorem";
  std::size_t pos = 0;
  while ((pos = masked.find(kw, pos)) != std::string_view::npos) {
    const bool left = pos == 0 || is_space(masked[pos - 1]);
    const std::size_t end = pos + kw.size();
    const bool right = end < masked.size() && is_space(masked[end]);
    if (left && right) found.push_back(pos);
    pos = end;
  }
  return found;
}

// Position just past the bracket closing the one opened at `pos`.
std::size_t match_bracket(std::string_view text, std::size_t pos) {
  std::vector<std::string_view> stack;
  std::size_t i = pos;
  while (i < text.size()) {
    std::string_view close;
    if (std::size_t n = open_len(text, i, &close)) {
      stack.push_back(close);
      i += n;
      continue;
    }
    std::string_view which;
    if (std::size_t n = close_len(text, i, &which)) {
      if (stack.empty() || stack.back() != which) {
        throw ParseError(i, stack.empty() ? "balanced brackets" : "'" + std::string(stack.back()) + "'");
      }
      stack.pop_back();
      i += n;
      if (stack.empty()) return i;
      continue;
    }
    ++i;
  }
  throw ParseError(text.size(), "'" + std::string(stack.back()) + "'");
}

// Offset of the first depth-0 occurrence of `:` (when want_assign is false)
// or `:=` (when true) in [begin, end). `:` never matches the head of `:=`.
std::size_t find_top_level(std::string_view text, std::size_t begin, std::size_t end, bool want_assign) {
  int depth = 0;
  std::size_t i = begin;
  while (i < end) {
    if (std::size_t n = open_len(text, i)) {
      ++depth;
      i += n;
      continue;
    }
    if (std::size_t n = close_len(text, i)) {
      if (--depth < 0) throw ParseError(i, "balanced brackets");
      i += n;
      continue;
    }
    if (depth == 0 && text[i] == ':') {
      const bool assign = i + 1 < end && text[i + 1] == '=';
      if (assign == want_assign) return i;
      if (assign) {
        i += 2;
        continue;
      }
    }
    ++i;
  }
  return std::string_view::npos;
}

bool name_terminator(std::string_view text, std::size_t pos) {
  return is_space(text[pos]) || text[pos] == ':' || open_len(text, pos) > 0;
}

void parse_binder_group(std::string_view masked, std::size_t open, std::size_t close_end,
                        std::vector<Binder>& out) {
  std::string_view close;
  const std::size_t olen = open_len(masked, open, &close);
  const std::string_view opener = masked.substr(open, olen);
  BinderStyle style = BinderStyle::kParen;
  if (opener == "{") style = BinderStyle::kBrace;
  else if (opener == "[") style = BinderStyle::kBracket;
  else if (opener == "⦃") style = BinderStyle::kStrictBrace;
  else if (opener != "(") throw ParseError(open, "binder bracket");
  const BinderKind kind = style == BinderStyle::kParen ? BinderKind::kExplicit : BinderKind::kInstanceImplicit;

  const std::size_t inner_begin = open + olen;
  const std::size_t inner_end = close_end - close.size();
  const std::size_t colon = find_top_level(masked, inner_begin, inner_end, false);
  if (colon == std::string_view::npos) {
    if (style != BinderStyle::kBracket) throw ParseError(inner_end, "':' in binder");
    std::string type = detail::collapse_whitespace(masked.substr(inner_begin, inner_end - inner_begin));
    if (type.empty()) throw ParseError(inner_begin, "binder type");
    out.push_back({"_", std::move(type), kind, style, true});
    return;
  }
  std::string type = detail::collapse_whitespace(masked.substr(colon + 1, inner_end - colon - 1));
  if (type.empty()) throw ParseError(colon + 1, "binder type");
  const auto names = detail::split_whitespace(masked.substr(inner_begin, colon - inner_begin));
  if (names.empty()) throw ParseError(inner_begin, "binder name");
  for (const auto& n : names) out.push_back({n, type, kind, style, false});
}

bool is_atomic(std::string_view goal) {
  return std::none_of(goal.begin(), goal.end(), is_space);
}

}  // namespace

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::kIngested: return "ingested";
    case Provenance::kNegation: return "negation";
    case Provenance::kExtractedGoal: return "extracted_goal";
    case Provenance::kInformalSynthesis: return "informal_synthesis";
  }
  return "ingested";
}

Provenance provenance_from_string(std::string_view s) {
  if (s == "ingested" || s.empty()) return Provenance::kIngested;
  if (s == "negation") return Provenance::kNegation;
  if (s == "extracted_goal") return Provenance::kExtractedGoal;
  if (s == "informal_synthesis") return Provenance::kInformalSynthesis;
  throw Error("unknown provenance '" + std::string(s) + "'");
}

bool same_structure(const FormalStatement& a, const FormalStatement& b) {
  return a.name == b.name && a.binders == b.binders && a.goal_text == b.goal_text &&
         a.docstring == b.docstring;
}

FormalStatement parse_theorem(std::string_view text) {
  const Masked masked = mask_comments(text);
  const std::string_view m = masked.text;

  const auto offsets = theorem_offsets(m);
  if (offsets.empty()) throw ParseError(skip_space(m, 0), "'theorem' declaration");
  if (offsets.size() > 1) throw MultipleTheorems(offsets[1]);
  const std::size_t kw = offsets.front();

  FormalStatement stmt;
  stmt.raw_text = std::string(text);
  for (const auto& doc : masked.docs) {
    if (doc.end <= kw) stmt.docstring = doc.body;
  }

  std::size_t pos = skip_space(m, kw + 7);
  const std::size_t name_begin = pos;
  while (pos < m.size() && !name_terminator(m, pos)) ++pos;
  if (pos == name_begin) throw ParseError(name_begin, "theorem name");
  stmt.name = std::string(m.substr(name_begin, pos - name_begin));

  for (;;) {
    pos = skip_space(m, pos);
    if (pos >= m.size()) throw ParseError(pos, "':' before goal");
    if (open_len(m, pos) == 0 || starts_with_at(m, pos, "⟨")) break;
    const std::size_t end = match_bracket(m, pos);
    parse_binder_group(m, pos, end, stmt.binders);
    pos = end;
  }

  if (m[pos] != ':' || starts_with_at(m, pos, ":=")) throw ParseError(pos, "':' before goal");
  const std::size_t goal_begin = pos + 1;
  const std::size_t assign = find_top_level(m, goal_begin, m.size(), true);
  if (assign == std::string_view::npos) throw ParseError(m.size(), "':='");
  stmt.goal_text = detail::collapse_whitespace(m.substr(goal_begin, assign - goal_begin));
  if (stmt.goal_text.empty()) throw ParseError(goal_begin, "goal expression");
  return stmt;
}

std::string render_binder(const Binder& b) {
  std::string_view open = "(", close = ")";
  switch (b.style) {
    case BinderStyle::kParen: break;
    case BinderStyle::kBrace: open = "{"; close = "}"; break;
    case BinderStyle::kBracket: open = "["; close = "]"; break;
    case BinderStyle::kStrictBrace: open = "⦃"; close = "⦄"; break;
  }
  std::string out(open);
  if (!b.anonymous) out += b.name + " : ";
  out += b.type_text;
  out += close;
  return out;
}

std::string render(const FormalStatement& stmt) {
  std::string out;
  if (stmt.docstring) out += "/-- " + *stmt.docstring + " -/\n";
  out += "theorem " + stmt.name;
  for (const auto& b : stmt.binders) out += " " + render_binder(b);
  out += " : " + stmt.goal_text + " := by sorry";
  return out;
}

std::string source_text(const FormalStatement& stmt) {
  return stmt.raw_text.empty() ? render(stmt) : stmt.raw_text;
}

FormalStatement negate(const FormalStatement& stmt, std::set<std::string>& taken) {
  if (stmt.provenance == Provenance::kNegation) throw AlreadyNegated(stmt.name);

  std::string suffix = "Neg";
  for (int counter = 2; taken.count(stmt.name + suffix) != 0; ++counter) {
    suffix = "Neg" + std::to_string(counter);
  }

  FormalStatement out;
  out.name = stmt.name + suffix;
  out.id = stmt.id.empty() ? out.name : stmt.id + "_" + detail::to_lower(suffix);
  out.provenance = Provenance::kNegation;

  std::string goal(kNot);
  goal += " ";
  if (stmt.binders.empty()) {
    goal += is_atomic(stmt.goal_text) ? stmt.goal_text : "(" + stmt.goal_text + ")";
  } else {
    goal += kForall;
    for (const auto& b : stmt.binders) goal += " " + render_binder(b);
    goal += ", " + stmt.goal_text;
  }
  out.goal_text = std::move(goal);
  out.raw_text = render(out);
  taken.insert(out.name);
  return out;
}

FormalStatement negate(const FormalStatement& stmt) {
  std::set<std::string> taken{stmt.name};
  return negate(stmt, taken);
}

std::vector<FormalStatement> negate_all(const std::vector<FormalStatement>& corpus) {
  std::set<std::string> taken;
  for (const auto& s : corpus) taken.insert(s.name);
  std::vector<FormalStatement> out;
  out.reserve(corpus.size());
  for (const auto& s : corpus) out.push_back(negate(s, taken));
  return out;
}

std::string normalized_text(std::string_view text) {
  std::string out;
  bool prev_blank = false;
  bool first = true;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(start, nl - start);
    while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r')) {
      line.remove_suffix(1);
    }
    const bool blank = line.empty();
    if (!(blank && prev_blank)) {
      if (!first) out += '\n';
      out += line;
      first = false;
    }
    prev_blank = blank;
    start = nl + 1;
  }
  while (!out.empty() && out.back() == '\n') out.pop_back();
  return out;
}

std::vector<FormalStatement> dedup(const std::vector<FormalStatement>& statements) {
  std::set<std::string> seen;
  std::vector<FormalStatement> out;
  for (const auto& s : statements) {
    if (seen.insert(normalized_text(source_text(s))).second) out.push_back(s);
  }
  return out;
}

}  // namespace proofsmith
