#include "proofsmith/toy_system.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <set>

#include "proofsmith/errors.hpp"
#include "text_util.hpp"

namespace proofsmith::toy {

Expr Expr::lit(std::int64_t v) {
  Expr e;
  e.kind = Kind::kLit;
  e.value = v;
  return e;
}

Expr Expr::var(std::string n) {
  Expr e;
  e.kind = Kind::kVar;
  e.name = std::move(n);
  return e;
}

Expr Expr::add(Expr l, Expr r) {
  Expr e;
  e.kind = Kind::kAdd;
  e.args.push_back(std::move(l));
  e.args.push_back(std::move(r));
  return e;
}

Expr Expr::mul(Expr l, Expr r) {
  Expr e;
  e.kind = Kind::kMul;
  e.args.push_back(std::move(l));
  e.args.push_back(std::move(r));
  return e;
}

namespace {

bool ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool ident_char(unsigned char c) {
  return std::isalnum(c) || c == '_' || c == '\'' || c == '.' || c >= 0x80;
}

class ExprParser {
 public:
  explicit ExprParser(std::string_view text) : text_(text) {}

  Expr parse_sum() {
    Expr lhs = parse_product();
    while (peek('+')) {
      ++pos_;
      lhs = Expr::add(std::move(lhs), parse_product());
    }
    return lhs;
  }

  Expr parse_product() {
    Expr lhs = parse_atom();
    while (peek('*')) {
      ++pos_;
      lhs = Expr::mul(std::move(lhs), parse_atom());
    }
    return lhs;
  }

  Expr parse_atom() {
    skip();
    if (pos_ >= text_.size()) throw ParseError(pos_, "operand");
    const unsigned char c = static_cast<unsigned char>(text_[pos_]);
    if (c == '(') {
      ++pos_;
      Expr inner = parse_sum();
      if (!peek(')')) throw ParseError(pos_, "')'");
      ++pos_;
      return inner;
    }
    if (std::isdigit(c)) {
      std::int64_t v = 0;
      const std::size_t begin = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        if (__builtin_mul_overflow(v, 10, &v) || __builtin_add_overflow(v, text_[pos_] - '0', &v)) {
          throw ParseError(begin, "literal within 64-bit range");
        }
        ++pos_;
      }
      return Expr::lit(v);
    }
    if (ident_start(c)) {
      const std::size_t begin = pos_;
      while (pos_ < text_.size() && ident_char(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      return Expr::var(std::string(text_.substr(begin, pos_ - begin)));
    }
    throw ParseError(pos_, "operand");
  }

  bool peek(char c) {
    skip();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  void expect_end() {
    skip();
    if (pos_ != text_.size()) throw ParseError(pos_, "end of expression");
  }

  std::size_t pos() const { return pos_; }
  void advance() { ++pos_; }

 private:
  void skip() {
    while (pos_ < text_.size() && detail::ascii_space(text_[pos_])) ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

// Precedence levels for printing: sum < product < atom.
int level(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::kAdd: return 0;
    case Expr::Kind::kMul: return 1;
    default: return 2;
  }
}

std::string wrap_if(const Expr& e, bool parens) {
  return parens ? "(" + print(e) + ")" : print(e);
}

using Rule = std::optional<Expr> (*)(const Expr&);

// Rewrites children first, then the node itself, everywhere in the tree.
Expr rewrite_all(const Expr& e, Rule rule, bool& changed) {
  Expr out = e;
  for (auto& a : out.args) a = rewrite_all(a, rule, changed);
  if (auto r = rule(out)) {
    changed = true;
    return *r;
  }
  return out;
}

bool is_lit(const Expr& e, std::int64_t v) { return e.kind == Expr::Kind::kLit && e.value == v; }

std::optional<Expr> rule_add_zero(const Expr& e) {
  if (e.kind == Expr::Kind::kAdd && is_lit(e.args[1], 0)) return e.args[0];
  return std::nullopt;
}
std::optional<Expr> rule_zero_add(const Expr& e) {
  if (e.kind == Expr::Kind::kAdd && is_lit(e.args[0], 0)) return e.args[1];
  return std::nullopt;
}
std::optional<Expr> rule_mul_one(const Expr& e) {
  if (e.kind == Expr::Kind::kMul && is_lit(e.args[1], 1)) return e.args[0];
  return std::nullopt;
}
std::optional<Expr> rule_one_mul(const Expr& e) {
  if (e.kind == Expr::Kind::kMul && is_lit(e.args[0], 1)) return e.args[1];
  return std::nullopt;
}
std::optional<Expr> rule_mul_zero(const Expr& e) {
  if (e.kind == Expr::Kind::kMul && is_lit(e.args[1], 0)) return Expr::lit(0);
  return std::nullopt;
}

// Folding only fires on literal operands, so overflow leaves the node alone.
std::optional<Expr> rule_fold(const Expr& e) {
  if (e.args.size() != 2 || e.args[0].kind != Expr::Kind::kLit || e.args[1].kind != Expr::Kind::kLit) {
    return std::nullopt;
  }
  std::int64_t v = 0;
  const bool overflow = e.kind == Expr::Kind::kAdd
                            ? __builtin_add_overflow(e.args[0].value, e.args[1].value, &v)
                            : __builtin_mul_overflow(e.args[0].value, e.args[1].value, &v);
  if (overflow) return std::nullopt;
  return Expr::lit(v);
}

Expr substitute(const Expr& e, const std::string& var, const Expr& value, bool& changed) {
  if (e.kind == Expr::Kind::kVar && e.name == var) {
    changed = true;
    return value;
  }
  Expr out = e;
  for (auto& a : out.args) a = substitute(a, var, value, changed);
  return out;
}

void collect_vars(const Expr& e, std::set<std::string>& out) {
  if (e.kind == Expr::Kind::kVar) out.insert(e.name);
  for (const auto& a : e.args) collect_vars(a, out);
}

GoalState goal_state(const Problem& p, const Equation& goal) {
  return GoalState{p.context, print(goal)};
}

GoalState raw_goal_state(const FormalStatement& stmt) {
  GoalState g;
  for (const auto& b : stmt.binders) g.hypotheses.emplace_back(b.name, b.type_text);
  g.target = stmt.goal_text;
  return g;
}

std::string strip_line_comments(std::string_view text) {
  std::string out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text.substr(i, 2) == "--") {
      while (!out.empty() && (out.back() == ' ' || out.back() == '\t')) out.pop_back();
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    out += text[i++];
  }
  return out;
}

}  // namespace

Expr parse_expr(std::string_view text) {
  ExprParser p(text);
  Expr e = p.parse_sum();
  p.expect_end();
  return e;
}

Equation parse_equation(std::string_view text) {
  ExprParser p(text);
  Expr lhs = p.parse_sum();
  if (!p.peek('=')) throw ParseError(p.pos(), "'='");
  p.advance();
  Expr rhs = p.parse_sum();
  p.expect_end();
  return {std::move(lhs), std::move(rhs)};
}

std::string print(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::kLit: return std::to_string(e.value);
    case Expr::Kind::kVar: return e.name;
    case Expr::Kind::kAdd:
      return wrap_if(e.args[0], false) + " + " + wrap_if(e.args[1], level(e.args[1]) <= 0);
    case Expr::Kind::kMul:
      return wrap_if(e.args[0], level(e.args[0]) < 1) + " * " + wrap_if(e.args[1], level(e.args[1]) <= 1);
  }
  return {};
}

std::string print(const Equation& eq) { return print(eq.lhs) + " = " + print(eq.rhs); }

Lowering lower(const FormalStatement& stmt) {
  Problem p;
  std::set<std::string> vars;
  std::set<std::string> names;
  for (const auto& b : stmt.binders) {
    if (b.style != BinderStyle::kParen || b.anonymous) {
      return {std::nullopt, "binder '" + render_binder(b) + "' is not an explicit binder"};
    }
    if (!names.insert(b.name).second) return {std::nullopt, "duplicate binder '" + b.name + "'"};
    if (b.type_text == "Int" || b.type_text == "ℤ") {
      vars.insert(b.name);
      p.variables.push_back(b.name);
      p.context.emplace_back(b.name, b.type_text);
      continue;
    }
    Equation eq;
    try {
      eq = parse_equation(b.type_text);
    } catch (const ParseError&) {
      return {std::nullopt, "binder '" + b.name + "' is neither an Int variable nor an equation"};
    }
    if (eq.lhs.kind != Expr::Kind::kVar || vars.count(eq.lhs.name) == 0) {
      return {std::nullopt, "hypothesis '" + b.name + "' must have a declared variable on its left"};
    }
    std::set<std::string> used;
    collect_vars(eq.rhs, used);
    for (const auto& v : used) {
      if (vars.count(v) == 0) return {std::nullopt, "unknown variable '" + v + "' in '" + b.name + "'"};
    }
    p.context.emplace_back(b.name, print(eq));
    p.hypotheses.push_back({b.name, eq.lhs.name, std::move(eq.rhs)});
  }
  try {
    p.goal = parse_equation(stmt.goal_text);
  } catch (const ParseError&) {
    return {std::nullopt, "goal '" + stmt.goal_text + "' is not an equation"};
  }
  std::set<std::string> used;
  collect_vars(p.goal.lhs, used);
  collect_vars(p.goal.rhs, used);
  for (const auto& v : used) {
    if (vars.count(v) == 0) return {std::nullopt, "unknown variable '" + v + "' in goal"};
  }
  return {std::move(p), {}};
}

std::vector<Step> tokenize_proof(std::string_view body) {
  const auto tokens = detail::split_whitespace(body);
  std::vector<Step> steps;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    Step s;
    s.tactic = tokens[i];
    s.text = tokens[i];
    s.token_offset = static_cast<int>(i) + 1;
    if (s.tactic == "rw" && i + 1 < tokens.size()) {
      std::string arg = tokens[++i];
      s.text += " " + arg;
      if (arg.size() >= 2 && arg.front() == '[' && arg.back() == ']') arg = arg.substr(1, arg.size() - 2);
      s.argument = std::move(arg);
    }
    steps.push_back(std::move(s));
  }
  return steps;
}

std::optional<Equation> apply_step(const Problem& problem, const Equation& goal, const Step& step,
                                   std::string* why) {
  auto fail = [&](std::string msg) -> std::optional<Equation> {
    if (why) *why = std::move(msg);
    return std::nullopt;
  };

  bool changed = false;
  Equation next = goal;
  auto rewrite = [&](Rule rule) {
    next.lhs = rewrite_all(goal.lhs, rule, changed);
    next.rhs = rewrite_all(goal.rhs, rule, changed);
  };

  if (step.tactic == "rw") {
    if (step.argument.empty()) return fail("missing hypothesis name");
    const auto it = std::find_if(problem.hypotheses.begin(), problem.hypotheses.end(),
                                 [&](const Hypothesis& h) { return h.name == step.argument; });
    if (it == problem.hypotheses.end()) return fail("unknown hypothesis '" + step.argument + "'");
    next.lhs = substitute(goal.lhs, it->var, it->value, changed);
    next.rhs = substitute(goal.rhs, it->var, it->value, changed);
  } else if (step.tactic == "add_zero") {
    rewrite(rule_add_zero);
  } else if (step.tactic == "zero_add") {
    rewrite(rule_zero_add);
  } else if (step.tactic == "mul_one") {
    rewrite(rule_mul_one);
  } else if (step.tactic == "one_mul") {
    rewrite(rule_one_mul);
  } else if (step.tactic == "mul_zero") {
    rewrite(rule_mul_zero);
  } else if (step.tactic == "norm") {
    rewrite(rule_fold);
  } else if (step.tactic == "comm_add") {
    if (goal.lhs.kind == Expr::Kind::kAdd) {
      std::swap(next.lhs.args[0], next.lhs.args[1]);
    } else if (goal.rhs.kind == Expr::Kind::kAdd) {
      std::swap(next.rhs.args[0], next.rhs.args[1]);
    } else {
      return fail("no top-level sum");
    }
    changed = next != goal;
  } else {
    return fail("unknown step");
  }
  if (!changed) return fail("no subterm matches");
  return next;
}

bool closed(const Equation& goal) { return goal.lhs == goal.rhs; }

std::string ToyVerifier::proof_body(const std::string& proof_text) const {
  std::string text = strip_line_comments(proof_text);
  if (const auto kw = text.find("theorem"); kw != std::string::npos) {
    if (const auto assign = text.find(":=", kw); assign != std::string::npos) text = text.substr(assign + 2);
  }
  text = detail::trim(text);
  if (text == "by") return {};
  if (text.rfind("by", 0) == 0 && text.size() > 2 && detail::ascii_space(text[2])) text = detail::trim(text.substr(2));
  return text;
}

std::string ToyVerifier::splice(const std::string& proof, const Diagnostic& at,
                                const std::string& replacement) const {
  const auto tokens = detail::split_whitespace(proof_body(proof));
  const std::size_t keep = std::min<std::size_t>(tokens.size(), at.col > 0 ? static_cast<std::size_t>(at.col - 1) : 0);
  std::vector<std::string> out(tokens.begin(), tokens.begin() + static_cast<std::ptrdiff_t>(keep));
  for (auto& t : detail::split_whitespace(proof_body(replacement))) out.push_back(std::move(t));
  std::string joined;
  for (const auto& t : out) {
    if (!joined.empty()) joined += ' ';
    joined += t;
  }
  return joined;
}

Verdict ToyVerifier::verify(const FormalStatement& stmt, const std::string& proof,
                            const VerifyOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  Verdict v;
  v.backend = id();
  auto finish = [&](Verdict& out) {
    if (!options.extract_goals) out.goals.clear();
    out.wall_time = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    return out;
  };

  Lowering lowered = lower(stmt);
  if (!lowered.problem) {
    v.diagnostics.push_back({1, 1, Severity::kError, "statement is outside the toy fragment: " + lowered.reason});
    v.goals.push_back(raw_goal_state(stmt));
    return finish(v);
  }
  const Problem& problem = *lowered.problem;

  const auto steps = tokenize_proof(proof_body(proof));
  if (steps.empty()) {
    v.diagnostics.push_back({1, 1, Severity::kError, "empty proof"});
    v.goals.push_back(goal_state(problem, problem.goal));
    return finish(v);
  }

  Equation goal = problem.goal;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    const Step& step = steps[k];
    if (step.tactic == "sorry") {
      v.diagnostics.push_back({1, step.token_offset, Severity::kWarning, "declaration uses 'sorry'"});
      v.goals.push_back(goal_state(problem, goal));
      return finish(v);
    }
    auto next = apply_step(problem, goal, step);
    if (!next) {
      v.diagnostics.push_back({1, step.token_offset, Severity::kError,
                               "step " + std::to_string(k + 1) + " '" + step.text +
                                   "' does not apply to goal '" + print(goal) + "'"});
      v.goals.push_back(goal_state(problem, goal));
      return finish(v);
    }
    goal = std::move(*next);
  }

  if (closed(goal)) {
    v.pass = true;
    return finish(v);
  }
  const int past_end = static_cast<int>(detail::split_whitespace(proof_body(proof)).size()) + 1;
  v.diagnostics.push_back({1, past_end, Severity::kError, "unsolved goals: " + print(goal)});
  v.goals.push_back(goal_state(problem, goal));
  return finish(v);
}

}  // namespace proofsmith::toy
