#include "proofsmith/verifier.hpp"

#include <algorithm>

#include "proofsmith/errors.hpp"
#include "text_util.hpp"

namespace proofsmith {

bool Verdict::has_errors() const {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::kError; });
}

bool same_outcome(const Verdict& a, const Verdict& b) {
  return a.pass == b.pass && a.diagnostics == b.diagnostics && a.goals == b.goals &&
         a.backend == b.backend && a.timed_out == b.timed_out;
}

Verdict timeout_verdict(std::string backend, std::chrono::milliseconds elapsed) {
  Verdict v;
  v.backend = std::move(backend);
  v.timed_out = true;
  v.wall_time = elapsed;
  v.diagnostics.push_back({1, 1, Severity::kError, std::string(kTimeoutMessage)});
  return v;
}

std::string Verifier::splice(const std::string& proof, const Diagnostic& at,
                             const std::string& replacement) const {
  // Walk to the (line, col) character position; columns count bytes.
  std::size_t pos = 0;
  for (int line = 1; line < at.line && pos < proof.size(); ++pos) {
    if (proof[pos] == '\n') ++line;
  }
  pos = std::min(proof.size(), pos + static_cast<std::size_t>(std::max(0, at.col - 1)));
  return proof.substr(0, pos) + replacement;
}

std::vector<GoalState> extract_goals(Verifier& verifier, const FormalStatement& stmt,
                                     const std::string& partial_proof, const VerifyOptions& options) {
  VerifyOptions opts = options;
  opts.extract_goals = true;
  Verdict v = verifier.verify(stmt, partial_proof, opts);
  if (v.pass) return {};
  return v.goals;
}

FormalStatement goal_to_statement(const GoalState& goal, const std::string& base_name, int index,
                                  const std::string& base_id) {
  FormalStatement s;
  const std::string suffix = "_goal" + std::to_string(index);
  s.name = base_name + suffix;
  s.id = (base_id.empty() ? base_name : base_id) + suffix;
  for (const auto& [name, type] : goal.hypotheses) {
    s.binders.push_back({name, type, BinderKind::kExplicit, BinderStyle::kParen, false});
  }
  s.goal_text = goal.target;
  s.provenance = Provenance::kExtractedGoal;
  s.raw_text = render(s);
  return s;
}

std::optional<Diagnostic> failure_point(const Verdict& verdict) {
  for (const auto& d : verdict.diagnostics) {
    if (d.severity == Severity::kError) return d;
    if (d.message.find("sorry") != std::string::npos) return d;
  }
  return std::nullopt;
}

std::string_view to_string(Severity s) { return s == Severity::kError ? "error" : "warning"; }

OrderedJson diagnostic_to_json(const Diagnostic& d) {
  OrderedJson j;
  j["line"] = d.line;
  j["col"] = d.col;
  j["severity"] = std::string(to_string(d.severity));
  j["message"] = d.message;
  return j;
}

Diagnostic diagnostic_from_json(const Json& j) {
  Diagnostic d;
  d.line = std::max(1, j.value("line", 1));
  d.col = std::max(1, j.value("col", 1));
  const std::string sev = j.value("severity", std::string("error"));
  if (sev != "error" && sev != "warning") throw ProtocolError("bad severity '" + sev + "'");
  d.severity = sev == "error" ? Severity::kError : Severity::kWarning;
  d.message = j.value("message", std::string());
  if (d.message.empty()) d.message = "(no message)";
  return d;
}

OrderedJson goal_to_json(const GoalState& g) {
  OrderedJson hyps = OrderedJson::array();
  for (const auto& [name, type] : g.hypotheses) hyps.push_back(OrderedJson::array({name, type}));
  OrderedJson j;
  j["hypotheses"] = std::move(hyps);
  j["target"] = g.target;
  return j;
}

GoalState goal_from_json(const Json& j) {
  GoalState g;
  for (const auto& h : j.at("hypotheses")) {
    if (!h.is_array() || h.size() != 2) throw ProtocolError("hypothesis must be [name, type]");
    g.hypotheses.emplace_back(h[0].get<std::string>(), h[1].get<std::string>());
  }
  g.target = j.at("target").get<std::string>();
  return g;
}

OrderedJson verdict_to_json(const Verdict& v) {
  OrderedJson errors = OrderedJson::array();
  for (const auto& d : v.diagnostics) errors.push_back(diagnostic_to_json(d));
  OrderedJson goals = OrderedJson::array();
  for (const auto& g : v.goals) goals.push_back(goal_to_json(g));
  OrderedJson j;
  j["pass"] = v.pass;
  j["errors"] = std::move(errors);
  j["goals"] = std::move(goals);
  j["backend"] = v.backend;
  j["timed_out"] = v.timed_out;
  return j;
}

Verdict verdict_from_json(const Json& j) {
  Verdict v;
  v.pass = j.at("pass").get<bool>();
  for (const auto& e : j.value("errors", Json::array())) v.diagnostics.push_back(diagnostic_from_json(e));
  for (const auto& g : j.value("goals", Json::array())) v.goals.push_back(goal_from_json(g));
  v.backend = j.value("backend", std::string());
  v.timed_out = j.value("timed_out", false);
  std::stable_sort(v.diagnostics.begin(), v.diagnostics.end(), [](const Diagnostic& a, const Diagnostic& b) {
    return std::tie(a.line, a.col) < std::tie(b.line, b.col);
  });
  return v;
}

}  // namespace proofsmith
