#include "proofsmith/synthesis.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "proofsmith/digest.hpp"
#include "proofsmith/errors.hpp"
#include "proofsmith/parallel.hpp"
#include "text_util.hpp"

namespace proofsmith {

// ---- formal scaffolding -------------------------------------------------------

std::vector<FormalStatement> formal_scaffold(const FormalStatement& stmt, const std::vector<std::string>& failed_attempts,
                                             Verifier& verifier, const VerifyOptions& options) {
  VerifyOptions opts = options;
  opts.extract_goals = true;
  std::vector<GoalState> goals;
  for (std::size_t i = 0; i < failed_attempts.size(); ++i) {
    const Verdict v = verifier.verify(stmt, verifier.proof_body(failed_attempts[i]), opts);
    if (v.pass) throw PreconditionError("attempt " + std::to_string(i + 1) + " for '" + stmt.name + "' verifies");
    for (const auto& g : v.goals) {
      if (std::find(goals.begin(), goals.end(), g) == goals.end()) goals.push_back(g);
    }
  }
  std::vector<FormalStatement> out;
  for (std::size_t k = 0; k < goals.size(); ++k) {
    FormalStatement s = goal_to_statement(goals[k], stmt.name, static_cast<int>(k), stmt.id);
    FormalStatement neg = negate(s);
    out.push_back(std::move(s));
    out.push_back(std::move(neg));
  }
  return dedup(out);
}

// ---- judges -------------------------------------------------------------------

std::string_view to_string(Vote v) {
  switch (v) {
    case Vote::kYes: return "yes";
    case Vote::kNo: return "no";
    case Vote::kUnsure: return "unsure";
  }
  return "unsure";
}

std::string_view to_string(Faithfulness f) {
  return f == Faithfulness::kAppropriate ? "appropriate" : "inappropriate";
}

std::string_view to_string(GateDecision d) {
  switch (d) {
    case GateDecision::kKeep: return "keep";
    case GateDecision::kKeepNegated: return "keep_negated";
    case GateDecision::kDiscard: return "discard";
  }
  return "discard";
}

std::string_view to_string(VariantDirection d) { return d == VariantDirection::kHarder ? "harder" : "simpler"; }

namespace {

Vote parse_vote(const std::string& raw) {
  const std::string v = detail::to_lower(detail::trim(raw));
  if (v == "yes") return Vote::kYes;
  if (v == "no") return Vote::kNo;
  if (v == "unsure") return Vote::kUnsure;
  throw JudgeParseError("judge value '" + raw + "' is not yes, no or unsure");
}

}  // namespace

JudgeVerdict parse_judge_tags(std::string_view text) {
  const auto open = text.find("<judge>");
  if (open == std::string_view::npos) throw JudgeParseError("no <judge> tag in reply");
  const auto body_start = open + 7;
  const auto close = text.find("</judge>", body_start);
  if (close == std::string_view::npos) throw JudgeParseError("unclosed <judge> tag in reply");
  const auto parts = detail::split(text.substr(body_start, close - body_start), ',');
  if (parts.size() != 2) throw JudgeParseError("expected two comma-separated judge values");
  JudgeVerdict v;
  v.correctness = parse_vote(parts[0]);
  v.simplicity = parse_vote(parts[1]);
  v.raw_text = std::string(text);
  return v;
}

Faithfulness parse_faithfulness(std::string_view text) {
  const std::string lower = detail::to_lower(std::string(text));
  std::size_t best = std::string::npos;
  std::size_t label_len = 0;
  for (std::string_view label : {std::string_view("judgement:"), std::string_view("judgment:")}) {
    const auto at = lower.rfind(label);
    if (at != std::string::npos && (best == std::string::npos || at > best)) {
      best = at;
      label_len = label.size();
    }
  }
  if (best == std::string::npos) throw JudgeParseError("no 'Judgement:' line in reply");
  std::size_t i = best + label_len;
  while (i < lower.size() && (lower[i] == ' ' || lower[i] == '\t' || lower[i] == '[' || lower[i] == '*')) ++i;
  std::size_t j = i;
  while (j < lower.size() && std::isalpha(static_cast<unsigned char>(lower[j]))) ++j;
  const std::string word = lower.substr(i, j - i);
  if (word == "appropriate") return Faithfulness::kAppropriate;
  if (word == "inappropriate") return Faithfulness::kInappropriate;
  throw JudgeParseError("judgement '" + word + "' is neither Appropriate nor Inappropriate");
}

GateDecision decide_gate(const std::vector<GateVote>& votes) {
  if (votes.empty()) return GateDecision::kDiscard;
  std::size_t simple = 0, yes = 0, no = 0;
  for (const auto& v : votes) {
    simple += v.simplicity == Vote::kYes;
    yes += v.correctness == Vote::kYes;
    no += v.correctness == Vote::kNo;
  }
  if (simple == votes.size()) return GateDecision::kDiscard;
  if (2 * yes > votes.size()) return GateDecision::kKeep;
  if (2 * no > votes.size()) return GateDecision::kKeepNegated;
  return GateDecision::kDiscard;
}

GateVote gate_vote_from_text(std::string raw) {
  GateVote v;
  try {
    const JudgeVerdict j = parse_judge_tags(raw);
    v.correctness = j.correctness;
    v.simplicity = j.simplicity;
  } catch (const JudgeParseError&) {
    v.parse_error = true;
  }
  v.raw_text = std::move(raw);
  return v;
}

bool faithful_majority(const std::vector<FaithfulVote>& votes) {
  std::size_t yes = 0;
  for (const auto& v : votes) yes += v.value == Faithfulness::kAppropriate;
  return 2 * yes > votes.size();
}

// ---- informal pipeline --------------------------------------------------------

namespace {

std::string call(Prover& prover, const std::string& prompt, int max_tokens, const std::string& item,
                 const std::string& purpose, int sample, int round, const SynthesisOptions& options) {
  GenerationRequest req;
  req.prompt = prompt;
  req.max_tokens = max_tokens;
  req.seed = derive_seed(options.seed, item + "/" + purpose, sample, round);
  req.tags = {item, sample, round, purpose};
  GenerationResult r = prover.generate(req);
  if (r.finish_reason == FinishReason::kBackendError) throw BackendError(r.error, 0);
  return r.full_text;
}

}  // namespace

std::vector<std::string> extract_tagged_spans(std::string_view text, std::vector<std::string>* warnings) {
  static constexpr std::string_view kOpen = "<newproblem>";
  static constexpr std::string_view kClose = "</newproblem>";
  auto warn = [&](std::string w) {
    if (warnings) warnings->push_back(std::move(w));
  };
  std::vector<std::string> out;
  std::size_t pos = 0;
  while ((pos = text.find(kOpen, pos)) != std::string_view::npos) {
    const std::size_t body = pos + kOpen.size();
    const std::size_t close = text.find(kClose, body);
    const std::size_t next_open = text.find(kOpen, body);
    if (close == std::string_view::npos) {
      warn("unclosed <newproblem> at byte " + std::to_string(pos));
      break;
    }
    if (next_open != std::string_view::npos && next_open < close) {
      warn("nested <newproblem> at byte " + std::to_string(pos) + " skipped");
      pos = next_open;
      continue;
    }
    const std::string span = detail::trim(text.substr(body, close - body));
    if (span.empty()) {
      warn("empty <newproblem> span at byte " + std::to_string(pos));
    } else {
      out.push_back(span);
    }
    pos = close + kClose.size();
  }
  return out;
}

VariantResult generate_variants(const std::string& problem, const std::string& problem_id, bool solved,
                                SynthesisBackends& backends, const SynthesisOptions& options) {
  VariantResult r;
  r.direction = solved ? VariantDirection::kHarder : VariantDirection::kSimpler;
  r.solution = call(backends.llm, backends.templates.render(templates::kInformalSolve, {{"problem", problem}}),
                    options.max_tokens, problem_id, "solve", 0, 0, options);
  const auto template_id = solved ? templates::kInformalHarder : templates::kInformalSimpler;
  const std::string purpose(to_string(r.direction));
  r.reply = call(backends.llm,
                 backends.templates.render(template_id, {{"problem", problem}, {"solution", r.solution}}),
                 options.max_tokens, problem_id, purpose, 0, 0, options);
  r.variants = extract_tagged_spans(r.reply, &r.warnings);
  if (r.variants.empty()) throw ExtractionEmpty();
  return r;
}

FormalizationOutcome formalize_and_check(const std::string& informal, const std::string& item_id,
                                         SynthesisBackends& backends, const SynthesisOptions& options) {
  FormalizationOutcome out;
  std::vector<std::optional<FormalStatement>> parsed;
  for (int a = 0; a < options.formalizations; ++a) {
    FormalizationAttempt att;
    att.reply = call(backends.formalizer,
                     backends.templates.render(templates::kFormalizer, {{"informal_statement", informal}}),
                     options.max_tokens, item_id, "formalize", a, 0, options);
    att.statement_text = detail::trim(parse_proof_block(att.reply).proof_text);
    std::optional<FormalStatement> stmt;
    if (att.statement_text.empty()) {
      att.syntax_error = "no code block in formalizer reply";
    } else {
      try {
        stmt = parse_theorem(att.statement_text);
        stmt->id = item_id;
        stmt->provenance = Provenance::kInformalSynthesis;
        stmt->docstring = informal;
        const Verdict v = backends.verifier.verify(*stmt, "sorry", options.verify);
        if (v.has_errors()) {
          const auto fp = failure_point(v);
          att.syntax_error = fp ? fp->message : "verifier rejected the statement";
          stmt.reset();
        }
      } catch (const ParseError& e) {
        att.syntax_error = e.what();
        stmt.reset();
      } catch (const MultipleTheorems& e) {
        att.syntax_error = e.what();
        stmt.reset();
      }
    }
    att.syntax_ok = stmt.has_value();
    if (att.syntax_ok) {
      att.votes.resize(static_cast<std::size_t>(options.faithfulness_votes));
      const std::string prompt = backends.templates.render(
          templates::kJudgeFaithfulness, {{"informal_statement", informal}, {"formal_statement", att.statement_text}});
      parallel_for_each_index(att.votes.size(), att.votes.size(), [&](std::size_t k) {
        FaithfulVote& vote = att.votes[k];
        vote.raw_text = call(backends.judge, prompt, options.judge_max_tokens, item_id, "faithfulness",
                             static_cast<int>(k), a, options);
        try {
          vote.value = parse_faithfulness(vote.raw_text);
        } catch (const JudgeParseError&) {
          vote.value.reset();
        }
      });
      att.faithful = faithful_majority(att.votes);
    }
    parsed.push_back(att.faithful ? stmt : std::nullopt);
    out.attempts.push_back(std::move(att));
  }
  for (auto& p : parsed) {
    if (p) {
      out.kept = std::move(p);
      break;
    }
  }
  return out;
}

GateOutcome correctness_simplicity_gate(const FormalStatement& stmt, SynthesisBackends& backends,
                                        const SynthesisOptions& options) {
  GateOutcome out;
  out.votes.resize(static_cast<std::size_t>(options.gate_votes));
  const std::string prompt = backends.templates.render(templates::kJudgeCorrectnessSimplicity,
                                                       {{"formal_statement", detail::trim(source_text(stmt))}});
  parallel_for_each_index(out.votes.size(), out.votes.size(), [&](std::size_t k) {
    out.votes[k] = gate_vote_from_text(
        call(backends.judge, prompt, options.judge_max_tokens, stmt.id, "gate", static_cast<int>(k), 0, options));
  });
  out.decision = decide_gate(out.votes);
  return out;
}

std::string problem_text(const FormalStatement& stmt) {
  if (stmt.docstring && !detail::trim(*stmt.docstring).empty()) return detail::trim(*stmt.docstring);
  return detail::trim(source_text(stmt));
}

namespace {

OrderedJson audit_formalizations(const FormalizationOutcome& f) {
  OrderedJson out = OrderedJson::array();
  for (const auto& a : f.attempts) {
    out.push_back({{"reply", a.reply},
                   {"statement", a.statement_text},
                   {"syntax_ok", a.syntax_ok},
                   {"syntax_error", a.syntax_error},
                   {"faithful", a.faithful}});
  }
  return out;
}

OrderedJson audit_faithful_votes(const FormalizationOutcome& f) {
  OrderedJson out = OrderedJson::array();
  for (const auto& a : f.attempts) {
    OrderedJson votes = OrderedJson::array();
    for (const auto& v : a.votes) {
      votes.push_back({{"raw", v.raw_text},
                       {"vote", v.value ? OrderedJson(std::string(to_string(*v.value))) : OrderedJson(nullptr)}});
    }
    out.push_back(std::move(votes));
  }
  return out;
}

OrderedJson audit_gate_votes(const std::vector<GateVote>& votes) {
  OrderedJson out = OrderedJson::array();
  for (const auto& v : votes) {
    out.push_back({{"raw", v.raw_text},
                   {"correctness", std::string(to_string(v.correctness))},
                   {"simplicity", std::string(to_string(v.simplicity))},
                   {"parse_error", v.parse_error}});
  }
  return out;
}

struct ItemResult {
  OrderedJson audit;
  std::optional<FormalStatement> emitted;
};

struct ProblemOutcome {
  std::vector<ItemResult> items;
  std::vector<std::string> warnings;
  std::optional<std::string> failure;
};

ProblemOutcome synthesize_problem(const CorpusEntry& entry, SynthesisBackends& backends,
                                  const SynthesisOptions& options) {
  ProblemOutcome out;
  const FormalStatement& p = entry.statement;
  try {
    const VariantResult vr = generate_variants(problem_text(p), p.id, entry.solved.value_or(false), backends, options);
    for (const auto& w : vr.warnings) out.warnings.push_back(p.id + ": " + w);
    for (std::size_t j = 0; j < vr.variants.size(); ++j) {
      const std::string item_id = p.id + "_v" + std::to_string(j);
      const FormalizationOutcome fo = formalize_and_check(vr.variants[j], item_id, backends, options);
      ItemResult item;
      OrderedJson& a = item.audit;
      a["id"] = item_id;
      a["problem_id"] = p.id;
      a["direction"] = std::string(to_string(vr.direction));
      a["solution"] = vr.solution;
      a["variant_reply"] = vr.reply;
      a["informal"] = vr.variants[j];
      a["formalizations"] = audit_formalizations(fo);
      a["faithful_votes"] = audit_faithful_votes(fo);
      if (!fo.kept) {
        a["gate_votes"] = OrderedJson::array();
        a["decision"] = "no_formalization";
      } else {
        const GateOutcome gate = correctness_simplicity_gate(*fo.kept, backends, options);
        a["gate_votes"] = audit_gate_votes(gate.votes);
        a["decision"] = std::string(to_string(gate.decision));
        if (gate.decision == GateDecision::kKeep) {
          item.emitted = *fo.kept;
        } else if (gate.decision == GateDecision::kKeepNegated) {
          item.emitted = negate(*fo.kept);
        }
      }
      out.items.push_back(std::move(item));
    }
  } catch (const Error& e) {
    out.failure = p.id + ": " + e.what();
  }
  return out;
}

}  // namespace

SynthesisReport synthesize(const std::vector<CorpusEntry>& corpus, SynthesisBackends& backends,
                           const SynthesisOptions& options) {
  std::vector<ProblemOutcome> outcomes(corpus.size());
  parallel_for_each_index(corpus.size(), static_cast<std::size_t>(std::max(1, options.workers)),
                          [&](std::size_t i) { outcomes[i] = synthesize_problem(corpus[i], backends, options); });

  SynthesisReport report;
  std::set<std::string> seen;
  for (auto& o : outcomes) {
    for (auto& w : o.warnings) report.warnings.push_back(std::move(w));
    if (o.failure) report.failures.push_back(*o.failure);
    for (auto& item : o.items) {
      item.audit["deduplicated"] = false;
      if (item.emitted) {
        const std::string text = source_text(*item.emitted);
        if (seen.insert(normalized_text(text)).second) {
          item.audit["emitted"] = text;
          report.emitted.push_back(std::move(*item.emitted));
        } else {
          item.audit["emitted"] = nullptr;
          item.audit["deduplicated"] = true;
        }
      } else {
        item.audit["emitted"] = nullptr;
      }
      report.audit.push_back(std::move(item.audit));
    }
  }
  return report;
}

std::string recompute_decision(const Json& audit_record) {
  const Json& forms = audit_record.at("formalizations");
  const Json& votes = audit_record.at("faithful_votes");
  bool kept = false;
  for (std::size_t a = 0; a < forms.size() && !kept; ++a) {
    if (!forms[a].at("syntax_ok").get<bool>()) continue;
    std::vector<FaithfulVote> parsed;
    for (const Json& v : votes.at(a)) {
      FaithfulVote fv;
      fv.raw_text = v.at("raw").get<std::string>();
      try {
        fv.value = parse_faithfulness(fv.raw_text);
      } catch (const JudgeParseError&) {
      }
      parsed.push_back(std::move(fv));
    }
    kept = faithful_majority(parsed);
  }
  if (!kept) return "no_formalization";
  std::vector<GateVote> gate;
  for (const Json& v : audit_record.at("gate_votes")) gate.push_back(gate_vote_from_text(v.at("raw").get<std::string>()));
  return std::string(to_string(decide_gate(gate)));
}

}  // namespace proofsmith
