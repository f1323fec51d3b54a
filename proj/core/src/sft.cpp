#include "proofsmith/sft.hpp"

#include <map>
#include <set>

namespace proofsmith {

namespace {

std::map<std::string, const FormalStatement*> index_corpus(const std::vector<FormalStatement>& corpus) {
  std::map<std::string, const FormalStatement*> out;
  for (const auto& s : corpus) out.emplace(s.id, &s);
  return out;
}

std::string statement_text(const std::map<std::string, const FormalStatement*>& index, const std::string& id) {
  const auto it = index.find(id);
  return it == index.end() ? std::string() : source_text(*it->second);
}

OrderedJson diagnostics_json(const std::vector<Diagnostic>& ds) {
  OrderedJson out = OrderedJson::array();
  for (const auto& d : ds) out.push_back(diagnostic_to_json(d));
  return out;
}

}  // namespace

std::vector<OrderedJson> collect_sft(const std::vector<ProblemResult>& results,
                                     const std::vector<FormalStatement>& corpus, const SftOptions& options) {
  const auto index = index_corpus(corpus);
  std::vector<OrderedJson> out;
  for (const auto& r : results) {
    if (!r.solved) continue;
    const std::string stmt = statement_text(index, r.statement_id);
    std::set<std::string> seen;
    int kept = 0;
    for (const auto& a : r.attempts) {
      if (kept >= options.k) break;
      if (!a.verdict.pass) continue;
      if (options.dedup == DedupPolicy::kExactProof && !seen.insert(normalized_text(a.generation.proof_text)).second) {
        continue;
      }
      ++kept;
      OrderedJson whole;
      whole["kind"] = "whole_proof";
      whole["statement_id"] = r.statement_id;
      whole["statement"] = stmt;
      whole["cot"] = a.generation.cot_text;
      whole["proof"] = a.generation.proof_text;
      whole["round"] = a.round;
      whole["sample"] = a.sample_index;
      whole["source_run"] = options.source_run;
      out.push_back(std::move(whole));
      if (a.round == 0) continue;

      OrderedJson prior = OrderedJson::array();
      for (const auto& p : r.attempts) {
        if (p.sample_index == a.sample_index && p.round < a.round) {
          prior.push_back({{"round", p.round},
                           {"cot", p.generation.cot_text},
                           {"proof", p.generation.proof_text},
                           {"diagnostics", diagnostics_json(p.verdict.diagnostics)}});
        }
      }
      OrderedJson corr;
      corr["kind"] = "correction";
      corr["statement_id"] = r.statement_id;
      corr["statement"] = stmt;
      corr["prior_attempts"] = prior;
      corr["prompt"] = a.prompt;
      corr["target_cot"] = a.generation.cot_text;
      corr["target_proof"] = a.generation.proof_text;
      corr["round"] = a.round;
      corr["sample"] = a.sample_index;
      corr["source_run"] = options.source_run;
      out.push_back(std::move(corr));
    }
  }
  return out;
}

std::vector<OrderedJson> correction_pool(const std::vector<ProblemResult>& results,
                                         const std::vector<FormalStatement>& corpus) {
  const auto index = index_corpus(corpus);
  std::vector<OrderedJson> out;
  for (const auto& r : results) {
    for (const auto& a : r.attempts) {
      if (a.round != 0 || a.verdict.pass || a.backend_failure) continue;
      OrderedJson row;
      row["input_id"] = r.statement_id + "/s" + std::to_string(a.sample_index);
      row["statement_id"] = r.statement_id;
      row["statement"] = statement_text(index, r.statement_id);
      row["cot"] = a.generation.cot_text;
      row["proof"] = a.generation.proof_text;
      row["diagnostics"] = diagnostics_json(a.verdict.diagnostics);
      out.push_back(std::move(row));
    }
  }
  return out;
}

namespace {

std::vector<RLGroup> groups_for_round(const std::vector<ProblemResult>& results, int round, TaskKind task,
                                      const std::string& suffix) {
  std::vector<RLGroup> out;
  for (const auto& r : results) {
    RLGroup g;
    g.input_id = r.statement_id + suffix;
    g.task = task;
    for (const auto& a : r.attempts) {
      if (a.round != round || a.backend_failure) continue;
      if (g.prompt.empty()) g.prompt = a.prompt;
      g.rollouts.push_back({a.generation.completion_tokens, a.verdict.pass, 0.0});
    }
    if (!g.rollouts.empty()) out.push_back(std::move(g));
  }
  return out;
}

}  // namespace

std::vector<RLGroup> whole_proof_groups(const std::vector<ProblemResult>& results) {
  return groups_for_round(results, 0, TaskKind::kWholeProof, "");
}

std::vector<RLGroup> correction_groups(const std::vector<ProblemResult>& results) {
  return groups_for_round(results, 1, TaskKind::kCorrectionRound1, "#correction");
}

}  // namespace proofsmith
