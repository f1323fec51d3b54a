#include "proofsmith/rl_prep.hpp"

#include <cmath>
#include <set>

#include "proofsmith/digest.hpp"
#include "proofsmith/errors.hpp"

namespace proofsmith {

std::string_view to_string(TaskKind t) {
  return t == TaskKind::kWholeProof ? "whole_proof" : "correction_round_1";
}

TaskKind task_kind_from_string(std::string_view s) {
  if (s == "whole_proof") return TaskKind::kWholeProof;
  if (s == "correction_round_1") return TaskKind::kCorrectionRound1;
  throw ConfigError("unknown task kind '" + std::string(s) + "'");
}

std::size_t RLGroup::passed() const {
  std::size_t n = 0;
  for (const auto& r : rollouts) n += r.passed ? 1 : 0;
  return n;
}

double RLGroup::pass_rate() const {
  if (rollouts.empty()) return 0.0;
  return static_cast<double>(passed()) / static_cast<double>(rollouts.size());
}

std::vector<RLGroup> dynamic_filter(const std::vector<RLGroup>& groups, FilterWindow window) {
  std::vector<RLGroup> out;
  for (const auto& g : groups) {
    const double rate = g.pass_rate();
    if (rate > window.lo && rate <= window.hi) out.push_back(g);
  }
  return out;
}

namespace {

std::vector<const RLGroup*> unique_by_id(const std::vector<RLGroup>& pool) {
  std::vector<const RLGroup*> out;
  std::set<std::string> seen;
  for (const auto& g : pool) {
    if (seen.insert(g.input_id).second) out.push_back(&g);
  }
  return out;
}

std::vector<RLGroup> draw(const std::vector<const RLGroup*>& pool, std::size_t count, StableRng& rng) {
  std::vector<const RLGroup*> items = pool;
  std::vector<RLGroup> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(items.size() - i));
    std::swap(items[i], items[j]);
    out.push_back(*items[i]);
  }
  return out;
}

}  // namespace

Batch compose_batch(const std::vector<RLGroup>& whole_pool, const std::vector<RLGroup>& correction_pool,
                    std::size_t batch_size, double mix, std::uint64_t seed) {
  if (batch_size < 1) throw DomainError("batch size must be at least 1");
  if (!(mix >= 0.0 && mix <= 1.0)) throw DomainError("mix must lie in [0, 1]");
  // The epsilon keeps 0.5 * 128 from rounding up through representation error.
  const auto n_whole = static_cast<std::size_t>(std::ceil(mix * static_cast<double>(batch_size) - 1e-9));
  const std::size_t n_corr = batch_size - n_whole;

  const auto whole = unique_by_id(whole_pool);
  const auto corr = unique_by_id(correction_pool);
  if (whole.size() < n_whole) throw InsufficientPool("whole_proof", n_whole, whole.size());
  if (corr.size() < n_corr) throw InsufficientPool("correction_round_1", n_corr, corr.size());

  StableRng rng(splitmix64(seed));
  Batch batch;
  batch.whole_proof = draw(whole, n_whole, rng);
  batch.correction = draw(corr, n_corr, rng);
  return batch;
}

std::size_t oversample_plan(std::size_t train_batch) {
  if (train_batch < 1) throw DomainError("train batch must be at least 1");
  return 3 * train_batch;
}

double overlong_penalty(int len, OverlongParams p) {
  if (len < 0) throw DomainError("response length must be nonnegative");
  const int start = p.max_len - p.buffer;
  if (len <= start) return 0.0;
  if (len <= p.max_len) return -p.factor * static_cast<double>(len - start) / static_cast<double>(p.buffer);
  return -p.factor;
}

double reward(bool passed, int len, OverlongParams p) { return (passed ? 1.0 : 0.0) + overlong_penalty(len, p); }

std::vector<double> advantages(const RLGroup& group) {
  if (group.rollouts.size() < 2) {
    throw DegenerateGroup("group '" + group.input_id + "' has " + std::to_string(group.rollouts.size()) +
                          " rollouts; advantages need at least 2");
  }
  double sum = 0.0;
  for (const auto& r : group.rollouts) sum += r.reward;
  const double mean = sum / static_cast<double>(group.rollouts.size());
  std::vector<double> out;
  out.reserve(group.rollouts.size());
  for (const auto& r : group.rollouts) out.push_back(r.reward - mean);
  return out;
}

void assign_rewards(std::vector<RLGroup>& groups, OverlongParams p) {
  for (auto& g : groups) {
    for (auto& r : g.rollouts) r.reward = reward(r.passed, r.len, p);
  }
}

OrderedJson export_group(const RLGroup& group) {
  OrderedJson j;
  j["input_id"] = group.input_id;
  j["task"] = to_string(group.task);
  j["prompt"] = group.prompt;
  const auto adv = advantages(group);
  OrderedJson rollouts = OrderedJson::array();
  for (std::size_t i = 0; i < group.rollouts.size(); ++i) {
    const auto& r = group.rollouts[i];
    rollouts.push_back({{"len", r.len}, {"passed", r.passed}, {"reward", r.reward}, {"advantage", adv[i]}});
  }
  j["rollouts"] = rollouts;
  return j;
}

RLGroup group_from_json(const Json& row) {
  RLGroup g;
  g.input_id = row.at("input_id").get<std::string>();
  g.task = task_kind_from_string(row.value("task", std::string("whole_proof")));
  g.prompt = row.value("prompt", std::string());
  for (const Json& r : row.at("rollouts")) {
    Rollout out;
    out.len = r.at("len").get<int>();
    out.passed = r.at("passed").get<bool>();
    out.reward = r.value("reward", 0.0);
    g.rollouts.push_back(out);
  }
  return g;
}

OrderedJson batch_metadata_json(const BatchMetadata& meta, const Batch& batch) {
  OrderedJson j;
  j["train_batch_size"] = meta.train_batch_size;
  j["oversample_batch_size"] = oversample_plan(meta.train_batch_size);
  j["mix"] = meta.mix;
  j["whole_proof_groups"] = batch.whole_proof.size();
  j["correction_groups"] = batch.correction.size();
  j["seed"] = meta.seed;
  j["filter"] = {{"lo_exclusive", meta.window.lo}, {"hi_inclusive", meta.window.hi}};
  j["group_size"] = meta.group_size;
  j["overlong"] = {{"max_len", meta.overlong.max_len},
                   {"buffer", meta.overlong.buffer},
                   {"factor", meta.overlong.factor}};
  j["advantage"] = "mean_centered_no_std";
  j["optimizer_hints"] = {{"mini_batch_size", meta.mini_batch_size},
                          {"clip_higher", true},
                          {"kl_term", false},
                          {"entropy_term", false}};
  return j;
}

}  // namespace proofsmith
