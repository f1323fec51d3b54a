#pragma once

// Data preparation for verifier-reward RL: rollout groups, pass-rate
// filtering, two-task batch composition, overlong shaping and mean-centred
// advantages. No optimizer lives here.

#include <cstdint>
#include <string>
#include <vector>

#include "proofsmith/io.hpp"

namespace proofsmith {

enum class TaskKind { kWholeProof, kCorrectionRound1 };
std::string_view to_string(TaskKind t);
TaskKind task_kind_from_string(std::string_view s);

struct Rollout {
  int len = 0;  // response tokens
  bool passed = false;
  double reward = 0.0;
};

struct RLGroup {
  std::string input_id;
  TaskKind task = TaskKind::kWholeProof;
  std::string prompt;
  std::vector<Rollout> rollouts;

  std::size_t group_size() const { return rollouts.size(); }
  std::size_t passed() const;
  double pass_rate() const;  // 0 for an empty group
};

inline constexpr int kDefaultGroupSize = 8;

struct FilterWindow {
  double lo = 0.0;   // exclusive
  double hi = 0.75;  // inclusive
};

// Keeps groups with lo < pass_rate <= hi, in order.
std::vector<RLGroup> dynamic_filter(const std::vector<RLGroup>& groups, FilterWindow window = {});

struct Batch {
  std::vector<RLGroup> whole_proof;
  std::vector<RLGroup> correction;
};

// ceil(mix * B) whole-proof groups and the rest correction groups, each drawn
// without replacement under `seed`. Input ids repeated within a pool count
// once. Throws InsufficientPool or DomainError (mix outside [0,1], B < 1).
Batch compose_batch(const std::vector<RLGroup>& whole_pool, const std::vector<RLGroup>& correction_pool,
                    std::size_t batch_size, double mix, std::uint64_t seed);

// Prompts to sample before filtering: three times the train batch.
std::size_t oversample_plan(std::size_t train_batch);

struct OverlongParams {
  int max_len = 24'000;
  int buffer = 4'000;
  double factor = 1.0;
};

// 0 up to max_len - buffer, then a linear ramp to -factor at max_len, and
// -factor beyond.
double overlong_penalty(int len, OverlongParams p = {});

double reward(bool passed, int len, OverlongParams p = {});

// r_i - mean(r), without dividing by the group's standard deviation.
// Throws DegenerateGroup for fewer than two rollouts.
std::vector<double> advantages(const RLGroup& group);

// Fills every rollout's reward from (passed, len).
void assign_rewards(std::vector<RLGroup>& groups, OverlongParams p = {});

// {"input_id", "task", "prompt", "rollouts": [{"len", "passed", "reward", "advantage"}]}
OrderedJson export_group(const RLGroup& group);
// Reads the same shape; reward and advantage are optional on input.
RLGroup group_from_json(const Json& row);

struct BatchMetadata {
  std::size_t train_batch_size = 128;
  double mix = 0.5;
  std::uint64_t seed = 0;
  FilterWindow window;
  OverlongParams overlong;
  int group_size = kDefaultGroupSize;
  int mini_batch_size = 32;
};

// Records the sampling and optimizer settings an external trainer needs.
OrderedJson batch_metadata_json(const BatchMetadata& meta, const Batch& batch);

}  // namespace proofsmith
