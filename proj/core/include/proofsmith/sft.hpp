#pragma once

// Training data drawn from finished runs: SFT records, the correction pool,
// and rollout groups for RL preparation.

#include <string>
#include <vector>

#include "proofsmith/io.hpp"
#include "proofsmith/pipeline.hpp"
#include "proofsmith/rl_prep.hpp"

namespace proofsmith {

enum class DedupPolicy { kNone, kExactProof };

struct SftOptions {
  int k = 2;  // proofs kept per statement
  DedupPolicy dedup = DedupPolicy::kExactProof;
  std::string source_run;
};

// For each solved statement, up to k passing attempts in (sample, round)
// order, each as a whole_proof record
//   {"kind", "statement_id", "statement", "cot", "proof", "round", "sample", "source_run"}
// and, when the pass came from a correction round, also a correction record
// holding the earlier attempts of that sample with their diagnostics as input
// and the passing proof as target.
std::vector<OrderedJson> collect_sft(const std::vector<ProblemResult>& results,
                                     const std::vector<FormalStatement>& corpus, const SftOptions& options);

// Failed first attempts with their diagnostics, one row per
// (statement, sample):
//   {"input_id", "statement_id", "statement", "cot", "proof", "diagnostics"}
std::vector<OrderedJson> correction_pool(const std::vector<ProblemResult>& results,
                                         const std::vector<FormalStatement>& corpus);

// Rollout groups from a run. Whole-proof groups hold every sample's first
// attempt of a statement; correction groups hold every first-round correction
// of a statement. Rewards are left at zero.
std::vector<RLGroup> whole_proof_groups(const std::vector<ProblemResult>& results);
std::vector<RLGroup> correction_groups(const std::vector<ProblemResult>& results);

}  // namespace proofsmith
