#pragma once

#include <optional>
#include <string>

#include "proofsmith/pipeline.hpp"

namespace proofsmith {

struct RepairOptions {
  // Settings for proving the isolated subgoal; it gets its own budgets.
  ProveConfig subgoal;
};

struct RepairResult {
  std::string proof;           // the repaired full proof
  FormalStatement subgoal;     // the statement proved standalone
  std::string subgoal_proof;   // body spliced in
  Diagnostic cut;              // where the original proof was cut
};

// Verifies `failed_proof`, lifts the goal at its failure point into a
// standalone statement, proves that, splices the subgoal proof in place of
// the failing suffix and re-verifies. Throws PreconditionError if the proof
// already passes and RepairFailed if the subgoal stays unsolved or the
// spliced proof still fails.
RepairResult repair_proof(const FormalStatement& stmt, const std::string& failed_proof, ProvingContext& ctx,
                          const RepairOptions& options = {});

}  // namespace proofsmith
