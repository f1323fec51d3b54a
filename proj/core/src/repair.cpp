#include "proofsmith/repair.hpp"

#include "proofsmith/errors.hpp"

namespace proofsmith {

RepairResult repair_proof(const FormalStatement& stmt, const std::string& failed_proof, ProvingContext& ctx,
                          const RepairOptions& options) {
  VerifyOptions vopts = options.subgoal.verify;
  vopts.extract_goals = true;
  const std::string body = ctx.verifier.proof_body(failed_proof);
  const Verdict before = ctx.verify(stmt, body, vopts);
  if (before.pass) throw PreconditionError("proof of '" + stmt.name + "' already verifies");
  const auto cut = failure_point(before);
  if (!cut) throw RepairFailed("verifier reported no failure point for '" + stmt.name + "'");
  if (before.goals.empty()) throw RepairFailed("no goal state at the failure point of '" + stmt.name + "'");

  RepairResult out;
  out.cut = *cut;
  out.subgoal = goal_to_statement(before.goals.front(), stmt.name, 0, stmt.id);

  // A separate context keeps the subgoal's traces out of any run store.
  ProvingContext sub_ctx(ctx.prover, ctx.verifier, ctx.templates, options.subgoal.max_generations,
                         options.subgoal.max_verifications);
  const ProblemResult sub = prove_statement(out.subgoal, options.subgoal, sub_ctx);
  if (!sub.solved) throw RepairFailed("subgoal '" + out.subgoal.name + "' stayed unsolved");

  for (const auto& a : sub.attempts) {
    if (a.verdict.pass) {
      out.subgoal_proof = ctx.verifier.proof_body(a.generation.proof_text);
      break;
    }
  }
  out.proof = ctx.verifier.splice(body, *cut, out.subgoal_proof);
  const Verdict after = ctx.verify(stmt, out.proof, vopts);
  if (!after.pass) {
    const auto why = failure_point(after);
    throw RepairFailed("spliced proof of '" + stmt.name + "' still fails" + (why ? ": " + why->message : ""));
  }
  return out;
}

}  // namespace proofsmith
