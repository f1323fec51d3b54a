#include <set>

#include "doctest.h"
#include "proofsmith/errors.hpp"
#include "proofsmith/pipeline.hpp"
#include "proofsmith/repair.hpp"
#include "proofsmith/run_store.hpp"
#include "proofsmith/sft.hpp"
#include "proofsmith/toy_system.hpp"
#include "test_support.hpp"

using namespace proofsmith;
using testing::fenced;
using testing::rule;
using testing::stmt_with_id;

namespace {

const FormalStatement kP = stmt_with_id("theorem p (x : Int) (hx : x = 2) : x + x = 4 := by sorry", "p");

struct Harness {
  explicit Harness(std::vector<MockRule> rules, std::shared_ptr<TokenBudget> budget = nullptr)
      : mock(std::make_shared<MockBackend>(std::move(rules))),
        prover(mock, {}, std::move(budget)),
        templates(TemplateRegistry::builtin()),
        ctx(prover, verifier, templates) {}

  std::shared_ptr<MockBackend> mock;
  Prover prover;
  toy::ToyVerifier verifier;
  TemplateRegistry templates;
  ProvingContext ctx;
};

ProveConfig small(int n, int rounds) {
  ProveConfig cfg;
  cfg.n_samples = n;
  cfg.max_rounds = rounds;
  return cfg;
}

std::set<std::string> solved_set(const RunReport& r) {
  std::set<std::string> out;
  for (const auto& p : r.results) {
    if (p.solved) out.insert(p.statement_id);
  }
  return out;
}

// A backend whose reply length is fixed, to exercise budgets.
class WordyBackend final : public ProverBackend {
 public:
  explicit WordyBackend(int words) : words_(words) {}
  BackendReply complete(const GenerationRequest& req) override {
    std::string text;
    for (int i = 0; i < words_; ++i) text += "w ";
    std::lock_guard lock(mu);
    requested.push_back(req.max_tokens);
    return {text + "\n```lean4\nmul_zero\n```", std::nullopt, std::nullopt, false};
  }
  std::string id() const override { return "wordy"; }
  std::vector<int> requested;
  std::mutex mu;

 private:
  int words_;
};

// Answers BackendUnavailable a fixed number of times, then defers to the toy.
class FlakyVerifier final : public Verifier {
 public:
  explicit FlakyVerifier(int failures) : failures_(failures) {}
  Verdict verify(const FormalStatement& s, const std::string& p, const VerifyOptions& o) override {
    if (calls++ < failures_) throw BackendUnavailable("child died");
    return toy_.verify(s, p, o);
  }
  std::string id() const override { return "flaky"; }
  std::string proof_body(const std::string& p) const override { return toy_.proof_body(p); }
  int calls = 0;

 private:
  int failures_;
  toy::ToyVerifier toy_;
};

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("correct at round 0: one attempt per sample") {
  Harness h({rule("p", {fenced("rw hx norm")})});
  const auto r = prove_statement(kP, small(4, 2), h.ctx);
  CHECK(r.solved);
  CHECK(r.attempts.size() == 4);
  CHECK(r.passing_samples == 4);
  REQUIRE(r.first_success);
  CHECK(*r.first_success == std::pair(0, 0));
  for (const auto& a : r.attempts) CHECK(a.round == 0);
}

TEST_CASE("fixable with error messages: solved at round 1 only when feedback is shown") {
  MockRule fix = rule("p", {fenced("rw hx norm")});
  fix.fixable_with_error = true;
  fix.reply_without_error = fenced("rw hx mul_one");
  Harness h({fix});
  const auto r = prove_statement(kP, small(2, 2), h.ctx);
  CHECK(r.solved);
  REQUIRE(r.first_success);
  CHECK(r.first_success->second == 1);
  CHECK(r.attempts.size() == 4);

  auto cfg = small(2, 2);
  cfg.flags.include_error_messages = false;
  Harness ablated({fix});
  const auto r2 = prove_statement(kP, cfg, ablated.ctx);
  CHECK_FALSE(r2.solved);
  CHECK(r2.attempts.size() == 6);
}

TEST_CASE("zero rounds is plain whole-proof sampling") {
  Harness h({rule("p", {fenced("rw hx mul_one")})});
  const auto r = prove_statement(kP, small(3, 0), h.ctx);
  CHECK_FALSE(r.solved);
  CHECK(r.attempts.size() == 3);
  CHECK(h.mock->calls() == 3);
}

TEST_CASE("preconditions") {
  Harness h({});
  CHECK_THROWS_AS(prove_statement(kP, small(0, 2), h.ctx), PreconditionError);
  CHECK_THROWS_AS(prove_statement(kP, small(1, -1), h.ctx), PreconditionError);
  CHECK_THROWS_AS(run_benchmark({}, small(1, 0), h.ctx), EmptyCorpus);
  CHECK_THROWS_AS(run_benchmark({kP, kP}, small(1, 0), h.ctx), PreconditionError);
}

TEST_CASE("empty proof block counts as a failed round") {
  Harness h({rule("p", {"no code here"})});
  const auto r = prove_statement(kP, small(1, 1), h.ctx);
  REQUIRE(r.attempts.size() == 2);
  REQUIRE(r.attempts[0].verdict.diagnostics.size() == 1);
  CHECK(r.attempts[0].verdict.diagnostics[0].message == kNoProofBlockMessage);
  CHECK_FALSE(r.attempts[0].backend_failure);
}

TEST_CASE("correction prompts carry all prior rounds, or only the latest") {
  Harness h({rule("p", {fenced("rw hx mul_one", "first idea\n")})});
  const auto r = prove_statement(kP, small(1, 2), h.ctx);
  REQUIRE(r.attempts.size() == 3);
  CHECK(r.attempts[2].prompt.find("### Attempt 2") != std::string::npos);

  auto cfg = small(1, 2);
  cfg.flags.all_prior_rounds = false;
  Harness latest({rule("p", {fenced("rw hx mul_one")})});
  const auto r2 = prove_statement(kP, cfg, latest.ctx);
  REQUIRE(r2.attempts.size() == 3);
  CHECK(r2.attempts[2].prompt.find("### Attempt 2") == std::string::npos);
}

TEST_CASE("budget: round 0 gets the first-round cap, later rounds the remainder") {
  auto wordy = std::make_shared<WordyBackend>(9000);
  Prover prover(wordy);
  toy::ToyVerifier verifier;
  const auto reg = TemplateRegistry::builtin();
  ProvingContext ctx(prover, verifier, reg);
  const auto r = prove_statement(kP, small(1, 2), ctx);
  CHECK(wordy->requested == std::vector<int>{30'000, 40'000 - 9003, 40'000 - 2 * 9003});
  REQUIRE(r.attempts.size() == 3);
}

TEST_CASE("property: per-sample completion tokens never exceed the total budget") {
  for (int words : {100, 7000, 15000, 29990, 45000}) {
    auto wordy = std::make_shared<WordyBackend>(words);
    Prover prover(wordy);
    toy::ToyVerifier verifier;
    const auto reg = TemplateRegistry::builtin();
    ProvingContext ctx(prover, verifier, reg);
    const auto r = prove_statement(kP, small(3, 4), ctx);
    std::map<int, long long> per_sample;
    for (const auto& a : r.attempts) {
      per_sample[a.sample_index] += a.generation.completion_tokens;
      CHECK(a.round <= 4);
    }
    for (const auto& [s, total] : per_sample) CHECK(total <= 40'000);
  }
}

TEST_CASE("run-level budget exhaustion marks the attempt as a backend failure") {
  Harness h({rule("p", {fenced("rw hx mul_one")})}, std::make_shared<TokenBudget>(35'000));
  auto cfg = small(2, 2);
  cfg.max_generations = 1;
  cfg.max_verifications = 1;
  const auto r = prove_statement(kP, cfg, h.ctx);
  CHECK(r.partial_failure);
  bool any = false;
  for (const auto& a : r.attempts) any = any || a.backend_failure;
  CHECK(any);
}

TEST_CASE("verifier outages are retried, then recorded as backend failures") {
  auto mock = std::make_shared<MockBackend>(std::vector<MockRule>{rule("p", {fenced("rw hx norm")})});
  Prover prover(mock);
  const auto reg = TemplateRegistry::builtin();
  FlakyVerifier once(2);
  ProvingContext ctx(prover, once, reg);
  CHECK(prove_statement(kP, small(1, 0), ctx).solved);

  FlakyVerifier never(100);
  ProvingContext down(prover, never, reg);
  const auto r = prove_statement(kP, small(1, 2), down);
  REQUIRE(r.attempts.size() == 1);
  CHECK(r.attempts[0].backend_failure);
  CHECK(r.partial_failure);
  CHECK(never.calls == 3);
}

TEST_CASE("run_benchmark excludes statements with backend failures") {
  const auto q = stmt_with_id("theorem q (y : Int) : y * 1 = y := by sorry", "q");
  auto down = rule("q", {fenced("mul_one")});
  Harness h({rule("p", {fenced("rw hx norm")})});
  FlakyVerifier never(1'000'000);
  // q's verifier is down; p is verified by the toy.
  class Split final : public Verifier {
   public:
    Split(Verifier& a, Verifier& b) : a_(a), b_(b) {}
    Verdict verify(const FormalStatement& s, const std::string& p, const VerifyOptions& o) override {
      return s.id == "q" ? b_.verify(s, p, o) : a_.verify(s, p, o);
    }
    std::string id() const override { return "split"; }

   private:
    Verifier& a_;
    Verifier& b_;
  } split(h.verifier, never);
  auto mock = std::make_shared<MockBackend>(std::vector<MockRule>{rule("p", {fenced("rw hx norm")}), down});
  Prover prover(mock);
  ProvingContext ctx(prover, split, h.templates);
  const auto report = run_benchmark({kP, q}, small(2, 1), ctx);
  CHECK(report.excluded == 1);
  CHECK(report.metrics["total"] == 1);
  CHECK(report.metrics["excluded"] == 1);
  CHECK(report.metrics["solved"] == 1);
}

TEST_CASE("toy benchmark: deterministic and order independent") {
  const auto bench = testing::toy_bench(20);
  auto run = [&](int workers) {
    Harness h(bench.rules);
    auto cfg = small(4, 2);
    cfg.max_generations = workers;
    cfg.max_verifications = workers;
    return run_benchmark(bench.corpus, cfg, h.ctx);
  };
  const auto a = run(1);
  const auto b = run(8);
  CHECK(a.metrics.dump() == b.metrics.dump());
  REQUIRE(a.results.size() == b.results.size());
  for (std::size_t i = 0; i < a.results.size(); ++i) {
    REQUIRE(a.results[i].attempts.size() == b.results[i].attempts.size());
    for (std::size_t j = 0; j < a.results[i].attempts.size(); ++j) {
      CHECK(trace_to_json(a.results[i].attempts[j]).dump() == trace_to_json(b.results[i].attempts[j]).dump());
    }
  }
}

TEST_CASE("property: monotone in rounds, early stop, first_success is minimal") {
  const auto bench = testing::toy_bench(30);
  Harness h0(bench.rules);
  Harness h2(bench.rules);
  const auto r0 = run_benchmark(bench.corpus, small(4, 0), h0.ctx);
  const auto r2 = run_benchmark(bench.corpus, small(4, 2), h2.ctx);
  const auto s0 = solved_set(r0);
  const auto s2 = solved_set(r2);
  CHECK(std::includes(s2.begin(), s2.end(), s0.begin(), s0.end()));
  CHECK(s2.size() > s0.size());
  for (const auto& p : r2.results) {
    std::map<int, int> pass_round;
    std::optional<std::pair<int, int>> min_pass;
    for (const auto& a : p.attempts) {
      if (a.verdict.pass) {
        pass_round[a.sample_index] = a.round;
        if (!min_pass || std::pair(a.sample_index, a.round) < *min_pass) min_pass = std::pair(a.sample_index, a.round);
      }
    }
    for (const auto& a : p.attempts) {
      if (pass_round.count(a.sample_index)) CHECK(a.round <= pass_round[a.sample_index]);
    }
    CHECK(p.first_success == min_pass);
    CHECK(p.solved == min_pass.has_value());
  }
}

TEST_CASE("trace JSON round-trip") {
  Harness h({rule("p", {fenced("rw hx mul_one")})});
  const auto r = prove_statement(kP, small(1, 1), h.ctx);
  for (const auto& t : r.attempts) {
    const auto back = trace_from_json(Json::parse(trace_to_json(t).dump()));
    CHECK(trace_to_json(back).dump() == trace_to_json(t).dump());
  }
  const auto cfg = small(3, 1);
  CHECK(prove_config_to_json(prove_config_from_json(Json::parse(prove_config_to_json(cfg).dump()))).dump() ==
        prove_config_to_json(cfg).dump());
}

TEST_CASE("run store: resume re-verifies nothing and gives identical files") {
  testing::TempDir dir;
  const auto bench = testing::toy_bench(10);
  std::string first_results;
  std::size_t first_calls = 0;
  {
    Harness h(bench.rules);
    RunStore store(dir.path(), false);
    h.ctx.store = &store;
    const auto report = run_benchmark(bench.corpus, small(4, 2), h.ctx);
    const auto index = store.finalize(report);
    CHECK(index.size() == 10);
    first_results = testing::slurp(dir / kResultsFile);
    first_calls = h.mock->calls();
    CHECK(store.recorded() == first_calls);
  }
  {
    Harness h(bench.rules);
    RunStore store(dir.path(), true);
    CHECK(store.loaded() == first_calls);
    h.ctx.store = &store;
    int verifies = 0;
    class Counting final : public Verifier {
     public:
      explicit Counting(int& n) : n_(n) {}
      Verdict verify(const FormalStatement& s, const std::string& p, const VerifyOptions& o) override {
        ++n_;
        return toy_.verify(s, p, o);
      }
      std::string id() const override { return "toy"; }
      std::string proof_body(const std::string& p) const override { return toy_.proof_body(p); }

     private:
      int& n_;
      toy::ToyVerifier toy_;
    } counting(verifies);
    ProvingContext ctx(h.prover, counting, h.templates);
    ctx.store = &store;
    const auto report = run_benchmark(bench.corpus, small(4, 2), ctx);
    store.finalize(report);
    CHECK(h.mock->calls() == 0);
    CHECK(verifies == 0);
    CHECK(store.reused() == first_calls);
  }
  CHECK(testing::slurp(dir / kResultsFile) == first_results);

  const auto loaded = load_results(dir.path());
  REQUIRE(loaded.size() == 10);
  CHECK(loaded[0].statement_id == bench.corpus[0].id);
}

TEST_CASE("run ids depend on config and corpus") {
  OrderedJson a = {{"n", 1}};
  OrderedJson b = {{"n", 2}};
  CHECK(derive_run_id(a, "d") == derive_run_id(a, "d"));
  CHECK(derive_run_id(a, "d") != derive_run_id(b, "d"));
  CHECK(derive_run_id(a, "d") != derive_run_id(a, "e"));
  CHECK(derive_run_id(a, "d").size() == 16);
}

TEST_CASE("collect_sft emission rules") {
  const auto q = stmt_with_id("theorem q (y : Int) : y * 1 = y := by sorry", "q");
  const auto u = stmt_with_id("theorem u (y : Int) : y * 1 = 0 := by sorry", "u");
  MockRule fix = rule("p", {fenced("rw hx norm")});
  fix.fixable_with_error = true;
  fix.reply_without_error = fenced("rw hx mul_one");
  Harness h({fix, rule("q", {fenced("mul_one")}), rule("u", {fenced("mul_one")})});
  const auto report = run_benchmark({kP, q, u}, small(1, 2), h.ctx);
  const auto records = collect_sft(report.results, {kP, q, u}, {2, DedupPolicy::kExactProof, "run-x"});
  std::map<std::string, std::vector<std::string>> kinds;
  for (const auto& r : records) kinds[r["statement_id"].get<std::string>()].push_back(r["kind"].get<std::string>());
  CHECK(kinds["q"] == std::vector<std::string>{"whole_proof"});
  CHECK(kinds["p"].size() == 2);
  CHECK(std::count(kinds["p"].begin(), kinds["p"].end(), "correction") == 1);
  CHECK(kinds.count("u") == 0);
  for (const auto& r : records) {
    CHECK(r["source_run"] == "run-x");
    if (r["kind"] == "correction") {
      CHECK(r["target_proof"] == "rw hx norm");
      CHECK_FALSE(r["prior_attempts"].empty());
      CHECK_FALSE(r["prior_attempts"][0]["diagnostics"].empty());
    }
  }
}

TEST_CASE("collect_sft keeps at most k distinct proofs per statement") {
  const auto r = stmt_with_id("theorem r (y : Int) : y * 1 + 0 = y := by sorry", "r");
  Harness h({rule("r", {fenced("mul_one add_zero"), fenced("mul_one add_zero  "), fenced("add_zero mul_one")})});
  const auto report = run_benchmark({r}, small(6, 0), h.ctx);
  CHECK(report.results[0].passing_samples == 6);
  const auto records = collect_sft(report.results, {r}, {2, DedupPolicy::kExactProof, ""});
  REQUIRE(records.size() == 2);
  CHECK(records[0]["proof"] == "mul_one add_zero");
  CHECK(records[1]["proof"] == "add_zero mul_one");
  const auto all = collect_sft(report.results, {r}, {10, DedupPolicy::kNone, ""});
  CHECK(all.size() == 6);
}

TEST_CASE("rollout groups and the correction pool") {
  const auto bench = testing::toy_bench(10);
  Harness h(bench.rules);
  const auto report = run_benchmark(bench.corpus, small(4, 1), h.ctx);
  const auto whole = whole_proof_groups(report.results);
  CHECK(whole.size() == 10);
  for (const auto& g : whole) CHECK(g.group_size() == 4);
  const auto corr = correction_groups(report.results);
  for (const auto& g : corr) CHECK(g.task == TaskKind::kCorrectionRound1);
  const auto pool = correction_pool(report.results, bench.corpus);
  for (const auto& row : pool) CHECK_FALSE(row["diagnostics"].empty());
  CHECK_FALSE(pool.empty());
}

TEST_CASE("repair: planted sorry is replaced by a standalone subgoal proof") {
  // The subgoal after `rw hx` is `2 + 2 = 4` with no binders to rewrite.
  Harness h({rule("p_goal0", {fenced("norm")})});
  RepairOptions opts;
  opts.subgoal = small(2, 0);
  const auto r = repair_proof(kP, "rw hx sorry", h.ctx, opts);
  CHECK(r.proof == "rw hx norm");
  CHECK(r.subgoal.provenance == Provenance::kExtractedGoal);
  CHECK(h.verifier.verify(kP, r.proof, {}).pass);
}

TEST_CASE("repair: failure at the only step reduces to proving the statement") {
  Harness h({rule("p_goal0", {fenced("rw hx norm")})});
  RepairOptions opts;
  opts.subgoal = small(1, 0);
  const auto r = repair_proof(kP, "mul_zero", h.ctx, opts);
  CHECK(r.proof == "rw hx norm");
  CHECK(r.cut.col == 1);
}

TEST_CASE("repair: unsolved subgoal and passing input") {
  Harness h({rule("p_goal0", {fenced("mul_zero")})});
  RepairOptions opts;
  opts.subgoal = small(2, 1);
  CHECK_THROWS_AS(repair_proof(kP, "rw hx sorry", h.ctx, opts), RepairFailed);
  CHECK_THROWS_AS(repair_proof(kP, "rw hx norm", h.ctx, opts), PreconditionError);
}

}
