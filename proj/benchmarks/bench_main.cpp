#include <benchmark/benchmark.h>

#include <random>

#include "proofsmith/averaging.hpp"
#include "proofsmith/metrics.hpp"
#include "proofsmith/prover.hpp"
#include "proofsmith/statements.hpp"
#include "proofsmith/toy_system.hpp"

using namespace proofsmith;

static void BM_PassAtK(benchmark::State& state) {
  const long long n = state.range(0);
  for (auto _ : state) {
    double sum = 0.0;
    for (long long c = 0; c <= n; c += std::max<long long>(1, n / 16)) sum += pass_at_k(n, c, n / 2);
    benchmark::DoNotOptimize(sum);
  }
}
BENCHMARK(BM_PassAtK)->Arg(64)->Arg(1024)->Arg(100000);

static void BM_ToyVerify(benchmark::State& state) {
  toy::ToyVerifier v;
  const auto stmt = parse_theorem("theorem t (x : Int) (hx : x = 3) : x * 1 + 0 + 2 = 5 := by sorry");
  for (auto _ : state) benchmark::DoNotOptimize(v.verify(stmt, "rw hx mul_one add_zero norm", {}));
}
BENCHMARK(BM_ToyVerify);

static void BM_ParseTheorem(benchmark::State& state) {
  const std::string text =
      "theorem t {α : Type} [inst : Group α] (a b : α) (h : a * b = b * a) : (a * b) ^ 2 = a ^ 2 * b ^ 2 := by sorry";
  for (auto _ : state) benchmark::DoNotOptimize(parse_theorem(text));
}
BENCHMARK(BM_ParseTheorem);

static void BM_ParseProofBlock(benchmark::State& state) {
  std::string text(static_cast<std::size_t>(state.range(0)), 'x');
  text += "\n```lean4\ntheorem t : True := by\n  trivial\n```\n";
  for (auto _ : state) benchmark::DoNotOptimize(parse_proof_block(text));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_ParseProofBlock)->Arg(1 << 10)->Arg(1 << 16);

static void BM_Average(benchmark::State& state) {
  std::mt19937 rng(1);
  std::normal_distribution<float> d;
  auto make = [&] {
    Checkpoint c;
    Tensor t{"w", {state.range(0)}, {}};
    for (std::int64_t i = 0; i < state.range(0); ++i) t.data.push_back(d(rng));
    c.tensors.push_back(std::move(t));
    return c;
  };
  const auto base = make();
  const auto tuned = make();
  for (auto _ : state) benchmark::DoNotOptimize(average(base, tuned, 0.7));
  state.SetBytesProcessed(state.iterations() * state.range(0) * static_cast<std::int64_t>(sizeof(float)));
}
BENCHMARK(BM_Average)->Arg(1 << 12)->Arg(1 << 20);

BENCHMARK_MAIN();
