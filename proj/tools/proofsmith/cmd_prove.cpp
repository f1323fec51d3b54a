#include <cstdio>
#include <filesystem>
#include <iostream>

#include "app.hpp"
#include "proofsmith/corpus.hpp"
#include "proofsmith/digest.hpp"
#include "proofsmith/errors.hpp"
#include "proofsmith/metrics.hpp"
#include "proofsmith/run_store.hpp"
#include "proofsmith/sft.hpp"

namespace fs = std::filesystem;

namespace proofsmith::cli {

namespace {

struct ProveArgs {
  CommonOptions common;
  std::string corpus;
  std::string out = "run";
  std::string resume;
  int n = 32;
  int rounds = 2;
  int tokens_first = 30'000;
  int tokens_total = 40'000;
  bool no_error_messages = false;
  bool no_prior_cot = false;
  bool latest_only = false;
  long long seed = 0;
  std::string mock_script;
};

std::string absolute_path(const std::string& p) { return p.empty() ? p : fs::absolute(p).lexically_normal().string(); }

void print_metrics(const OrderedJson& metrics) {
  std::printf("solved %lld/%lld (excluded %lld)\n", metrics["solved"].get<long long>(),
              metrics["total"].get<long long>(), metrics["excluded"].get<long long>());
  for (const auto& [k, v] : metrics["pass_at"].items()) std::printf("pass@%s\t%.4f\n", k.c_str(), v.get<double>());
}

int run_prove(CLI::App& cmd, ProveArgs& a) {
  Config cfg;
  std::string corpus_path;
  std::string out_dir;
  const bool resume = !a.resume.empty();
  if (resume) {
    out_dir = a.resume;
    const RunManifest m = read_manifest(out_dir);
    cfg.load_json(Json::parse(m.config.dump()), "manifest");
    cfg.load_env();
    corpus_path = m.corpus_path;
    if (fs::exists(corpus_path) && sha256_hex(read_text_file(corpus_path)) != m.corpus_digest) {
      throw ConfigError("corpus " + corpus_path + " changed since the run started (digest mismatch)");
    }
  } else {
    cfg = resolve_config(a.common);
    apply_flag(cfg, cmd, "--n", "run.n", a.n);
    apply_flag(cfg, cmd, "--rounds", "run.rounds", a.rounds);
    apply_flag(cfg, cmd, "--tokens-first", "run.tokens_first", a.tokens_first);
    apply_flag(cfg, cmd, "--tokens-total", "run.tokens_total", a.tokens_total);
    if (a.no_error_messages) cfg.set("run.error_messages", "false", "flag --no-error-messages");
    if (a.no_prior_cot) cfg.set("run.prior_cot", "false", "flag --no-prior-cot");
    if (a.latest_only) cfg.set("run.all_prior_rounds", "false", "flag --latest-only");
    apply_flag(cfg, cmd, "--seed", "run.seed", a.seed);
    apply_flag(cfg, cmd, "--mock-script", "prover.mock_script", a.mock_script);
    cfg.set("prover.mock_script", absolute_path(cfg.get("prover.mock_script")), cfg.origin("prover.mock_script"));
    if (a.corpus.empty()) throw ConfigError("prove needs a corpus file (or --resume RUN_DIR)");
    corpus_path = absolute_path(a.corpus);
    out_dir = a.out;
  }
  if (!fs::exists(corpus_path)) throw ConfigError("corpus file not found: " + corpus_path);
  const std::string corpus_bytes = read_text_file(corpus_path);
  const auto corpus = parse_corpus(corpus_bytes, corpus_path);
  if (corpus.empty()) throw EmptyCorpus();
  const ProveConfig pc = prove_config(cfg);

  if (a.common.dry_run) {
    std::cout << "plan: prove " << corpus.size() << " statements x " << pc.n_samples << " samples, up to "
              << pc.max_rounds << " correction rounds, into " << out_dir << (resume ? " (resume)" : "") << "\n"
              << cfg.describe();
    return kOk;
  }

  auto backend = make_prover_backend(cfg);
  auto verifier = make_verifier(cfg);
  const TemplateRegistry templates = load_templates(cfg);
  const auto budget_limit = cfg.get_int("run.token_budget");
  Prover prover(backend, retry_policy(cfg), budget_limit > 0 ? std::make_shared<TokenBudget>(budget_limit) : nullptr);

  RunManifest manifest;
  manifest.config = cfg.to_json();
  manifest.corpus_path = corpus_path;
  manifest.corpus_digest = sha256_hex(corpus_bytes);
  manifest.run_id = derive_run_id(manifest.config, manifest.corpus_digest);
  manifest.backends = {{"prover", backend->id()}, {"verifier", verifier->id()}};
  for (const auto& [id, digest] : templates.digests()) manifest.template_digests[id] = digest;
  manifest.created_at = utc_timestamp();
  if (resume) {
    const RunManifest old = read_manifest(out_dir);
    if (!old.created_at.empty()) manifest.created_at = old.created_at;
  }
  fs::create_directories(out_dir);
  write_manifest(out_dir, manifest);

  RunStore store(out_dir, resume);
  ProvingContext ctx(prover, *verifier, templates, pc.max_generations, pc.max_verifications);
  ctx.store = &store;
  const RunReport report = run_benchmark(corpus, pc, ctx);

  manifest.results_index = store.finalize(report);
  manifest.status = report.excluded > 0 ? "partial" : "complete";
  manifest.finished_at = utc_timestamp();
  write_manifest(out_dir, manifest);
  write_text_file_atomic(fs::path(out_dir) / kMetricsFile, report.metrics.dump(2) + "\n");
  SftOptions sft;
  sft.k = static_cast<int>(cfg.get_int("sft.k"));
  sft.source_run = manifest.run_id;
  write_text_file_atomic(fs::path(out_dir) / kSftFile, to_jsonl(collect_sft(report.results, corpus, sft)));

  print_metrics(report.metrics);
  std::cerr << "run " << manifest.run_id << ": " << store.recorded() << " attempts computed, " << store.reused()
            << " reused, backend calls " << call_count(*backend) << "\n";
  if (report.excluded > 0) {
    std::cerr << report.excluded << " statements had backend failures and were excluded from metrics\n";
    return kPartialFailure;
  }
  return kOk;
}

struct StatsArgs {
  std::vector<std::string> runs;
  std::string ks;
};

int run_stats(StatsArgs& a) {
  std::vector<std::vector<CurvePoint>> curves;
  for (const auto& dir : a.runs) {
    if (!fs::exists(fs::path(dir) / kResultsFile)) throw ConfigError("no " + std::string(kResultsFile) + " in " + dir);
    std::vector<SampleCounts> counts;
    long long n = 0;
    for (const auto& r : load_results(dir)) {
      if (r.partial_failure) continue;
      counts.push_back({r.n_samples, r.passing_samples});
      n = r.n_samples;
    }
    const auto ks = a.ks.empty() ? default_ks(n) : parse_int_list(a.ks);
    curves.push_back(scaling_curve(counts, ks));
  }
  if (curves.size() == 1) {
    std::printf("k\tpass@k\n");
    for (const auto& p : curves[0]) std::printf("%lld\t%.6f\n", p.k, p.value);
    return kOk;
  }
  std::printf("k\tmean\tstderr\truns\n");
  for (std::size_t i = 0; i < curves[0].size(); ++i) {
    std::vector<double> per_run;
    for (const auto& c : curves) {
      if (c.size() != curves[0].size() || c[i].k != curves[0][i].k) throw ConfigError("runs disagree on the k list");
      per_run.push_back(c[i].value);
    }
    const MeanStderr m = aggregate_with_stderr(per_run);
    std::printf("%lld\t%.6f\t%.6f\t%zu\n", curves[0][i].k, m.mean, m.stderr_.value_or(0.0), per_run.size());
  }
  return kOk;
}

}  // namespace

Runner add_prove(CLI::App& app) {
  auto* cmd = app.add_subcommand("prove", "sample proofs with self-correction over a statement corpus");
  auto a = std::make_shared<ProveArgs>();
  cmd->add_option("corpus", a->corpus, "statement corpus (JSON lines)");
  cmd->add_option("--out", a->out, "run directory")->capture_default_str();
  cmd->add_option("--resume", a->resume, "continue the run in this directory, reusing finished attempts");
  cmd->add_option("--n", a->n, "samples per statement")->capture_default_str();
  cmd->add_option("--rounds", a->rounds, "self-correction rounds (0 = whole-proof only)")->capture_default_str();
  cmd->add_option("--tokens-first", a->tokens_first, "max tokens of the first attempt")->capture_default_str();
  cmd->add_option("--tokens-total", a->tokens_total, "tokens per sample across all rounds")->capture_default_str();
  cmd->add_flag("--no-error-messages", a->no_error_messages, "drop verifier diagnostics from correction prompts");
  cmd->add_flag("--no-prior-cot", a->no_prior_cot, "drop earlier reasoning from correction prompts");
  cmd->add_flag("--latest-only", a->latest_only, "show only the latest failed attempt in correction prompts");
  cmd->add_option("--seed", a->seed, "run seed")->capture_default_str();
  cmd->add_option("--mock-script", a->mock_script, "use the scripted mock backend");
  add_common_options(*cmd, a->common);
  return [cmd, a] { return run_prove(*cmd, *a); };
}

Runner add_stats(CLI::App& app) {
  auto* cmd = app.add_subcommand("stats", "pass@k table of one run, or mean and stderr over several");
  auto a = std::make_shared<StatsArgs>();
  cmd->add_option("runs", a->runs, "run directories")->required();
  cmd->add_option("--k", a->ks, "comma-separated k values (default: powers of two up to n)");
  return [a] { return run_stats(*a); };
}

}  // namespace proofsmith::cli
