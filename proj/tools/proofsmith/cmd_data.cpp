#include <filesystem>
#include <iostream>

#include "app.hpp"
#include "proofsmith/averaging.hpp"
#include "proofsmith/corpus.hpp"
#include "proofsmith/errors.hpp"
#include "proofsmith/mock_backend.hpp"
#include "proofsmith/rl_prep.hpp"
#include "proofsmith/run_store.hpp"
#include "proofsmith/sft.hpp"
#include "proofsmith/synthesis.hpp"

namespace fs = std::filesystem;

namespace proofsmith::cli {

namespace {

void require_file(const std::string& path, const std::string& what) {
  if (!fs::exists(path)) throw ConfigError(what + " not found: " + path);
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    write_text_file_atomic(out, text);
  }
}

// ---- negate -------------------------------------------------------------------

struct NegateArgs {
  CommonOptions common;
  std::string in;
  std::string out;
  bool text = false;
};

int run_negate(NegateArgs& a) {
  require_file(a.in, "input corpus");
  const auto corpus = read_corpus(a.in);
  if (a.common.dry_run) {
    std::cout << "plan: negate " << corpus.size() << " statements from " << a.in << " into "
              << (a.out.empty() ? "stdout" : a.out) << "\n";
    return kOk;
  }
  const auto negated = negate_all(corpus);
  if (a.text) {
    std::string text;
    for (const auto& s : negated) text += render(s) + "\n";
    emit(a.out, text);
  } else {
    emit(a.out, corpus_to_jsonl(negated));
  }
  return kOk;
}

// ---- average ------------------------------------------------------------------

struct AverageArgs {
  CommonOptions common;
  std::string base;
  std::string tuned;
  double alpha = -1.0;
  std::string sweep;
  std::string out;
};

int run_average(CLI::App& cmd, AverageArgs& a) {
  require_file(a.base, "base checkpoint");
  require_file(a.tuned, "tuned checkpoint");
  const bool has_alpha = cmd.count("--alpha") > 0;
  const bool has_sweep = cmd.count("--sweep") > 0;
  if (has_alpha == has_sweep) throw ConfigError("give exactly one of --alpha or --sweep");
  if (a.out.empty()) throw ConfigError("average needs --out");
  const std::vector<double> alphas = has_sweep ? parse_double_list(a.sweep) : std::vector<double>{a.alpha};
  for (double x : alphas) {
    if (!(x >= 0.0 && x <= 1.0)) throw AlphaOutOfRange(x);
  }

  std::vector<std::string> paths;
  if (has_sweep) {
    for (double x : alphas) paths.push_back((fs::path(a.out) / ("avg_" + format_double(x) + ".gpck")).string());
  } else {
    paths.push_back(a.out);
  }
  if (a.common.dry_run) {
    for (std::size_t i = 0; i < alphas.size(); ++i) {
      std::cout << "plan: alpha=" << format_double(alphas[i]) << " -> " << paths[i] << "\n";
    }
    return kOk;
  }

  const Checkpoint base = read_checkpoint(a.base);
  const Checkpoint tuned = read_checkpoint(a.tuned);
  if (has_sweep) fs::create_directories(a.out);
  const auto outputs = sweep(base, tuned, alphas);
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    write_checkpoint(outputs[i], paths[i]);
    std::cout << paths[i] << "\talpha=" << format_double(alphas[i]) << "\ttensor_sha256=" << tensor_digest(outputs[i])
              << "\n";
  }
  return kOk;
}

// ---- rl-prep ------------------------------------------------------------------

struct RlPrepArgs {
  CommonOptions common;
  std::string run;
  std::string whole_groups;
  std::string correction_groups_file;
  std::string out = "rl_batch.jsonl";
  std::string meta;
  std::string correction_pool_out;
  std::size_t batch = 128;
  double mix = 0.5;
  std::string filter = "0,0.75";
  long long seed = 0;
  int max_len = 24'000;
  int buffer = 4'000;
  double factor = 1.0;
};

std::vector<RLGroup> read_groups(const std::string& path) {
  require_file(path, "group file");
  std::vector<RLGroup> out;
  for (const Json& row : read_jsonl(path)) out.push_back(group_from_json(row));
  return out;
}

int run_rl_prep(RlPrepArgs& a) {
  const auto window_vals = parse_double_list(a.filter);
  if (window_vals.size() != 2) throw ConfigError("--filter takes lo,hi");
  const FilterWindow window{window_vals[0], window_vals[1]};
  const OverlongParams overlong{a.max_len, a.buffer, a.factor};

  std::vector<RLGroup> whole;
  std::vector<RLGroup> corr;
  if (!a.run.empty()) {
    const auto results = load_results(a.run);
    whole = whole_proof_groups(results);
    corr = correction_groups(results);
    if (!a.correction_pool_out.empty()) {
      const auto m = read_manifest(a.run);
      const auto corpus = fs::exists(m.corpus_path) ? read_corpus(m.corpus_path) : std::vector<FormalStatement>{};
      write_text_file_atomic(a.correction_pool_out, to_jsonl(correction_pool(results, corpus)));
    }
  }
  if (!a.whole_groups.empty()) whole = read_groups(a.whole_groups);
  if (!a.correction_groups_file.empty()) corr = read_groups(a.correction_groups_file);
  if (whole.empty() && corr.empty()) throw ConfigError("rl-prep needs --run or --groups");

  // Degenerate groups carry no signal; drop them before filtering.
  auto drop_small = [](std::vector<RLGroup>& gs) {
    std::erase_if(gs, [](const RLGroup& g) { return g.rollouts.size() < 2; });
  };
  drop_small(whole);
  drop_small(corr);
  assign_rewards(whole, overlong);
  assign_rewards(corr, overlong);
  const auto whole_kept = dynamic_filter(whole, window);
  const auto corr_kept = dynamic_filter(corr, window);

  BatchMetadata meta;
  meta.train_batch_size = a.batch;
  meta.mix = a.mix;
  meta.seed = static_cast<std::uint64_t>(a.seed);
  meta.window = window;
  meta.overlong = overlong;
  if (!whole.empty()) meta.group_size = static_cast<int>(whole.front().rollouts.size());

  std::cerr << "whole_proof groups " << whole_kept.size() << "/" << whole.size() << " after filter, correction groups "
            << corr_kept.size() << "/" << corr.size() << "\n";
  if (a.common.dry_run) {
    std::cout << "plan: batch " << a.batch << " (mix " << format_double(a.mix) << ", oversample "
              << oversample_plan(a.batch) << ") into " << a.out << "\n";
    return kOk;
  }
  const Batch batch = compose_batch(whole_kept, corr_kept, a.batch, a.mix, meta.seed);
  std::vector<OrderedJson> rows;
  for (const auto& g : batch.whole_proof) rows.push_back(export_group(g));
  for (const auto& g : batch.correction) rows.push_back(export_group(g));
  write_text_file_atomic(a.out, to_jsonl(rows));
  const std::string meta_path = a.meta.empty() ? a.out + ".meta.json" : a.meta;
  write_text_file_atomic(meta_path, batch_metadata_json(meta, batch).dump(2) + "\n");
  std::cout << a.out << "\t" << rows.size() << " groups\n";
  return kOk;
}

// ---- synthesize ---------------------------------------------------------------

struct SynthArgs {
  CommonOptions common;
  std::string corpus;
  std::string out = "synthesized.jsonl";
  std::string audit;
  std::string mock_script;
};

int run_synthesize(CLI::App& cmd, SynthArgs& a) {
  Config cfg = resolve_config(a.common);
  apply_flag(cfg, cmd, "--mock-script", "prover.mock_script", a.mock_script);
  require_file(a.corpus, "corpus");
  const auto entries = read_corpus_entries(a.corpus);
  const auto opts = synthesis_options(cfg);
  if (a.common.dry_run) {
    std::cout << "plan: synthesize from " << entries.size() << " problems, " << opts.formalizations
              << " formalizations x " << opts.faithfulness_votes << " faithfulness votes, " << opts.gate_votes
              << " gate votes, into " << a.out << "\n"
              << cfg.describe();
    return kOk;
  }
  auto backend = make_prover_backend(cfg);
  auto verifier = make_verifier(cfg);
  const auto templates = load_templates(cfg);
  Prover prover(backend, retry_policy(cfg));
  SynthesisBackends backends{prover, prover, prover, *verifier, templates};
  const SynthesisReport report = synthesize(entries, backends, opts);

  write_text_file_atomic(a.out, corpus_to_jsonl(report.emitted));
  write_text_file_atomic(a.audit.empty() ? a.out + ".audit.jsonl" : a.audit, to_jsonl(report.audit));
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
  for (const auto& f : report.failures) std::cerr << "failed: " << f << "\n";
  std::cout << a.out << "\t" << report.emitted.size() << " statements from " << report.audit.size() << " candidates\n";
  return report.failures.empty() ? kOk : kPartialFailure;
}

// ---- scaffold -----------------------------------------------------------------

struct ScaffoldArgs {
  CommonOptions common;
  std::string run;
  std::string out = "scaffold.jsonl";
};

int run_scaffold(ScaffoldArgs& a) {
  Config cfg = resolve_config(a.common);
  const RunManifest m = read_manifest(a.run);
  require_file(m.corpus_path, "run corpus");
  const auto corpus = read_corpus(m.corpus_path);
  const auto results = load_results(a.run);
  if (a.common.dry_run) {
    std::cout << "plan: extract goals from failed attempts of " << results.size() << " statements into " << a.out << "\n";
    return kOk;
  }
  auto verifier = make_verifier(cfg);
  VerifyOptions vopts;
  vopts.timeout = std::chrono::milliseconds(cfg.get_int("verifier.timeout_ms"));
  std::vector<FormalStatement> out;
  for (const auto& r : results) {
    const auto it = std::find_if(corpus.begin(), corpus.end(), [&](const auto& s) { return s.id == r.statement_id; });
    if (it == corpus.end()) continue;
    std::vector<std::string> failed;
    for (const auto& t : r.attempts) {
      if (!t.verdict.pass && !t.backend_failure && !t.generation.proof_text.empty()) {
        failed.push_back(t.generation.proof_text);
      }
    }
    for (auto& s : formal_scaffold(*it, failed, *verifier, vopts)) out.push_back(std::move(s));
  }
  out = dedup(out);
  write_text_file_atomic(a.out, corpus_to_jsonl(out));
  std::cout << a.out << "\t" << out.size() << " statements\n";
  return kOk;
}

}  // namespace

Runner add_negate(CLI::App& app) {
  auto* cmd = app.add_subcommand("negate", "negate every statement of a corpus");
  auto a = std::make_shared<NegateArgs>();
  cmd->add_option("input", a->in, "statement corpus (JSON lines)")->required();
  cmd->add_option("--out", a->out, "output corpus (default: stdout)");
  cmd->add_flag("--text", a->text, "write rendered theorems instead of JSON lines");
  add_common_options(*cmd, a->common);
  return [a] { return run_negate(*a); };
}

Runner add_average(CLI::App& app) {
  auto* cmd = app.add_subcommand("average", "interpolate checkpoints: (1 - alpha) * base + alpha * tuned");
  auto a = std::make_shared<AverageArgs>();
  cmd->add_option("--base", a->base, "base checkpoint (GPCK)")->required();
  cmd->add_option("--tuned", a->tuned, "fine-tuned checkpoint (GPCK)")->required();
  cmd->add_option("--alpha", a->alpha, "weight of the tuned checkpoint, in [0, 1]");
  cmd->add_option("--sweep", a->sweep, "comma-separated alphas, e.g. 0.6,0.7,0.8,0.9; --out is then a directory");
  cmd->add_option("--out", a->out, "output checkpoint, or directory for --sweep")->required();
  add_common_options(*cmd, a->common);
  return [cmd, a] { return run_average(*cmd, *a); };
}

Runner add_rl_prep(CLI::App& app) {
  auto* cmd = app.add_subcommand("rl-prep", "filter rollout groups and compose an RL batch");
  auto a = std::make_shared<RlPrepArgs>();
  cmd->add_option("--run", a->run, "run directory to draw rollout groups from");
  cmd->add_option("--groups", a->whole_groups, "whole-proof groups (JSON lines)");
  cmd->add_option("--correction-groups", a->correction_groups_file, "correction groups (JSON lines)");
  cmd->add_option("--out", a->out, "batch output (JSON lines)")->capture_default_str();
  cmd->add_option("--meta", a->meta, "batch metadata (default: <out>.meta.json)");
  cmd->add_option("--export-correction-pool", a->correction_pool_out,
                  "write failed first attempts of --run with diagnostics here");
  cmd->add_option("--batch", a->batch, "train batch size")->capture_default_str();
  cmd->add_option("--mix", a->mix, "share of whole-proof groups")->capture_default_str();
  cmd->add_option("--filter", a->filter, "pass-rate window lo,hi: keeps lo < rate <= hi")->capture_default_str();
  cmd->add_option("--seed", a->seed, "batch sampling seed")->capture_default_str();
  cmd->add_option("--max-len", a->max_len, "response cap for the overlong penalty")->capture_default_str();
  cmd->add_option("--buffer", a->buffer, "overlong buffer below the cap")->capture_default_str();
  cmd->add_option("--factor", a->factor, "overlong penalty factor")->capture_default_str();
  add_common_options(*cmd, a->common);
  return [a] { return run_rl_prep(*a); };
}

Runner add_synthesize(CLI::App& app) {
  auto* cmd = app.add_subcommand("synthesize", "informal-based statement synthesis with judge voting");
  auto a = std::make_shared<SynthArgs>();
  cmd->add_option("corpus", a->corpus, "problems (JSON lines, optional \"solved\" field)")->required();
  cmd->add_option("--out", a->out, "emitted statements")->capture_default_str();
  cmd->add_option("--audit", a->audit, "audit trail (default: <out>.audit.jsonl)");
  cmd->add_option("--mock-script", a->mock_script, "use the scripted mock backend");
  add_common_options(*cmd, a->common);
  return [cmd, a] { return run_synthesize(*cmd, *a); };
}

Runner add_scaffold(CLI::App& app) {
  auto* cmd = app.add_subcommand("scaffold", "statements from goals left open by failed attempts of a run");
  auto a = std::make_shared<ScaffoldArgs>();
  cmd->add_option("run", a->run, "run directory")->required();
  cmd->add_option("--out", a->out, "output corpus")->capture_default_str();
  add_common_options(*cmd, a->common);
  return [a] { return run_scaffold(*a); };
}

}  // namespace proofsmith::cli
