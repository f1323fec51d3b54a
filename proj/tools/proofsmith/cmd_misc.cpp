#include <filesystem>
#include <iostream>

#include "app.hpp"
#include "proofsmith/corpus.hpp"
#include "proofsmith/errors.hpp"
#include "proofsmith/repair.hpp"
#include "proofsmith/toy_system.hpp"
#include "proofsmith/verifier_server.hpp"

namespace fs = std::filesystem;

namespace proofsmith::cli {

namespace {

struct RepairArgs {
  CommonOptions common;
  std::string corpus;
  std::string id;
  std::string proof;
  std::string proof_file;
  std::string out;
  int n = 4;
  int rounds = 0;
  std::string mock_script;
};

int run_repair(CLI::App& cmd, RepairArgs& a) {
  Config cfg = resolve_config(a.common);
  apply_flag(cfg, cmd, "--mock-script", "prover.mock_script", a.mock_script);
  if (!fs::exists(a.corpus)) throw ConfigError("corpus not found: " + a.corpus);
  const auto corpus = read_corpus(a.corpus);
  if (corpus.empty()) throw EmptyCorpus();
  const FormalStatement* stmt = &corpus.front();
  if (!a.id.empty()) {
    stmt = nullptr;
    for (const auto& s : corpus) {
      if (s.id == a.id) stmt = &s;
    }
    if (!stmt) throw ConfigError("no statement with id '" + a.id + "' in " + a.corpus);
  }
  if (a.proof.empty() == a.proof_file.empty()) throw ConfigError("give exactly one of --proof or --proof-file");
  const std::string proof = a.proof_file.empty() ? a.proof : read_text_file(a.proof_file);

  RepairOptions opts;
  opts.subgoal = prove_config(cfg);
  opts.subgoal.n_samples = a.n;
  opts.subgoal.max_rounds = a.rounds;
  if (a.common.dry_run) {
    std::cout << "plan: repair '" << stmt->name << "' proving its open subgoal with " << a.n << " samples, "
              << a.rounds << " correction rounds\n";
    return kOk;
  }
  auto backend = make_prover_backend(cfg);
  auto verifier = make_verifier(cfg);
  const auto templates = load_templates(cfg);
  Prover prover(backend, retry_policy(cfg));
  ProvingContext ctx(prover, *verifier, templates, opts.subgoal.max_generations, opts.subgoal.max_verifications);
  try {
    const RepairResult r = repair_proof(*stmt, proof, ctx, opts);
    std::cerr << "subgoal " << r.subgoal.name << " solved; cut at col " << r.cut.col << "\n";
    if (a.out.empty()) {
      std::cout << r.proof << "\n";
    } else {
      write_text_file_atomic(a.out, r.proof + "\n");
    }
    return kOk;
  } catch (const RepairFailed& e) {
    std::cerr << "repair failed: " << e.what() << "\n";
    return kConfigError;
  }
}

}  // namespace

Runner add_repair(CLI::App& app) {
  auto* cmd = app.add_subcommand("repair", "prove the open subgoal of a failed proof and splice it back in");
  auto a = std::make_shared<RepairArgs>();
  cmd->add_option("corpus", a->corpus, "statement corpus (JSON lines)")->required();
  cmd->add_option("--id", a->id, "statement id (default: first statement)");
  cmd->add_option("--proof", a->proof, "failed proof text");
  cmd->add_option("--proof-file", a->proof_file, "file holding the failed proof");
  cmd->add_option("--out", a->out, "write the repaired proof here (default: stdout)");
  cmd->add_option("--n", a->n, "samples for the subgoal")->capture_default_str();
  cmd->add_option("--rounds", a->rounds, "correction rounds for the subgoal")->capture_default_str();
  cmd->add_option("--mock-script", a->mock_script, "use the scripted mock backend");
  add_common_options(*cmd, a->common);
  return [cmd, a] { return run_repair(*cmd, *a); };
}

Runner add_serve_verifier(CLI::App& app) {
  app.add_subcommand("serve-verifier", "answer JSON-lines verification requests on stdin with the toy checker");
  return [] {
    toy::ToyVerifier verifier;
    serve_verifier(verifier, std::cin, std::cout);
    return static_cast<int>(kOk);
  };
}

}  // namespace proofsmith::cli
