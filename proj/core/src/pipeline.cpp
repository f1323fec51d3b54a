#include "proofsmith/pipeline.hpp"

#include <algorithm>
#include <set>

#include "proofsmith/digest.hpp"
#include "proofsmith/errors.hpp"
#include "proofsmith/metrics.hpp"
#include "proofsmith/parallel.hpp"

namespace proofsmith {

OrderedJson prove_config_to_json(const ProveConfig& cfg) {
  OrderedJson j;
  j["n_samples"] = cfg.n_samples;
  j["max_rounds"] = cfg.max_rounds;
  j["tokens_first"] = cfg.budgets.first_round_tokens;
  j["tokens_total"] = cfg.budgets.total_tokens;
  j["include_error_messages"] = cfg.flags.include_error_messages;
  j["include_prior_cot"] = cfg.flags.include_prior_cot;
  j["all_prior_rounds"] = cfg.flags.all_prior_rounds;
  j["run_seed"] = cfg.run_seed;
  j["temperature"] = cfg.temperature;
  j["model"] = cfg.model;
  j["initial_template"] = cfg.initial_template;
  j["correction_template"] = cfg.correction_template;
  j["verify_timeout_ms"] = cfg.verify.timeout.count();
  j["verify_retries"] = cfg.verify_retries;
  j["max_generations"] = cfg.max_generations;
  j["max_verifications"] = cfg.max_verifications;
  return j;
}

ProveConfig prove_config_from_json(const Json& j) {
  ProveConfig c;
  c.n_samples = j.value("n_samples", c.n_samples);
  c.max_rounds = j.value("max_rounds", c.max_rounds);
  c.budgets.first_round_tokens = j.value("tokens_first", c.budgets.first_round_tokens);
  c.budgets.total_tokens = j.value("tokens_total", c.budgets.total_tokens);
  c.flags.include_error_messages = j.value("include_error_messages", c.flags.include_error_messages);
  c.flags.include_prior_cot = j.value("include_prior_cot", c.flags.include_prior_cot);
  c.flags.all_prior_rounds = j.value("all_prior_rounds", c.flags.all_prior_rounds);
  c.run_seed = j.value("run_seed", c.run_seed);
  c.temperature = j.value("temperature", c.temperature);
  c.model = j.value("model", c.model);
  c.initial_template = j.value("initial_template", c.initial_template);
  c.correction_template = j.value("correction_template", c.correction_template);
  c.verify.timeout = std::chrono::milliseconds(j.value("verify_timeout_ms", c.verify.timeout.count()));
  c.verify_retries = j.value("verify_retries", c.verify_retries);
  c.max_generations = j.value("max_generations", c.max_generations);
  c.max_verifications = j.value("max_verifications", c.max_verifications);
  return c;
}

OrderedJson trace_to_json(const AttemptTrace& t) {
  OrderedJson j;
  j["statement_id"] = t.statement_id;
  j["sample"] = t.sample_index;
  j["round"] = t.round;
  j["prompt"] = t.prompt;
  j["full_text"] = t.generation.full_text;
  j["cot"] = t.generation.cot_text;
  j["proof"] = t.generation.proof_text;
  j["prompt_tokens"] = t.generation.prompt_tokens;
  j["completion_tokens"] = t.generation.completion_tokens;
  j["finish_reason"] = std::string(to_string(t.generation.finish_reason));
  j["verdict"] = verdict_to_json(t.verdict);
  j["backend_failure"] = t.backend_failure;
  j["error"] = t.error.empty() ? t.generation.error : t.error;
  return j;
}

AttemptTrace trace_from_json(const Json& j) {
  AttemptTrace t;
  t.statement_id = j.at("statement_id").get<std::string>();
  t.sample_index = j.at("sample").get<int>();
  t.round = j.at("round").get<int>();
  t.prompt = j.value("prompt", std::string());
  t.generation.full_text = j.value("full_text", std::string());
  t.generation.cot_text = j.value("cot", std::string());
  t.generation.proof_text = j.value("proof", std::string());
  t.generation.prompt_tokens = j.value("prompt_tokens", 0);
  t.generation.completion_tokens = j.value("completion_tokens", 0);
  t.generation.finish_reason = finish_reason_from_string(j.value("finish_reason", std::string("stop")));
  if (j.contains("verdict")) t.verdict = verdict_from_json(j.at("verdict"));
  t.backend_failure = j.value("backend_failure", false);
  t.error = j.value("error", std::string());
  if (t.generation.finish_reason == FinishReason::kBackendError) t.generation.error = t.error;
  return t;
}

ProblemResult summarize(std::string statement_id, int n_samples, std::vector<AttemptTrace> attempts) {
  std::sort(attempts.begin(), attempts.end(), [](const AttemptTrace& a, const AttemptTrace& b) {
    return std::pair(a.sample_index, a.round) < std::pair(b.sample_index, b.round);
  });
  ProblemResult r;
  r.statement_id = std::move(statement_id);
  r.n_samples = n_samples;
  std::set<int> passing;
  for (const auto& a : attempts) {
    r.tokens_spent += a.generation.completion_tokens;
    if (a.backend_failure) r.partial_failure = true;
    if (a.verdict.pass) {
      passing.insert(a.sample_index);
      if (!r.first_success) r.first_success = std::pair(a.sample_index, a.round);
    }
  }
  r.passing_samples = static_cast<int>(passing.size());
  r.solved = !passing.empty();
  r.attempts = std::move(attempts);
  return r;
}

ProvingContext::ProvingContext(Prover& p, Verifier& v, const TemplateRegistry& t, int max_generations,
                               int max_verifications)
    : prover(p),
      verifier(v),
      templates(t),
      generations_(std::clamp(max_generations, 1, 4096)),
      verifications_(std::clamp(max_verifications, 1, 4096)) {}

GenerationResult ProvingContext::generate(const GenerationRequest& req) {
  generations_.acquire();
  try {
    GenerationResult r = prover.generate(req);
    generations_.release();
    return r;
  } catch (...) {
    generations_.release();
    throw;
  }
}

Verdict ProvingContext::verify(const FormalStatement& stmt, const std::string& proof, const VerifyOptions& opts) {
  verifications_.acquire();
  try {
    Verdict v = verifier.verify(stmt, proof, opts);
    verifications_.release();
    return v;
  } catch (...) {
    verifications_.release();
    throw;
  }
}

namespace {

AttemptTrace run_attempt(const FormalStatement& stmt, int sample, int round, int max_tokens,
                         const std::vector<PriorAttempt>& prior, const ProveConfig& cfg, ProvingContext& ctx) {
  AttemptTrace t;
  t.statement_id = stmt.id;
  t.sample_index = sample;
  t.round = round;
  if (round == 0) {
    t.prompt = build_initial_prompt(stmt, cfg.initial_template, ctx.templates);
  } else {
    AttemptContext actx;
    actx.statement = stmt;
    if (cfg.flags.all_prior_rounds) {
      actx.prior_attempts = prior;
    } else {
      actx.prior_attempts = {prior.back()};
    }
    actx.include_error_messages = cfg.flags.include_error_messages;
    actx.include_prior_cot = cfg.flags.include_prior_cot;
    t.prompt = build_correction_prompt(actx, cfg.correction_template, ctx.templates);
  }

  GenerationRequest req;
  req.prompt = t.prompt;
  req.max_tokens = max_tokens;
  req.temperature = cfg.temperature;
  req.seed = derive_seed(cfg.run_seed, stmt.id, sample, round);
  req.model = cfg.model;
  req.tags = {stmt.id, sample, round, "prove"};
  try {
    t.generation = ctx.generate(req);
  } catch (const BudgetExhausted& e) {
    t.backend_failure = true;
    t.error = e.what();
    t.generation.finish_reason = FinishReason::kBackendError;
    return t;
  }
  if (t.generation.finish_reason == FinishReason::kBackendError) {
    t.backend_failure = true;
    t.error = t.generation.error;
    return t;
  }
  if (t.generation.proof_text.empty()) {
    t.verdict.backend = ctx.verifier.id();
    t.verdict.diagnostics.push_back({1, 1, Severity::kError, std::string(kNoProofBlockMessage)});
    return t;
  }

  const std::string body = ctx.verifier.proof_body(t.generation.proof_text);
  for (int attempt = 0;; ++attempt) {
    try {
      t.verdict = ctx.verify(stmt, body, cfg.verify);
      t.verdict.wall_time = {};
      return t;
    } catch (const BackendUnavailable& e) {
      if (attempt >= cfg.verify_retries) {
        t.backend_failure = true;
        t.error = std::string("verifier unavailable: ") + e.what();
        return t;
      }
    } catch (const ProtocolError& e) {
      t.backend_failure = true;
      t.error = std::string("verifier protocol error: ") + e.what();
      return t;
    }
  }
}

}  // namespace

std::vector<AttemptTrace> prove_sample(const FormalStatement& stmt, int sample_index, const ProveConfig& cfg,
                                       ProvingContext& ctx) {
  std::vector<AttemptTrace> traces;
  std::vector<PriorAttempt> prior;
  long long spent = 0;
  for (int round = 0; round <= cfg.max_rounds; ++round) {
    const long long remaining = cfg.budgets.total_tokens - spent;
    const long long limit = round == 0 ? std::min<long long>(cfg.budgets.first_round_tokens, remaining) : remaining;
    if (limit <= 0) break;

    std::optional<AttemptTrace> cached;
    if (ctx.store) cached = ctx.store->lookup(stmt.id, sample_index, round);
    AttemptTrace t;
    if (cached && !cached->backend_failure) {
      t = std::move(*cached);
    } else {
      t = run_attempt(stmt, sample_index, round, static_cast<int>(limit), prior, cfg, ctx);
      if (ctx.store) ctx.store->record(t);
    }
    spent += t.generation.completion_tokens;
    const bool stop = t.backend_failure || t.verdict.pass;
    prior.push_back({t.generation.cot_text, t.generation.proof_text, t.verdict.diagnostics});
    traces.push_back(std::move(t));
    if (stop) break;
  }
  return traces;
}

namespace {

void check_config(const ProveConfig& cfg) {
  if (cfg.n_samples < 1) throw PreconditionError("n_samples must be at least 1");
  if (cfg.max_rounds < 0) throw PreconditionError("max_rounds must be nonnegative");
  if (cfg.budgets.first_round_tokens <= 0 || cfg.budgets.total_tokens <= 0) {
    throw PreconditionError("token budgets must be positive");
  }
}

std::size_t worker_count(const ProveConfig& cfg) {
  return static_cast<std::size_t>(std::max({1, cfg.max_generations, cfg.max_verifications}));
}

}  // namespace

ProblemResult prove_statement(const FormalStatement& stmt, const ProveConfig& cfg, ProvingContext& ctx) {
  check_config(cfg);
  std::vector<std::vector<AttemptTrace>> per_sample(static_cast<std::size_t>(cfg.n_samples));
  parallel_for_each_index(per_sample.size(), worker_count(cfg), [&](std::size_t s) {
    per_sample[s] = prove_sample(stmt, static_cast<int>(s), cfg, ctx);
  });
  std::vector<AttemptTrace> all;
  for (auto& traces : per_sample) {
    for (auto& t : traces) all.push_back(std::move(t));
  }
  return summarize(stmt.id, cfg.n_samples, std::move(all));
}

OrderedJson run_metrics(const std::vector<ProblemResult>& results, std::size_t* excluded) {
  std::vector<SampleCounts> counts;
  std::size_t skipped = 0;
  for (const auto& r : results) {
    if (r.partial_failure) {
      ++skipped;
      continue;
    }
    counts.push_back({r.n_samples, r.passing_samples});
  }
  if (excluded) *excluded = skipped;
  return metrics_json(counts, skipped);
}

RunReport run_benchmark(const std::vector<FormalStatement>& corpus, const ProveConfig& cfg, ProvingContext& ctx) {
  if (corpus.empty()) throw EmptyCorpus();
  check_config(cfg);
  std::set<std::string> ids;
  for (const auto& s : corpus) {
    if (!ids.insert(s.id).second) throw PreconditionError("duplicate statement id '" + s.id + "' in corpus");
  }

  const auto n = static_cast<std::size_t>(cfg.n_samples);
  std::vector<std::vector<AttemptTrace>> per_task(corpus.size() * n);
  parallel_for_each_index(per_task.size(), worker_count(cfg), [&](std::size_t task) {
    per_task[task] = prove_sample(corpus[task / n], static_cast<int>(task % n), cfg, ctx);
  });

  RunReport report;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    std::vector<AttemptTrace> all;
    for (std::size_t s = 0; s < n; ++s) {
      for (auto& t : per_task[i * n + s]) all.push_back(std::move(t));
    }
    report.results.push_back(summarize(corpus[i].id, cfg.n_samples, std::move(all)));
  }
  report.metrics = run_metrics(report.results, &report.excluded);
  return report;
}

}  // namespace proofsmith
