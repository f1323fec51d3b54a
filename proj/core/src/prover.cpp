#include "proofsmith/prover.hpp"

#include <stdexcept>
#include <thread>

#include "proofsmith/errors.hpp"
#include "text_util.hpp"

namespace proofsmith {

std::string build_initial_prompt(const FormalStatement& stmt, std::string_view template_id,
                                 const TemplateRegistry& templates) {
  templates.require(template_id, "formal_statement");
  return templates.render(template_id, {
                                           {"formal_statement", detail::trim(source_text(stmt))},
                                           {"informal_statement", stmt.docstring.value_or("")},
                                       });
}

std::string render_diagnostic(const Diagnostic& d) {
  return "line " + std::to_string(d.line) + ", col " + std::to_string(d.col) + ": " + d.message;
}

std::string build_correction_prompt(const AttemptContext& ctx, std::string_view template_id,
                                    const TemplateRegistry& templates) {
  if (ctx.prior_attempts.empty()) throw PreconditionError("correction prompt needs at least one prior attempt");
  templates.require(template_id, "formal_statement");
  templates.require(template_id, "prior_attempts");

  std::string attempts;
  for (std::size_t i = 0; i < ctx.prior_attempts.size(); ++i) {
    const PriorAttempt& a = ctx.prior_attempts[i];
    if (i > 0) attempts += "\n";
    attempts += "### Attempt " + std::to_string(i + 1) + "\n\n";
    if (ctx.include_prior_cot && !a.cot_text.empty()) {
      attempts += "Reasoning:\n" + detail::trim(a.cot_text) + "\n\n";
    }
    if (a.proof_text.empty()) {
      attempts += "Proof: (no proof block was produced)\n\n";
    } else {
      attempts += "Proof:\n```lean4\n" + a.proof_text + "\n```\n\n";
    }
    if (ctx.include_error_messages && !a.diagnostics.empty()) {
      attempts += "Verifier feedback:\n";
      for (const auto& d : a.diagnostics) attempts += render_diagnostic(d) + "\n";
    } else {
      attempts += "The verifier rejected this proof.\n";
    }
  }

  return templates.render(template_id, {
                                           {"formal_statement", detail::trim(source_text(ctx.statement))},
                                           {"informal_statement", ctx.statement.docstring.value_or("")},
                                           {"prior_attempts", detail::trim(attempts)},
                                       });
}

std::string_view to_string(FinishReason r) {
  switch (r) {
    case FinishReason::kStop: return "stop";
    case FinishReason::kLength: return "length";
    case FinishReason::kBackendError: return "backend_error";
  }
  return "stop";
}

FinishReason finish_reason_from_string(std::string_view s) {
  if (s == "length") return FinishReason::kLength;
  if (s == "backend_error") return FinishReason::kBackendError;
  return FinishReason::kStop;
}

namespace {

// Length of an opening fence (``` + tag + rest-of-line) at pos, or 0.
std::size_t opening_fence(std::string_view text, std::size_t pos) {
  if (text.substr(pos, 3) != "```") return 0;
  std::size_t i = pos + 3;
  for (std::string_view tag : {std::string_view("lean4"), std::string_view("lean")}) {
    if (text.substr(i, tag.size()) == tag) {
      std::size_t j = i + tag.size();
      while (j < text.size() && (text[j] == ' ' || text[j] == '\t' || text[j] == '\r')) ++j;
      if (j < text.size() && text[j] == '\n') return j + 1 - pos;
      return 0;
    }
  }
  return 0;
}

}  // namespace

ProofBlock parse_proof_block(std::string_view full_text) {
  std::optional<std::pair<std::size_t, std::pair<std::size_t, std::size_t>>> last;
  std::size_t pos = 0;
  while ((pos = full_text.find("```", pos)) != std::string_view::npos) {
    const std::size_t open = opening_fence(full_text, pos);
    if (open == 0) {
      pos += 3;
      continue;
    }
    const std::size_t body_begin = pos + open;
    std::size_t close = body_begin;
    for (;;) {
      close = full_text.find("```", close);
      if (close == std::string_view::npos || full_text[close - 1] == '\n') break;
      close += 3;
    }
    if (close == std::string_view::npos) break;  // unclosed: truncated output
    const std::size_t body_end = close - 1 >= body_begin ? close - 1 : body_begin;
    last = {pos, {body_begin, body_end}};
    pos = close + 3;
  }
  if (!last) return {std::string(full_text), std::string()};
  const auto [open_pos, body] = *last;
  return {std::string(full_text.substr(0, open_pos)),
          std::string(full_text.substr(body.first, body.second - body.first))};
}

int count_tokens(std::string_view text) {
  int n = 0;
  bool in_token = false;
  for (char c : text) {
    const bool space = detail::ascii_space(c);
    if (!space && !in_token) ++n;
    in_token = !space;
  }
  return n;
}

namespace {

// Prefix of `text` holding its first `n` whitespace-separated tokens.
std::string first_tokens(std::string_view text, int n) {
  int seen = 0;
  bool in_token = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const bool space = detail::ascii_space(text[i]);
    if (!space && !in_token) {
      if (seen == n) return std::string(text.substr(0, i));
      ++seen;
    }
    in_token = !space;
  }
  return std::string(text);
}

}  // namespace

void TokenBudget::reserve(std::int64_t tokens) {
  if (limit_ <= 0) {
    committed_ += tokens;
    return;
  }
  std::int64_t current = committed_.load();
  do {
    if (current + tokens > limit_) {
      throw BudgetExhausted("run token budget " + std::to_string(limit_) + " would be exceeded (" +
                            std::to_string(current) + " spent, " + std::to_string(tokens) + " requested)");
    }
  } while (!committed_.compare_exchange_weak(current, current + tokens));
}

void TokenBudget::settle(std::int64_t reserved, std::int64_t used) { committed_ -= reserved - used; }

Prover::Prover(std::shared_ptr<ProverBackend> backend, RetryPolicy retry, std::shared_ptr<TokenBudget> budget)
    : backend_(std::move(backend)), retry_(std::move(retry)), budget_(std::move(budget)) {
  if (!backend_) throw std::invalid_argument("Prover needs a backend");
  if (!retry_.sleep) retry_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

BackendReply Prover::call_with_retry(const GenerationRequest& request) {
  for (int attempt = 0;; ++attempt) {
    try {
      return backend_->complete(request);
    } catch (const TransientBackendError& e) {
      if (attempt >= retry_.max_retries) {
        throw BackendError(backend_->id() + ": " + e.what() + " (after " + std::to_string(attempt + 1) +
                               " attempts)",
                           attempt + 1);
      }
      if (!retry_.backoff.empty()) {
        const std::size_t idx = std::min<std::size_t>(static_cast<std::size_t>(attempt), retry_.backoff.size() - 1);
        retry_.sleep(retry_.backoff[idx]);
      }
    }
  }
}

GenerationResult Prover::generate(const GenerationRequest& request) {
  if (request.max_tokens <= 0) throw std::invalid_argument("max_tokens must be positive");
  if (budget_) budget_->reserve(request.max_tokens);

  GenerationResult out;
  BackendReply reply;
  try {
    reply = call_with_retry(request);
  } catch (const BackendError& e) {
    if (budget_) budget_->settle(request.max_tokens, 0);
    out.finish_reason = FinishReason::kBackendError;
    out.error = e.what();
    out.prompt_tokens = count_tokens(request.prompt);
    return out;
  }

  out.full_text = std::move(reply.text);
  out.completion_tokens = reply.completion_tokens.value_or(count_tokens(out.full_text));
  out.finish_reason = reply.truncated ? FinishReason::kLength : FinishReason::kStop;
  if (out.completion_tokens > request.max_tokens) {
    out.full_text = first_tokens(out.full_text, request.max_tokens);
    out.completion_tokens = request.max_tokens;
    out.finish_reason = FinishReason::kLength;
  }
  out.prompt_tokens = reply.prompt_tokens.value_or(count_tokens(request.prompt));
  auto block = parse_proof_block(out.full_text);
  out.cot_text = std::move(block.cot_text);
  out.proof_text = std::move(block.proof_text);
  if (budget_) budget_->settle(request.max_tokens, out.completion_tokens);
  return out;
}

}  // namespace proofsmith
