#pragma once

// OpenAI-style chat completion endpoint.
//
//   POST {"model", "messages": [{"role": "user", "content"}], "max_tokens",
//         "temperature", "seed"}
//   200  {"choices": [{"message": {"content"}, "finish_reason"}],
//         "usage": {"completion_tokens", "prompt_tokens"}}
//
// Transport failures and 5xx responses raise TransientBackendError; other
// statuses and malformed bodies raise BackendError.

#include <chrono>
#include <string>

#include "proofsmith/prover.hpp"

namespace proofsmith {

struct HttpBackendOptions {
  std::string url;    // e.g. http://localhost:8000/v1/chat/completions
  std::string token;  // sent as a bearer token when nonempty
  std::string model;
  std::chrono::seconds timeout{600};
};

// PROVER_URL, PROVER_TOKEN, PROVER_MODEL override the given values.
HttpBackendOptions http_options_from_env(HttpBackendOptions base);

std::string build_chat_request(const GenerationRequest& request, const std::string& default_model);
BackendReply parse_chat_response(const std::string& body);

class HttpBackend final : public ProverBackend {
 public:
  explicit HttpBackend(HttpBackendOptions options);

  BackendReply complete(const GenerationRequest& request) override;
  std::string id() const override { return "http:" + options_.model; }

 private:
  HttpBackendOptions options_;
  std::string origin_;  // scheme://host[:port]
  std::string path_;
};

}  // namespace proofsmith
