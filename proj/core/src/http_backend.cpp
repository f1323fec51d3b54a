#include "proofsmith/http_backend.hpp"

#include <cstdlib>

#include <httplib.h>

#include "proofsmith/errors.hpp"
#include "proofsmith/io.hpp"

namespace proofsmith {

HttpBackendOptions http_options_from_env(HttpBackendOptions base) {
  if (const char* v = std::getenv("PROVER_URL"); v && *v) base.url = v;
  if (const char* v = std::getenv("PROVER_TOKEN"); v && *v) base.token = v;
  if (const char* v = std::getenv("PROVER_MODEL"); v && *v) base.model = v;
  return base;
}

std::string build_chat_request(const GenerationRequest& request, const std::string& default_model) {
  OrderedJson body;
  body["model"] = request.model.empty() ? default_model : request.model;
  body["messages"] = OrderedJson::array({{{"role", "user"}, {"content", request.prompt}}});
  body["max_tokens"] = request.max_tokens;
  body["temperature"] = request.temperature;
  body["seed"] = request.seed;
  return body.dump();
}

BackendReply parse_chat_response(const std::string& body) {
  BackendReply reply;
  try {
    const Json j = Json::parse(body);
    const Json& choice = j.at("choices").at(0);
    reply.text = choice.at("message").at("content").get<std::string>();
    reply.truncated = choice.contains("finish_reason") && choice["finish_reason"] == "length";
    if (j.contains("usage") && j["usage"].is_object()) {
      const Json& usage = j["usage"];
      if (usage.contains("completion_tokens") && usage["completion_tokens"].is_number_integer()) {
        reply.completion_tokens = usage["completion_tokens"].get<int>();
      }
      if (usage.contains("prompt_tokens") && usage["prompt_tokens"].is_number_integer()) {
        reply.prompt_tokens = usage["prompt_tokens"].get<int>();
      }
    }
  } catch (const Json::exception& e) {
    throw BackendError(std::string("malformed chat response: ") + e.what(), 1);
  }
  return reply;
}

HttpBackend::HttpBackend(HttpBackendOptions options) : options_(std::move(options)) {
  if (options_.url.empty()) throw ConfigError("HTTP prover backend needs a URL (PROVER_URL)");
  const auto scheme_end = options_.url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("prover URL lacks a scheme: " + options_.url);
  const auto path_start = options_.url.find('/', scheme_end + 3);
  origin_ = options_.url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : options_.url.substr(path_start);
}

BackendReply HttpBackend::complete(const GenerationRequest& request) {
  httplib::Client client(origin_);
  client.set_connection_timeout(std::chrono::seconds(10));
  client.set_read_timeout(options_.timeout);
  client.set_write_timeout(std::chrono::seconds(60));
  httplib::Headers headers;
  if (!options_.token.empty()) headers.emplace("Authorization", "Bearer " + options_.token);

  const auto res = client.Post(path_, headers, build_chat_request(request, options_.model), "application/json");
  if (!res) throw TransientBackendError("POST " + options_.url + ": " + httplib::to_string(res.error()));
  if (res->status >= 500) {
    throw TransientBackendError("POST " + options_.url + ": status " + std::to_string(res->status));
  }
  if (res->status != 200) {
    throw BackendError("POST " + options_.url + ": status " + std::to_string(res->status), 1);
  }
  return parse_chat_response(res->body);
}

}  // namespace proofsmith
