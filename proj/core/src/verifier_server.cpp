#include "proofsmith/verifier_server.hpp"

#include <istream>
#include <ostream>

#include "proofsmith/errors.hpp"

namespace proofsmith {

namespace {

OrderedJson failure_response(const std::string& id, const std::string& message) {
  OrderedJson r;
  r["id"] = id;
  r["pass"] = false;
  r["errors"] = OrderedJson::array({diagnostic_to_json({1, 1, Severity::kError, message})});
  r["goals"] = OrderedJson::array();
  return r;
}

}  // namespace

OrderedJson handle_verifier_request(Verifier& verifier, const std::string& line) {
  Json req;
  try {
    req = Json::parse(line);
  } catch (const Json::parse_error& e) {
    return failure_response("", std::string("malformed request: ") + e.what());
  }
  const std::string id = req.value("id", std::string());
  try {
    const FormalStatement stmt = parse_theorem(req.at("statement").get<std::string>());
    VerifyOptions options;
    options.timeout = std::chrono::milliseconds(req.value("timeout_ms", 60'000));
    options.extract_goals = req.value("extract_goals", true);
    const Verdict v = verifier.verify(stmt, req.at("proof").get<std::string>(), options);
    OrderedJson r;
    r["id"] = id;
    const OrderedJson body = verdict_to_json(v);
    r["pass"] = body["pass"];
    r["errors"] = body["errors"];
    r["goals"] = body["goals"];
    return r;
  } catch (const ParseError& e) {
    return failure_response(id, e.what());
  } catch (const Error& e) {
    return failure_response(id, e.what());
  } catch (const Json::exception& e) {
    return failure_response(id, std::string("malformed request: ") + e.what());
  }
}

std::size_t serve_verifier(Verifier& verifier, std::istream& in, std::ostream& out) {
  std::size_t answered = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out << handle_verifier_request(verifier, line).dump() << '\n' << std::flush;
    ++answered;
  }
  return answered;
}

}  // namespace proofsmith
