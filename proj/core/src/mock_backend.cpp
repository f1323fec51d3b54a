#include "proofsmith/mock_backend.hpp"

#include <cctype>

#include "proofsmith/errors.hpp"

namespace proofsmith {

int MockRule::specificity() const {
  return int(statement_id.has_value()) + int(round.has_value()) + int(sample.has_value()) +
         int(purpose.has_value()) + int(contains.has_value());
}

bool MockRule::matches(const GenerationRequest& request) const {
  const RequestTags& t = request.tags;
  if (statement_id && *statement_id != t.statement_id) return false;
  if (round && *round != t.round) return false;
  if (sample && *sample != t.sample_index) return false;
  if (purpose && *purpose != t.purpose) return false;
  if (contains && request.prompt.find(*contains) == std::string::npos) return false;
  return true;
}

MockRule mock_rule_from_json(const Json& row) {
  if (!row.is_object()) throw ConfigError("mock script rows must be objects");
  MockRule r;
  if (row.contains("match")) {
    const Json& m = row.at("match");
    if (m.contains("statement_id")) r.statement_id = m.at("statement_id").get<std::string>();
    if (m.contains("round")) r.round = m.at("round").get<int>();
    if (m.contains("sample")) r.sample = m.at("sample").get<int>();
    if (m.contains("purpose")) r.purpose = m.at("purpose").get<std::string>();
    if (m.contains("contains")) r.contains = m.at("contains").get<std::string>();
  }
  if (row.contains("replies")) {
    r.replies = row.at("replies").get<std::vector<std::string>>();
  } else if (row.contains("reply")) {
    r.replies.push_back(row.at("reply").get<std::string>());
  }
  if (r.replies.empty()) throw ConfigError("mock script row has neither reply nor replies");
  r.fixable_with_error = row.value("fixable_with_error", false);
  r.reply_without_error = row.value("reply_without_error", std::string(MockRule::kNoProofReply));
  return r;
}

OrderedJson mock_rule_to_json(const MockRule& rule) {
  OrderedJson row;
  OrderedJson m = OrderedJson::object();
  if (rule.statement_id) m["statement_id"] = *rule.statement_id;
  if (rule.round) m["round"] = *rule.round;
  if (rule.sample) m["sample"] = *rule.sample;
  if (rule.purpose) m["purpose"] = *rule.purpose;
  if (rule.contains) m["contains"] = *rule.contains;
  row["match"] = m;
  if (rule.replies.size() == 1) {
    row["reply"] = rule.replies.front();
  } else {
    row["replies"] = rule.replies;
  }
  if (rule.fixable_with_error) {
    row["fixable_with_error"] = true;
    row["reply_without_error"] = rule.reply_without_error;
  }
  return row;
}

bool has_feedback_line(std::string_view prompt) {
  std::size_t pos = 0;
  while ((pos = prompt.find("line ", pos)) != std::string_view::npos) {
    std::size_t i = pos + 5;
    const auto digits = [&] {
      const std::size_t start = i;
      while (i < prompt.size() && std::isdigit(static_cast<unsigned char>(prompt[i]))) ++i;
      return i > start;
    };
    if (digits() && prompt.substr(i, 6) == ", col ") {
      i += 6;
      if (digits() && i < prompt.size() && prompt[i] == ':') return true;
    }
    pos += 5;
  }
  return false;
}

std::shared_ptr<MockBackend> MockBackend::from_file(const std::filesystem::path& script) {
  std::vector<MockRule> rules;
  for (const Json& row : read_jsonl(script)) rules.push_back(mock_rule_from_json(row));
  return std::make_shared<MockBackend>(std::move(rules));
}

BackendReply MockBackend::complete(const GenerationRequest& request) {
  ++calls_;
  const MockRule* best = nullptr;
  for (const MockRule& rule : rules_) {
    if (rule.matches(request) && (!best || rule.specificity() > best->specificity())) best = &rule;
  }
  BackendReply reply;
  if (!best) {
    reply.text = MockRule::kNoProofReply;
    return reply;
  }
  if (best->fixable_with_error && !has_feedback_line(request.prompt)) {
    reply.text = best->reply_without_error;
    return reply;
  }
  const auto idx = static_cast<std::size_t>(std::max(request.tags.sample_index, 0)) % best->replies.size();
  reply.text = best->replies[idx];
  return reply;
}

}  // namespace proofsmith
