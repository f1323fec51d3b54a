#pragma once

// Scripted prover backend. A script is JSON lines of
//
//   {"match": {"statement_id": str, "round": int, "sample": int,
//              "purpose": str, "contains": str},
//    "reply": str | "replies": [str, ...],
//    "fixable_with_error": bool, "reply_without_error": str}
//
// Every match field is optional. Among matching rules the one with the most
// match fields wins; ties go to the earlier line. `replies` is indexed by
// sample index modulo its length. A rule with fixable_with_error only yields
// its reply when the prompt carries verifier feedback (`line L, col C:`);
// otherwise it yields reply_without_error. Unmatched requests get a reply
// with no code block.

#include <atomic>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "proofsmith/io.hpp"
#include "proofsmith/prover.hpp"

namespace proofsmith {

struct MockRule {
  std::optional<std::string> statement_id;
  std::optional<int> round;
  std::optional<int> sample;
  std::optional<std::string> purpose;
  std::optional<std::string> contains;
  std::vector<std::string> replies;
  bool fixable_with_error = false;
  std::string reply_without_error = kNoProofReply;

  static constexpr const char* kNoProofReply = "I could not find a proof.";

  int specificity() const;
  bool matches(const GenerationRequest& request) const;
};

MockRule mock_rule_from_json(const Json& row);
OrderedJson mock_rule_to_json(const MockRule& rule);

// True when the prompt contains a rendered diagnostic line.
bool has_feedback_line(std::string_view prompt);

class MockBackend final : public ProverBackend {
 public:
  explicit MockBackend(std::vector<MockRule> rules) : rules_(std::move(rules)) {}
  static std::shared_ptr<MockBackend> from_file(const std::filesystem::path& script);

  BackendReply complete(const GenerationRequest& request) override;
  std::string id() const override { return "mock"; }

  std::size_t calls() const { return calls_.load(); }
  const std::vector<MockRule>& rules() const { return rules_; }

 private:
  std::vector<MockRule> rules_;
  std::atomic<std::size_t> calls_{0};
};

}  // namespace proofsmith
