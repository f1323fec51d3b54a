#pragma once

// Verifier backend speaking JSON lines to child processes.
//
//   request:  {"id", "statement", "proof", "timeout_ms", "extract_goals"}
//   response: {"id", "pass", "errors": [{line, col, severity, message}],
//              "goals": [{"hypotheses": [[name, type], ...], "target"}]}
//
// Requests are multiplexed over each child by id. A child that exits fails
// every in-flight request with BackendUnavailable and is respawned on the
// next call.

#include <atomic>
#include <chrono>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "proofsmith/verifier.hpp"

namespace proofsmith {

struct SubprocessOptions {
  std::string command;  // run via /bin/sh -c
  int pool_size = 1;
  // Extra wait beyond the request's own timeout before declaring a timeout.
  std::chrono::milliseconds grace{2'000};
};

class SubprocessVerifier final : public Verifier {
 public:
  explicit SubprocessVerifier(SubprocessOptions options);
  ~SubprocessVerifier() override;

  SubprocessVerifier(const SubprocessVerifier&) = delete;
  SubprocessVerifier& operator=(const SubprocessVerifier&) = delete;

  Verdict verify(const FormalStatement& stmt, const std::string& proof,
                 const VerifyOptions& options) override;
  std::string id() const override { return "subprocess"; }

  // Responses whose id matched no request, plus unparseable lines.
  std::size_t protocol_errors() const;
  std::size_t spawn_count() const { return spawns_.load(); }

 private:
  class Child;

  std::shared_ptr<Child> child_for_call();

  SubprocessOptions options_;
  std::mutex mu_;
  std::vector<std::shared_ptr<Child>> children_;
  std::atomic<std::uint64_t> next_id_{0};
  std::atomic<std::size_t> next_slot_{0};
  std::atomic<std::size_t> spawns_{0};
  std::shared_ptr<std::atomic<std::size_t>> protocol_errors_;
};

}  // namespace proofsmith
