#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "proofsmith/corpus.hpp"
#include "proofsmith/mock_backend.hpp"
#include "proofsmith/statements.hpp"

namespace testing {

namespace fs = std::filesystem;

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "ps") {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = fs::temp_directory_path() / (tag + "_" + std::to_string(rng()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

inline fs::path fixture(const std::string& name) { return fs::path(PROOFSMITH_FIXTURE_DIR) / name; }

inline std::string fenced(const std::string& proof, const std::string& cot = "Plan.\n") {
  return cot + "```lean4\n" + proof + "\n```\n";
}

inline proofsmith::MockRule rule(const std::string& statement_id, std::vector<std::string> replies) {
  proofsmith::MockRule r;
  r.statement_id = statement_id;
  r.replies = std::move(replies);
  return r;
}

inline proofsmith::FormalStatement stmt_with_id(const std::string& text, const std::string& id) {
  auto s = proofsmith::parse_theorem(text);
  s.id = id;
  return s;
}

// ---- the toy benchmark shared by the pipeline tests and the acceptance suite ----
//
// 50 statements `x + b = a + b` under `hx : x = a`. Statements 0..19 are solved
// at round 0 by some samples. Of the 30 that always fail at round 0, 9 are
// fixed in a correction round only when the prompt carries verifier feedback,
// one is fixed by any correction round, and the rest are never solved.

struct ToyBench {
  std::vector<proofsmith::FormalStatement> corpus;
  std::vector<proofsmith::MockRule> rules;
  std::vector<std::string> fixable_with_errors;
  std::vector<std::string> fixable_always;
};

inline std::string toy_id(int i) { return (i < 10 ? "s0" : "s") + std::to_string(i); }

inline ToyBench toy_bench(int size = 50) {
  ToyBench b;
  const std::string right = fenced("rw hx norm", "Substitute, then fold constants.\n");
  const std::string wrong = fenced("rw hx mul_one", "Substitute, then simplify.\n");
  const int solvable = size * 2 / 5;
  const int hard = size - solvable;
  const int fixable = hard * 3 / 10;
  for (int i = 0; i < size; ++i) {
    const int a = i % 7 + 1;
    const int c = i % 5 + 2;
    const std::string id = toy_id(i);
    b.corpus.push_back(stmt_with_id("theorem toy" + std::to_string(i) + " (x : Int) (hx : x = " + std::to_string(a) +
                                        ") : x + " + std::to_string(c) + " = " + std::to_string(a + c) +
                                        " := by sorry",
                                    id));
    if (i < solvable) {
      // Replies cycle with the sample index, so c/n differs between statements.
      std::vector<std::string> replies(8, wrong);
      for (int k = 0; k <= i % 4; ++k) replies[static_cast<std::size_t>(2 * k)] = right;
      b.rules.push_back(rule(id, replies));
    } else if (i < solvable + fixable) {
      auto r = rule(id, {right});
      r.fixable_with_error = true;
      r.reply_without_error = wrong;
      b.rules.push_back(r);
      b.fixable_with_errors.push_back(id);
    } else if (i == solvable + fixable) {
      auto r0 = rule(id, {wrong});
      r0.round = 0;
      b.rules.push_back(r0);
      b.rules.push_back(rule(id, {right}));
      b.fixable_always.push_back(id);
    } else {
      b.rules.push_back(rule(id, {wrong}));
    }
  }
  return b;
}

inline std::string rules_jsonl(const std::vector<proofsmith::MockRule>& rules) {
  std::vector<proofsmith::OrderedJson> rows;
  for (const auto& r : rules) rows.push_back(proofsmith::mock_rule_to_json(r));
  return proofsmith::to_jsonl(rows);
}

}  // namespace testing
