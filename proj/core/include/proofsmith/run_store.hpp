#pragma once

// Run directories:
//   manifest.json   resolved config, corpus digest, per-statement offsets
//   results.jsonl   one AttemptTrace per line, keyed by (statement, sample, round)
//   sft.jsonl       SFT records collected from the run
//   metrics.json    pass@k table

#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>

#include "proofsmith/pipeline.hpp"

namespace proofsmith {

inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kResultsFile = "results.jsonl";
inline constexpr const char* kSftFile = "sft.jsonl";
inline constexpr const char* kMetricsFile = "metrics.json";

struct RunManifest {
  std::string run_id;
  OrderedJson config = OrderedJson::object();  // fully resolved settings
  std::string corpus_path;
  std::string corpus_digest;
  OrderedJson backends = OrderedJson::object();
  OrderedJson template_digests = OrderedJson::object();
  // statement id -> {"offset": byte offset in results.jsonl, "lines": count}
  OrderedJson results_index = OrderedJson::object();
  std::string status = "running";
  std::string created_at;
  std::string finished_at;
};

OrderedJson manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const Json& j);
RunManifest read_manifest(const std::filesystem::path& run_dir);
void write_manifest(const std::filesystem::path& run_dir, const RunManifest& m);

// Stable id for a (config, corpus) pair.
std::string derive_run_id(const OrderedJson& config, const std::string& corpus_digest);

std::string utc_timestamp();

// Appends traces to results.jsonl as they finish. With resume, traces already
// in the file are served back instead of being recomputed; traces recorded as
// backend failures are not.
class RunStore final : public TraceStore {
 public:
  RunStore(std::filesystem::path run_dir, bool resume);

  std::optional<AttemptTrace> lookup(const std::string& statement_id, int sample, int round) override;
  void record(const AttemptTrace& trace) override;

  std::size_t loaded() const { return loaded_.size(); }
  std::size_t reused() const { return reused_; }
  std::size_t recorded() const { return recorded_; }

  // Rewrites results.jsonl in corpus order and returns the per-statement
  // offset index.
  OrderedJson finalize(const RunReport& report);

  const std::filesystem::path& dir() const { return dir_; }

 private:
  using Key = std::tuple<std::string, int, int>;
  std::filesystem::path dir_;
  std::mutex mu_;
  std::map<Key, AttemptTrace> loaded_;
  std::ofstream out_;
  std::size_t reused_ = 0;
  std::size_t recorded_ = 0;
};

// Reads the traces of a finished run, grouped by statement in file order.
std::vector<ProblemResult> load_results(const std::filesystem::path& run_dir);

}  // namespace proofsmith
