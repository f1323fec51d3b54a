#include "proofsmith/run_store.hpp"

#include <algorithm>
#include <ctime>

#include "proofsmith/digest.hpp"
#include "proofsmith/errors.hpp"

namespace proofsmith {

OrderedJson manifest_to_json(const RunManifest& m) {
  OrderedJson j;
  j["run_id"] = m.run_id;
  j["status"] = m.status;
  j["config"] = m.config;
  j["corpus_path"] = m.corpus_path;
  j["corpus_digest"] = m.corpus_digest;
  j["backends"] = m.backends;
  j["template_digests"] = m.template_digests;
  j["results_index"] = m.results_index;
  j["created_at"] = m.created_at;
  j["finished_at"] = m.finished_at;
  return j;
}

RunManifest manifest_from_json(const Json& j) {
  RunManifest m;
  m.run_id = j.value("run_id", std::string());
  m.status = j.value("status", std::string());
  m.config = OrderedJson::parse(j.value("config", Json::object()).dump());
  m.corpus_path = j.value("corpus_path", std::string());
  m.corpus_digest = j.value("corpus_digest", std::string());
  m.backends = OrderedJson::parse(j.value("backends", Json::object()).dump());
  m.template_digests = OrderedJson::parse(j.value("template_digests", Json::object()).dump());
  m.results_index = OrderedJson::parse(j.value("results_index", Json::object()).dump());
  m.created_at = j.value("created_at", std::string());
  m.finished_at = j.value("finished_at", std::string());
  return m;
}

RunManifest read_manifest(const std::filesystem::path& run_dir) {
  const auto path = run_dir / kManifestFile;
  try {
    // Parsed as ordered JSON so the config keeps its key order on rewrite.
    const OrderedJson j = OrderedJson::parse(read_text_file(path));
    RunManifest m = manifest_from_json(Json::parse(j.dump()));
    m.config = j.value("config", OrderedJson::object());
    return m;
  } catch (const Json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_manifest(const std::filesystem::path& run_dir, const RunManifest& m) {
  write_text_file_atomic(run_dir / kManifestFile, manifest_to_json(m).dump(2) + "\n");
}

std::string derive_run_id(const OrderedJson& config, const std::string& corpus_digest) {
  return sha256_hex(config.dump() + "\n" + corpus_digest).substr(0, 16);
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunStore::RunStore(std::filesystem::path run_dir, bool resume) : dir_(std::move(run_dir)) {
  std::filesystem::create_directories(dir_);
  const auto path = dir_ / kResultsFile;
  if (resume && std::filesystem::exists(path)) {
    for (const Json& row : read_jsonl(path)) {
      AttemptTrace t = trace_from_json(row);
      Key key{t.statement_id, t.sample_index, t.round};
      loaded_[std::move(key)] = std::move(t);
    }
  }
  out_.open(path, resume ? std::ios::app : std::ios::trunc);
  if (!out_) throw ConfigError("cannot open " + path.string() + " for writing");
}

std::optional<AttemptTrace> RunStore::lookup(const std::string& statement_id, int sample, int round) {
  std::lock_guard lock(mu_);
  const auto it = loaded_.find(Key{statement_id, sample, round});
  if (it == loaded_.end() || it->second.backend_failure) return std::nullopt;
  ++reused_;
  return it->second;
}

void RunStore::record(const AttemptTrace& trace) {
  const std::string line = trace_to_json(trace).dump() + "\n";
  std::lock_guard lock(mu_);
  out_ << line;
  out_.flush();
  ++recorded_;
}

OrderedJson RunStore::finalize(const RunReport& report) {
  std::lock_guard lock(mu_);
  out_.close();
  std::string text;
  OrderedJson index = OrderedJson::object();
  for (const auto& r : report.results) {
    index[r.statement_id] = {{"offset", text.size()}, {"lines", r.attempts.size()}};
    for (const auto& t : r.attempts) text += trace_to_json(t).dump() + "\n";
  }
  write_text_file_atomic(dir_ / kResultsFile, text);
  return index;
}

std::vector<ProblemResult> load_results(const std::filesystem::path& run_dir) {
  int n_samples = 0;
  if (std::filesystem::exists(run_dir / kManifestFile)) {
    const auto m = read_manifest(run_dir);
    if (m.config.contains("run") && m.config["run"].contains("n")) n_samples = m.config["run"]["n"].get<int>();
  }
  std::vector<std::string> order;
  std::map<std::string, std::vector<AttemptTrace>> by_statement;
  int max_sample = -1;
  for (const Json& row : read_jsonl(run_dir / kResultsFile)) {
    AttemptTrace t = trace_from_json(row);
    max_sample = std::max(max_sample, t.sample_index);
    auto [it, inserted] = by_statement.try_emplace(t.statement_id);
    if (inserted) order.push_back(t.statement_id);
    it->second.push_back(std::move(t));
  }
  if (n_samples == 0) n_samples = max_sample + 1;
  std::vector<ProblemResult> out;
  for (const auto& id : order) out.push_back(summarize(id, n_samples, std::move(by_statement[id])));
  return out;
}

}  // namespace proofsmith
