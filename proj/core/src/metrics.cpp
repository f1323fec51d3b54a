#include "proofsmith/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "proofsmith/errors.hpp"

namespace proofsmith {

double pass_at_k(long long n, long long c, long long k) {
  if (n < 1 || k < 1 || k > n || c < 0 || c > n) {
    throw DomainError("pass@k needs 0 <= c <= n and 1 <= k <= n (n=" + std::to_string(n) +
                      ", c=" + std::to_string(c) + ", k=" + std::to_string(k) + ")");
  }
  if (c == 0) return 0.0;
  if (n - c < k) return 1.0;
  if (k == 1) return static_cast<double>(c) / static_cast<double>(n);
  // C(n-c, k) / C(n, k) = prod_{i=n-c+1}^{n} (1 - k/i)
  const double kd = static_cast<double>(k);
  if (n <= 10'000) {
    double miss = 1.0;
    for (long long i = n - c + 1; i <= n; ++i) miss *= 1.0 - kd / static_cast<double>(i);
    return 1.0 - miss;
  }
  double log_miss = 0.0;
  for (long long i = n - c + 1; i <= n; ++i) log_miss += std::log1p(-kd / static_cast<double>(i));
  return -std::expm1(log_miss);
}

std::vector<CurvePoint> scaling_curve(const std::vector<SampleCounts>& results, const std::vector<long long>& ks) {
  if (results.empty()) throw DomainError("scaling curve over no statements");
  std::vector<CurvePoint> out;
  if (ks.empty()) return out;
  const long long kmax = *std::max_element(ks.begin(), ks.end());
  for (const auto& r : results) {
    if (r.n < kmax) {
      throw DomainError("k=" + std::to_string(kmax) + " exceeds the " + std::to_string(r.n) +
                        " samples drawn for a statement");
    }
  }
  for (long long k : ks) {
    double sum = 0.0;
    for (const auto& r : results) sum += pass_at_k(r.n, r.c, k);
    out.push_back({k, sum / static_cast<double>(results.size())});
  }
  return out;
}

MeanStderr aggregate_with_stderr(const std::vector<double>& per_run) {
  if (per_run.empty()) throw DomainError("no runs to aggregate");
  const double m = static_cast<double>(per_run.size());
  double sum = 0.0;
  for (double x : per_run) sum += x;
  MeanStderr out;
  out.mean = sum / m;
  if (per_run.size() >= 2) {
    double ss = 0.0;
    for (double x : per_run) ss += (x - out.mean) * (x - out.mean);
    out.stderr_ = std::sqrt(ss / (m - 1.0)) / std::sqrt(m);
  }
  return out;
}

std::vector<long long> default_ks(long long n) {
  std::vector<long long> ks;
  for (long long k = 1; k < n; k *= 2) ks.push_back(k);
  if (n >= 1) ks.push_back(n);
  return ks;
}

OrderedJson metrics_json(const std::vector<SampleCounts>& results, std::size_t excluded,
                         std::optional<double> stderr_) {
  OrderedJson j;
  long long n = 0;
  long long solved = 0;
  for (const auto& r : results) {
    if (n != 0 && r.n != n) throw DomainError("statements were sampled with different n");
    n = r.n;
    if (r.c > 0) ++solved;
  }
  OrderedJson pass_at = OrderedJson::object();
  if (!results.empty()) {
    for (const auto& p : scaling_curve(results, default_ks(n))) pass_at[std::to_string(p.k)] = p.value;
  }
  j["pass_at"] = pass_at;
  j["n"] = n;
  j["solved"] = solved;
  j["total"] = results.size();
  j["excluded"] = excluded;
  j["stderr"] = stderr_ ? OrderedJson(*stderr_) : OrderedJson(nullptr);
  return j;
}

}  // namespace proofsmith
