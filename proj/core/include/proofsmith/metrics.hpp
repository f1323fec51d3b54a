#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "proofsmith/io.hpp"

namespace proofsmith {

// Unbiased pass@k: 1 - C(n-c, k) / C(n, k), as a product over c factors.
// Throws DomainError unless 0 <= c <= n and 1 <= k <= n.
double pass_at_k(long long n, long long c, long long k);

// Samples drawn and samples that verified, for one statement.
struct SampleCounts {
  long long n = 0;
  long long c = 0;
};

struct CurvePoint {
  long long k = 0;
  double value = 0.0;
};

// Mean pass@k over statements for each k. Throws DomainError if a statement
// has fewer than max(ks) samples or `results` is empty.
std::vector<CurvePoint> scaling_curve(const std::vector<SampleCounts>& results, const std::vector<long long>& ks);

struct MeanStderr {
  double mean = 0.0;
  std::optional<double> stderr_;  // null for a single run
};

// Mean and sample standard error (sd with m-1 over sqrt(m)).
MeanStderr aggregate_with_stderr(const std::vector<double>& per_run);

// Powers of two below n, then n itself.
std::vector<long long> default_ks(long long n);

// {"pass_at": {"1": .., ..}, "n", "solved", "total", "excluded", "stderr"}.
// All statements must share one n.
OrderedJson metrics_json(const std::vector<SampleCounts>& results, std::size_t excluded,
                         std::optional<double> stderr_ = std::nullopt);

}  // namespace proofsmith
