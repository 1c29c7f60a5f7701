#pragma once

// Reference implementations used only by tests. They deliberately take a
// different route from the library code they check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

namespace affmem::testing {

struct PartitionOptimum {
  double sse = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> labels;
};

// Exhaustive search over all labelings with exactly k non-empty groups.
inline PartitionOptimum exhaustive_kmeans(const std::vector<std::vector<double>>& pts, std::size_t k) {
  const std::size_t n = pts.size();
  const std::size_t dim = pts.front().size();
  PartitionOptimum best;
  std::vector<std::size_t> labels(n, 0);
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= k;
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    for (std::size_t i = 0; i < n; ++i) {
      labels[i] = c % k;
      c /= k;
    }
    std::vector<std::vector<double>> sum(k, std::vector<double>(dim, 0.0));
    std::vector<std::size_t> count(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      ++count[labels[i]];
      for (std::size_t j = 0; j < dim; ++j) sum[labels[i]][j] += pts[i][j];
    }
    if (std::find(count.begin(), count.end(), 0u) != count.end()) continue;
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < dim; ++j) {
        const double d = pts[i][j] - sum[labels[i]][j] / static_cast<double>(count[labels[i]]);
        sse += d * d;
      }
    }
    if (sse < best.sse) {
      best.sse = sse;
      best.labels = labels;
    }
  }
  return best;
}

struct OraclePeak {
  double t;
  double score;
};

// NMS by a single global sort: visit grid points by (score desc, t asc) and
// accept any point at least min_sep from every accepted one.
inline std::vector<OraclePeak> brute_force_nms(double t0, double hop,
                                               const std::vector<std::optional<double>>& values,
                                               std::size_t n, double min_sep) {
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i]) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return *values[a] > *values[b]; });
  std::vector<OraclePeak> out;
  for (std::size_t i : order) {
    if (out.size() == n) break;
    const double t = t0 + static_cast<double>(i) * hop;
    bool clear = true;
    for (const auto& p : out) {
      if (std::fabs(p.t - t) < min_sep) clear = false;
    }
    if (clear) out.push_back({t, *values[i]});
  }
  return out;
}

// Index of the first maximum among present values, or nullopt.
inline std::optional<std::size_t> linear_argmax(const std::vector<std::optional<double>>& values) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] && (!best || *values[i] > *values[*best])) best = i;
  }
  return best;
}

// Straight-line sliding-window mean at grid point g, nearest-within-5 s fill.
inline std::optional<double> window_mean_oracle(const std::vector<double>& ts, const std::vector<double>& xs,
                                                double g, double window) {
  double sum = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (ts[i] >= g - window / 2 && ts[i] <= g + window / 2) {
      sum += xs[i];
      ++count;
    }
  }
  if (count) return sum / count;
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (!best || std::fabs(ts[i] - g) < std::fabs(ts[*best] - g)) best = i;
  }
  if (best && std::fabs(ts[*best] - g) <= 5.0) return xs[*best];
  return std::nullopt;
}

}  // namespace affmem::testing
