#include "affmem/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "affmem/error.hpp"

namespace affmem {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::DimensionMismatch, "dimension mismatch: " + std::to_string(a.size()) +
                                                  " vs " + std::to_string(b.size()));
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

double centroid_distance(std::span<const double> point, std::span<const double> centroid) {
  return std::sqrt(squared_distance(point, centroid));
}

namespace {

std::vector<Point> seed_plus_plus(const std::vector<Point>& points, std::size_t k,
                                  std::uint64_t seed) {
  const std::size_t n = points.size();
  SplitMix64 rng(seed);
  std::vector<Point> centroids;
  std::vector<bool> chosen(n, false);
  std::size_t first = static_cast<std::size_t>(rng.next_u64() % n);
  centroids.push_back(points[first]);
  chosen[first] = true;

  std::vector<double> nearest(n);
  for (std::size_t i = 0; i < n; ++i) nearest[i] = squared_distance(points[i], centroids[0]);

  while (centroids.size() < k) {
    double total = 0.0;
    for (double d : nearest) total += d;
    const double u = rng.next_unit();
    std::size_t pick = n;
    if (total > 0.0) {
      const double target = u * total;
      double cumulative = 0.0;
      std::size_t last_positive = n;
      for (std::size_t i = 0; i < n; ++i) {
        cumulative += nearest[i];
        if (nearest[i] > 0.0) last_positive = i;
        if (cumulative > target) {
          pick = i;
          break;
        }
      }
      if (pick == n) pick = last_positive;
    } else {
      // Every point coincides with a chosen centroid: take the lowest unused index.
      for (std::size_t i = 0; i < n; ++i) {
        if (!chosen[i]) {
          pick = i;
          break;
        }
      }
    }
    chosen[pick] = true;
    centroids.push_back(points[pick]);
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], squared_distance(points[i], centroids.back()));
    }
  }
  return centroids;
}

std::size_t nearest_centroid(const Point& p, const std::vector<Point>& centroids) {
  std::size_t best = 0;
  double best_d = squared_distance(p, centroids[0]);
  for (std::size_t c = 1; c < centroids.size(); ++c) {
    const double d = squared_distance(p, centroids[c]);
    if (d < best_d) {
      best = c;
      best_d = d;
    }
  }
  return best;
}

// Moves the farthest point (from a cluster with more than one member) into
// each empty cluster.
void repair_empty_clusters(const std::vector<Point>& points, std::vector<Point>& centroids,
                           std::vector<std::size_t>& assignment) {
  const std::size_t k = centroids.size();
  std::vector<std::size_t> sizes(k, 0);
  for (std::size_t a : assignment) ++sizes[a];
  for (std::size_t c = 0; c < k; ++c) {
    if (sizes[c] != 0) continue;
    std::size_t far = points.size();
    double far_d = -1.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (sizes[assignment[i]] < 2) continue;
      const double d = squared_distance(points[i], centroids[assignment[i]]);
      if (d > far_d) {
        far = i;
        far_d = d;
      }
    }
    --sizes[assignment[far]];
    assignment[far] = c;
    sizes[c] = 1;
    centroids[c] = points[far];
  }
}

std::vector<Point> cluster_means(const std::vector<Point>& points,
                                 const std::vector<std::size_t>& assignment, std::size_t k,
                                 std::size_t dim) {
  std::vector<Point> means(k, Point(dim, 0.0));
  std::vector<std::size_t> sizes(k, 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto& m = means[assignment[i]];
    for (std::size_t j = 0; j < dim; ++j) m[j] += points[i][j];
    ++sizes[assignment[i]];
  }
  for (std::size_t c = 0; c < k; ++c) {
    for (double& x : means[c]) x /= static_cast<double>(sizes[c]);
  }
  return means;
}

}  // namespace

Clustering kmeans(const std::vector<Point>& points, std::size_t k, std::uint64_t seed) {
  if (k < 1 || k > points.size()) {
    throw Error(ErrorKind::InvalidK, "k must be in [1, " + std::to_string(points.size()) +
                                         "], got " + std::to_string(k));
  }
  const std::size_t dim = points.front().size();
  for (const auto& p : points) {
    if (p.size() != dim) {
      throw Error(ErrorKind::DimensionMismatch, "points must share one dimension");
    }
  }

  Clustering result;
  result.k = k;
  result.centroids = seed_plus_plus(points, k, seed);
  result.assignment.assign(points.size(), 0);

  for (std::size_t iter = 0; iter < kMaxLloydIterations; ++iter) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      result.assignment[i] = nearest_centroid(points[i], result.centroids);
    }
    repair_empty_clusters(points, result.centroids, result.assignment);

    auto means = cluster_means(points, result.assignment, k, dim);
    double displacement = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      displacement = std::max(displacement, centroid_distance(means[c], result.centroids[c]));
    }
    result.centroids = std::move(means);
    ++result.iterations;

    double sse = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      sse += squared_distance(points[i], result.centroids[result.assignment[i]]);
    }
    result.sse_history.push_back(sse);

    if (displacement < kCentroidTolerance) break;
  }

  result.distances.resize(points.size());
  result.sse = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double d = centroid_distance(points[i], result.centroids[result.assignment[i]]);
    result.distances[i] = d;
    result.sse += d * d;
  }
  return result;
}

}  // namespace affmem
