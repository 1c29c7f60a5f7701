#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace affmem {

// splitmix64 (Steele, Lea, Flood). The generator behind k-means++ seeding.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) from the top 53 bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

using Point = std::vector<double>;

struct Clustering {
  std::size_t k = 0;
  std::vector<std::size_t> assignment;
  std::vector<Point> centroids;
  std::vector<double> distances;
  std::size_t iterations = 0;
  double sse = 0.0;
  // SSE after each Lloyd update, in iteration order.
  std::vector<double> sse_history;
};

inline constexpr std::size_t kMaxLloydIterations = 100;
inline constexpr double kCentroidTolerance = 1e-9;

// Seeded k-means++ followed by Lloyd iterations. Deterministic for a given
// (points, k, seed). Throws InvalidK or DimensionMismatch.
Clustering kmeans(const std::vector<Point>& points, std::size_t k, std::uint64_t seed);

double centroid_distance(std::span<const double> point, std::span<const double> centroid);

double squared_distance(std::span<const double> a, std::span<const double> b);

}  // namespace affmem
