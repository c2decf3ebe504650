#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "courtphase/segment.hpp"

namespace courtphase {

// Row-major n x dim matrix of observations.
class PointSet {
public:
  PointSet() = default;
  PointSet(std::size_t dim, std::vector<double> values);
  explicit PointSet(std::span<const DyadVector> features);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return dim_ == 0 ? 0 : values_.size() / dim_; }
  std::span<const double> row(std::size_t i) const { return {values_.data() + i * dim_, dim_}; }
  std::size_t distinct_count() const;

private:
  std::size_t dim_ = 0;
  std::vector<double> values_;
};

struct KMeansOptions {
  int k = 6;
  std::uint64_t seed = 0;
  int restarts = 20;
  int max_iter = 300;
  double tol = 1e-6;
};

struct ClusterModel {
  int k = 0;
  std::size_t dim = 0;
  std::vector<std::vector<double>> centroids;
  std::vector<int> assignments;
  double wcss = 0.0;
  double tss = 0.0;
  double bd_td = 0.0;
  std::uint64_t seed = 0;
  int restarts = 0;
  // Index of the restart that won, and its Lloyd iteration count.
  int best_restart = 0;
  int iterations = 0;
};

// Best of `restarts` Lloyd runs from k-means++ seeds, by lowest wcss with the
// lowest restart index winning ties. Each run ends with single-point
// transfers that still lower the wcss. Restart r draws from stream r of the
// counter RNG keyed by `seed`; first centres are a seeded permutation of the
// points, cycled across restarts.
ClusterModel kmeans(const PointSet& points, const KMeansOptions& options);

double total_sum_of_squares(const PointSet& points);
double within_sum_of_squares(const PointSet& points, std::span<const int> assignments, int k);
// Sum over clusters of size * |centroid - grand mean|^2, computed directly.
double between_deviance(const PointSet& points, std::span<const int> assignments, int k);

struct CurveEntry {
  int k = 0;
  double bd_td = 0.0;
};

struct KSelectionCurve {
  std::vector<CurveEntry> entries;
  int chosen_k = 0;
  double threshold = 0.0;
};

// Seed used for the k-cluster run of a curve with base seed `seed`.
std::uint64_t curve_seed(std::uint64_t seed, int k);

KSelectionCurve bd_td_curve(const PointSet& points, int k_min, int k_max, std::uint64_t seed,
                            int restarts, int max_iter = 300, double tol = 1e-6);

struct KSelection {
  int k = 0;
  // No increment fell below the threshold; k is the largest k on the curve.
  bool saturated = false;
  // Some increment was negative beyond 1e-9.
  bool non_monotone = false;
};

// Smallest k whose forward increment bd_td(k+1) - bd_td(k) is below threshold.
KSelection select_k(std::span<const CurveEntry> entries, double threshold);

}  // namespace courtphase
