#include "courtphase/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "courtphase/error.hpp"
#include "courtphase/rng.hpp"

namespace courtphase {

namespace {

constexpr const char* kModule = "cluster";
constexpr std::uint64_t kFirstCentreStream = 0xF1257ULL << 32;

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

std::vector<double> grand_mean(const PointSet& points) {
  std::vector<long double> sum(points.dim(), 0.0L);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto r = points.row(i);
    for (std::size_t d = 0; d < sum.size(); ++d) sum[d] += r[d];
  }
  std::vector<double> mean(sum.size());
  for (std::size_t d = 0; d < sum.size(); ++d) mean[d] = static_cast<double>(sum[d] / points.size());
  return mean;
}

long double squared_distance_ld(std::span<const double> a, std::span<const double> b) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const long double d = static_cast<long double>(a[i]) - b[i];
    s += d * d;
  }
  return s;
}

struct LloydResult {
  std::vector<std::vector<double>> centroids;
  std::vector<int> assignments;
  double wcss = 0.0;
  int iterations = 0;
};

std::vector<std::vector<double>> plus_plus_seeds(const PointSet& points, int k, std::size_t first,
                                                 CounterRng& rng) {
  const std::size_t n = points.size();
  std::vector<std::vector<double>> centroids;
  centroids.reserve(static_cast<std::size_t>(k));
  centroids.emplace_back(points.row(first).begin(), points.row(first).end());

  std::vector<double> nearest(n);
  for (std::size_t i = 0; i < n; ++i) nearest[i] = squared_distance(points.row(i), centroids[0]);

  while (centroids.size() < static_cast<std::size_t>(k)) {
    const double total = std::accumulate(nearest.begin(), nearest.end(), 0.0);
    std::size_t pick = 0;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      pick = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (nearest[i] <= 0.0) continue;
        acc += nearest[i];
        pick = i;
        if (acc > target) break;
      }
    }
    centroids.emplace_back(points.row(pick).begin(), points.row(pick).end());
    for (std::size_t i = 0; i < n; ++i)
      nearest[i] = std::min(nearest[i], squared_distance(points.row(i), centroids.back()));
  }
  return centroids;
}

// Lowest index wins on equidistant centroids.
int nearest_centroid(std::span<const double> p, const std::vector<std::vector<double>>& centroids,
                     double* out_distance) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double d = squared_distance(p, centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  if (out_distance) *out_distance = best_d;
  return best;
}

std::vector<std::vector<double>> cluster_means(const PointSet& points, std::span<const int> assignments, int k) {
  const std::size_t dim = points.dim();
  std::vector<std::vector<long double>> sums(static_cast<std::size_t>(k), std::vector<long double>(dim, 0.0L));
  std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto c = static_cast<std::size_t>(assignments[i]);
    ++counts[c];
    const auto r = points.row(i);
    for (std::size_t d = 0; d < dim; ++d) sums[c][d] += r[d];
  }
  std::vector<std::vector<double>> means(static_cast<std::size_t>(k), std::vector<double>(dim, 0.0));
  for (std::size_t c = 0; c < means.size(); ++c)
    if (counts[c] > 0)
      for (std::size_t d = 0; d < dim; ++d) means[c][d] = static_cast<double>(sums[c][d] / counts[c]);
  return means;
}

// Single-point transfers (Hartigan's criterion): move a point when doing so
// lowers the wcss once both centroids are updated. A Lloyd fixed point can
// still admit such moves; the reverse never holds.
void refine_by_transfer(const PointSet& points, std::vector<int>& assignments, int k) {
  const std::size_t n = points.size();
  const std::size_t dim = points.dim();
  std::vector<std::vector<double>> sums(static_cast<std::size_t>(k), std::vector<double>(dim, 0.0));
  std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::size_t>(assignments[i]);
    ++counts[c];
    for (std::size_t d = 0; d < dim; ++d) sums[c][d] += points.row(i)[d];
  }
  std::vector<double> centre(dim);
  auto cost_to = [&](std::size_t c, std::span<const double> x) {
    for (std::size_t d = 0; d < dim; ++d) centre[d] = sums[c][d] / static_cast<double>(counts[c]);
    return squared_distance(x, centre);
  };
  for (int pass = 0; pass < 100; ++pass) {
    bool moved = false;
    for (std::size_t i = 0; i < n; ++i) {
      const auto from = static_cast<std::size_t>(assignments[i]);
      if (counts[from] < 2) continue;
      const auto x = points.row(i);
      const double na = static_cast<double>(counts[from]);
      const double removal = na / (na - 1.0) * cost_to(from, x);
      std::size_t best = from;
      double best_gain = 1e-9 * std::max(1.0, removal);
      for (std::size_t c = 0; c < static_cast<std::size_t>(k); ++c) {
        if (c == from) continue;
        const double nb = static_cast<double>(counts[c]);
        const double gain = removal - nb / (nb + 1.0) * cost_to(c, x);
        if (gain > best_gain) {
          best_gain = gain;
          best = c;
        }
      }
      if (best == from) continue;
      for (std::size_t d = 0; d < dim; ++d) {
        sums[from][d] -= x[d];
        sums[best][d] += x[d];
      }
      --counts[from];
      ++counts[best];
      assignments[i] = static_cast<int>(best);
      moved = true;
    }
    if (!moved) break;
  }
}

LloydResult lloyd(const PointSet& points, std::vector<std::vector<double>> centroids, int max_iter,
                  double tol) {
  const std::size_t n = points.size();
  const std::size_t dim = points.dim();
  const int k = static_cast<int>(centroids.size());

  LloydResult result;
  result.assignments.assign(n, -1);
  std::vector<double> dist(n, 0.0);

  for (int iter = 1; iter <= max_iter; ++iter) {
    result.iterations = iter;
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      const int c = nearest_centroid(points.row(i), centroids, &dist[i]);
      if (c != result.assignments[i]) {
        result.assignments[i] = c;
        changed = true;
      }
    }

    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (int c : result.assignments) ++counts[static_cast<std::size_t>(c)];

    // Repair empty clusters with the point farthest from its own centroid,
    // taken only from clusters that can spare a member.
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] != 0) continue;
      std::size_t far = n;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (counts[static_cast<std::size_t>(result.assignments[i])] < 2) continue;
        if (dist[i] > far_d) {
          far_d = dist[i];
          far = i;
        }
      }
      if (far == n) throw internal_error(kModule, "cannot repair empty cluster");
      --counts[static_cast<std::size_t>(result.assignments[far])];
      result.assignments[far] = c;
      counts[static_cast<std::size_t>(c)] = 1;
      dist[far] = 0.0;
      changed = true;
    }

    std::vector<std::vector<double>> next(static_cast<std::size_t>(k), std::vector<double>(dim, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      auto& acc = next[static_cast<std::size_t>(result.assignments[i])];
      const auto r = points.row(i);
      for (std::size_t d = 0; d < dim; ++d) acc[d] += r[d];
    }
    double shift = 0.0;
    for (std::size_t c = 0; c < next.size(); ++c) {
      for (double& v : next[c]) v /= static_cast<double>(counts[c]);
      shift = std::max(shift, std::sqrt(squared_distance(next[c], centroids[c])));
    }
    centroids = std::move(next);
    if (!changed || shift < tol) break;
  }

  refine_by_transfer(points, result.assignments, k);
  result.centroids = cluster_means(points, result.assignments, k);
  result.wcss = within_sum_of_squares(points, result.assignments, k);
  return result;
}

}  // namespace

PointSet::PointSet(std::size_t dim, std::vector<double> values) : dim_(dim), values_(std::move(values)) {
  if (dim_ == 0 || values_.size() % dim_ != 0)
    throw config_error(kModule, "point buffer size is not a multiple of the dimension");
}

PointSet::PointSet(std::span<const DyadVector> features) : dim_(kDyadCount) {
  values_.reserve(features.size() * kDyadCount);
  for (const auto& f : features) values_.insert(values_.end(), f.distances.begin(), f.distances.end());
}

std::size_t PointSet::distinct_count() const {
  const std::size_t n = size();
  if (n == 0) return 0;
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  auto less = [&](std::size_t a, std::size_t b) {
    const auto ra = row(a), rb = row(b);
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
  };
  std::sort(idx.begin(), idx.end(), less);
  std::size_t distinct = 1;
  for (std::size_t i = 1; i < n; ++i)
    if (less(idx[i - 1], idx[i])) ++distinct;
  return distinct;
}

double total_sum_of_squares(const PointSet& points) {
  if (points.size() == 0) return 0.0;
  const auto mean = grand_mean(points);
  long double s = 0.0L;
  for (std::size_t i = 0; i < points.size(); ++i) s += squared_distance_ld(points.row(i), mean);
  return static_cast<double>(s);
}

double within_sum_of_squares(const PointSet& points, std::span<const int> assignments, int k) {
  const auto means = cluster_means(points, assignments, k);
  long double s = 0.0L;
  for (std::size_t i = 0; i < points.size(); ++i)
    s += squared_distance_ld(points.row(i), means[static_cast<std::size_t>(assignments[i])]);
  return static_cast<double>(s);
}

double between_deviance(const PointSet& points, std::span<const int> assignments, int k) {
  const auto mean = grand_mean(points);
  const auto means = cluster_means(points, assignments, k);
  std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
  for (std::size_t i = 0; i < points.size(); ++i) ++counts[static_cast<std::size_t>(assignments[i])];
  long double s = 0.0L;
  for (std::size_t c = 0; c < means.size(); ++c)
    if (counts[c] > 0) s += static_cast<long double>(counts[c]) * squared_distance_ld(means[c], mean);
  return static_cast<double>(s);
}

ClusterModel kmeans(const PointSet& points, const KMeansOptions& options) {
  if (options.k <= 0) throw config_error(kModule, "k must be positive");
  if (options.restarts < 1) throw config_error(kModule, "restarts must be >= 1");
  if (options.max_iter < 1) throw config_error(kModule, "max_iter must be >= 1");
  const auto distinct = points.distinct_count();
  if (static_cast<std::size_t>(options.k) > distinct)
    throw data_error(kModule, "k = " + std::to_string(options.k) + " exceeds the " +
                                  std::to_string(distinct) + " distinct points");

  ClusterModel model;
  model.k = options.k;
  model.dim = points.dim();
  model.seed = options.seed;
  model.restarts = options.restarts;
  model.tss = total_sum_of_squares(points);

  // First centres are drawn without replacement across restarts (cycling once
  // every point has been used) so small inputs get distinct starts; the rest
  // of each seeding is ordinary D^2 sampling from stream r.
  std::vector<std::size_t> firsts(points.size());
  std::iota(firsts.begin(), firsts.end(), std::size_t{0});
  CounterRng order_rng(options.seed, kFirstCentreStream);
  for (std::size_t i = firsts.size(); i > 1; --i) std::swap(firsts[i - 1], firsts[order_rng.below(i)]);

  bool have = false;
  for (int r = 0; r < options.restarts; ++r) {
    CounterRng rng(options.seed, static_cast<std::uint64_t>(r));
    const auto first = firsts[static_cast<std::size_t>(r) % firsts.size()];
    auto run = lloyd(points, plus_plus_seeds(points, options.k, first, rng), options.max_iter, options.tol);
    if (!have || run.wcss < model.wcss) {
      have = true;
      model.wcss = run.wcss;
      model.centroids = std::move(run.centroids);
      model.assignments = std::move(run.assignments);
      model.best_restart = r;
      model.iterations = run.iterations;
    }
  }
  if (options.k == 1) model.wcss = model.tss;
  model.bd_td = model.tss > 0.0 ? std::clamp(1.0 - model.wcss / model.tss, 0.0, 1.0) : 0.0;
  return model;
}

std::uint64_t curve_seed(std::uint64_t seed, int k) {
  return derive_seed(seed, static_cast<std::uint64_t>(k));
}

KSelectionCurve bd_td_curve(const PointSet& points, int k_min, int k_max, std::uint64_t seed,
                            int restarts, int max_iter, double tol) {
  if (k_min < 1 || k_min >= k_max) throw config_error(kModule, "need 1 <= k_min < k_max");
  const auto distinct = points.distinct_count();
  if (static_cast<std::size_t>(k_max) > distinct)
    throw data_error(kModule, "k_max = " + std::to_string(k_max) + " exceeds the " +
                                  std::to_string(distinct) + " distinct points");
  KSelectionCurve curve;
  for (int k = k_min; k <= k_max; ++k) {
    const auto model = kmeans(points, {k, curve_seed(seed, k), restarts, max_iter, tol});
    curve.entries.push_back({k, model.bd_td});
  }
  return curve;
}

KSelection select_k(std::span<const CurveEntry> entries, double threshold) {
  if (entries.size() < 2) throw config_error(kModule, "k selection needs at least two curve entries");
  KSelection sel;
  for (std::size_t i = 0; i + 1 < entries.size(); ++i) {
    const double inc = entries[i + 1].bd_td - entries[i].bd_td;
    if (inc < -1e-9) sel.non_monotone = true;
  }
  for (std::size_t i = 0; i + 1 < entries.size(); ++i) {
    if (entries[i + 1].bd_td - entries[i].bd_td < threshold) {
      sel.k = entries[i].k;
      return sel;
    }
  }
  sel.k = entries.back().k;
  sel.saturated = true;
  return sel;
}

}  // namespace courtphase
