#include "courtphase/mds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "courtphase/error.hpp"

namespace courtphase {

namespace {
constexpr const char* kModule = "mds";

MeanDistanceMatrix accumulate(std::span<const DyadVector> features, std::span<const int> assignments,
                              int cluster_id, bool all) {
  MeanDistanceMatrix out;
  out.cluster_id = cluster_id;
  DyadDistances sums{};
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (!all && assignments[i] != cluster_id) continue;
    ++out.frame_count;
    for (std::size_t k = 0; k < kDyadCount; ++k) sums[k] += features[i].distances[k];
  }
  if (out.frame_count == 0)
    throw data_error(kModule, "cluster " + std::to_string(cluster_id) + " has no frames");
  const auto& pairs = dyad_pairs();
  for (std::size_t k = 0; k < kDyadCount; ++k) {
    const double mean = sums[k] / static_cast<double>(out.frame_count);
    const auto [i, j] = pairs[k];
    out.matrix(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = mean;
    out.matrix(static_cast<std::size_t>(j), static_cast<std::size_t>(i)) = mean;
  }
  return out;
}
}  // namespace

double MeanDistanceMatrix::mean_off_diagonal() const {
  double s = 0.0;
  for (std::size_t i = 0; i < matrix.size(); ++i)
    for (std::size_t j = i + 1; j < matrix.size(); ++j) s += matrix(i, j);
  const auto n = matrix.size();
  return n < 2 ? 0.0 : s / static_cast<double>(n * (n - 1) / 2);
}

MeanDistanceMatrix mean_distance_matrix(std::span<const int> assignments,
                                        std::span<const DyadVector> features, int cluster_id) {
  if (assignments.size() != features.size())
    throw data_error(kModule, "assignments and features differ in length");
  return accumulate(features, assignments, cluster_id, false);
}

MeanDistanceMatrix game_average_matrix(std::span<const DyadVector> features) {
  return accumulate(features, {}, -1, true);
}

SymmetricEigen jacobi_eigen(const SquareMatrix& input, double tol, int max_sweeps) {
  const std::size_t n = input.size();
  SquareMatrix a = input;
  SquareMatrix v(n);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

  double norm = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) norm += a(i, j) * a(i, j);
  norm = std::sqrt(norm);

  SymmetricEigen result;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += 2.0 * a(i, j) * a(i, j);
    if (std::sqrt(off) <= tol * std::max(norm, 1e-300)) break;
    result.sweeps = sweep + 1;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });
  result.values.resize(n);
  result.vectors = SquareMatrix(n);
  for (std::size_t c = 0; c < n; ++c) {
    result.values[c] = a(order[c], order[c]);
    for (std::size_t k = 0; k < n; ++k) result.vectors(k, c) = v(k, order[c]);
  }
  return result;
}

MdsEmbedding classical_mds(const SquareMatrix& d, std::size_t dims, int cluster_id) {
  const std::size_t n = d.size();
  if (dims < 1 || dims > n) throw config_error(kModule, "embedding dimension out of range");
  for (std::size_t i = 0; i < n; ++i) {
    if (d(i, i) != 0.0) throw config_error(kModule, "distance matrix has a non-zero diagonal");
    for (std::size_t j = 0; j < n; ++j) {
      if (!(d(i, j) >= 0.0) || !std::isfinite(d(i, j)))
        throw config_error(kModule, "distance matrix has a negative or non-finite entry");
      if (std::abs(d(i, j) - d(j, i)) > 1e-9 * std::max(1.0, std::abs(d(i, j))))
        throw config_error(kModule, "distance matrix is not symmetric");
    }
  }

  // B = -1/2 J D^2 J, written out as double centring of the squared entries.
  SquareMatrix sq(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) sq(i, j) = d(i, j) * d(i, j);
  std::vector<double> row_mean(n, 0.0);
  double grand = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) row_mean[i] += sq(i, j);
    grand += row_mean[i];
    row_mean[i] /= static_cast<double>(n);
  }
  grand /= static_cast<double>(n * n);
  SquareMatrix b(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) b(i, j) = -0.5 * (sq(i, j) - row_mean[i] - row_mean[j] + grand);

  const auto eig = jacobi_eigen(b);

  MdsEmbedding out;
  out.cluster_id = cluster_id;
  out.dims = dims;
  out.spectrum = eig.values;
  out.coords.assign(n, std::vector<double>(dims, 0.0));
  double positive_mass = 0.0;
  for (double l : eig.values) positive_mass += std::max(l, 0.0);
  // Eigenvalues within rounding of zero are treated as zero.
  const double floor = 1e-12 * std::max(positive_mass, 1e-300);

  double retained = 0.0;
  for (std::size_t c = 0; c < dims; ++c) {
    double lambda = eig.values[c] > floor ? eig.values[c] : 0.0;
    out.eigenvalues.push_back(lambda);
    retained += lambda;
    const double scale = std::sqrt(lambda);
    // The eigenvector is orthogonal to the ones vector up to the solver
    // tolerance; remove the residual so the configuration is centred.
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += eig.vectors(i, c);
    mean /= static_cast<double>(n);
    std::size_t biggest = 0;
    for (std::size_t i = 0; i < n; ++i) {
      out.coords[i][c] = (eig.vectors(i, c) - mean) * scale;
      if (std::abs(out.coords[i][c]) > std::abs(out.coords[biggest][c]) + 1e-12 * std::max(1.0, scale))
        biggest = i;
    }
    if (out.coords[biggest][c] < 0.0)
      for (std::size_t i = 0; i < n; ++i) out.coords[i][c] = -out.coords[i][c];
    for (std::size_t i = 0; i < n; ++i)
      if (out.coords[i][c] == 0.0) out.coords[i][c] = 0.0;  // drop negative zero
  }
  out.strain_share = positive_mass > 0.0 ? std::clamp(retained / positive_mass, 0.0, 1.0) : 1.0;
  return out;
}

MdsEmbedding procrustes_align(const MdsEmbedding& reference, const MdsEmbedding& moving) {
  if (reference.dims != 2 || moving.dims != 2 || reference.coords.size() != moving.coords.size())
    throw config_error(kModule, "Procrustes alignment needs two 2-D embeddings of equal size");

  // For 2-D the optimal rotation angle is atan2(sum cross, sum dot); the
  // reflected variant is tried as well and the lower residual kept.
  auto fit = [&](bool reflect) {
    double dot = 0.0, cross = 0.0;
    for (std::size_t i = 0; i < moving.coords.size(); ++i) {
      const double mx = moving.coords[i][0];
      const double my = reflect ? -moving.coords[i][1] : moving.coords[i][1];
      const double rx = reference.coords[i][0], ry = reference.coords[i][1];
      dot += mx * rx + my * ry;
      cross += mx * ry - my * rx;
    }
    const double angle = std::atan2(cross, dot);
    const double c = std::cos(angle), s = std::sin(angle);
    MdsEmbedding out = moving;
    double residual = 0.0;
    for (std::size_t i = 0; i < out.coords.size(); ++i) {
      const double mx = moving.coords[i][0];
      const double my = reflect ? -moving.coords[i][1] : moving.coords[i][1];
      out.coords[i][0] = c * mx - s * my;
      out.coords[i][1] = s * mx + c * my;
      const double ex = out.coords[i][0] - reference.coords[i][0];
      const double ey = out.coords[i][1] - reference.coords[i][1];
      residual += ex * ex + ey * ey;
    }
    return std::pair{residual, out};
  };
  auto plain = fit(false);
  auto mirrored = fit(true);
  return mirrored.first < plain.first - 1e-12 ? mirrored.second : plain.second;
}

}  // namespace courtphase
