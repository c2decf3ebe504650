#pragma once

#include <array>
#include <span>
#include <vector>

#include "courtphase/segment.hpp"

namespace courtphase {

class SquareMatrix {
public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n) : n_(n), values_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return values_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }

private:
  std::size_t n_ = 0;
  std::vector<double> values_;
};

// Mean of each dyad distance over a set of frames, laid out as a symmetric
// 5 x 5 matrix in canonical lineup order. cluster_id is -1 for the
// whole-stint (game average) matrix.
struct MeanDistanceMatrix {
  int cluster_id = 0;
  std::size_t frame_count = 0;
  SquareMatrix matrix{kLineupSize};

  double mean_off_diagonal() const;
};

MeanDistanceMatrix mean_distance_matrix(std::span<const int> assignments,
                                        std::span<const DyadVector> features, int cluster_id);
MeanDistanceMatrix game_average_matrix(std::span<const DyadVector> features);

struct SymmetricEigen {
  // Descending.
  std::vector<double> values;
  // Column c is the unit eigenvector for values[c].
  SquareMatrix vectors;
  int sweeps = 0;
};

// Cyclic Jacobi rotations until the off-diagonal Frobenius norm falls below
// tol relative to the matrix norm.
SymmetricEigen jacobi_eigen(const SquareMatrix& a, double tol = 1e-12, int max_sweeps = 100);

struct MdsEmbedding {
  int cluster_id = 0;
  std::size_t dims = 2;
  // coords[i][d]: point i on axis d.
  std::vector<std::vector<double>> coords;
  // Retained eigenvalues, clamped at zero, descending.
  std::vector<double> eigenvalues;
  // Full spectrum of the double-centred matrix, descending, unclamped.
  std::vector<double> spectrum;
  // Retained share of the positive eigenvalue mass; 1 for an all-zero input.
  double strain_share = 1.0;
};

// Torgerson scaling: B = -1/2 J D^2 J, coords from the top eigenpairs scaled by
// sqrt(lambda). Each axis is signed so its largest-magnitude coordinate is
// positive.
MdsEmbedding classical_mds(const SquareMatrix& distances, std::size_t dims = 2, int cluster_id = 0);

// Orthogonal Procrustes (rotation or reflection) of a 2-D embedding onto a
// reference with the same number of points. Both are centred already.
MdsEmbedding procrustes_align(const MdsEmbedding& reference, const MdsEmbedding& moving);

}  // namespace courtphase
