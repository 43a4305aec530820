#pragma once

#include <utility>
#include <vector>

#include "submod/common.hpp"

namespace submod {

/// Symmetric similarity matrix with entries in [0, 1] and unit diagonal.
/// Either dense, or k-NN sparsified with per-row entry lists (sorted by
/// column index, diagonal always stored) and implicit zeros elsewhere.
class SimilarityKernel {
 public:
  using SparseRow = std::vector<std::pair<int, double>>;

  /// Wraps a dense matrix, validating the kernel invariants. Entries within
  /// 1e-9 of the valid range are snapped; anything worse is an error.
  static SimilarityKernel from_dense(Matrix m);

  /// Wraps pre-built sparse rows. Rows must be index-sorted, symmetric and
  /// contain the unit diagonal.
  static SimilarityKernel from_sparse(int n, std::vector<SparseRow> rows);

  int size() const { return n_; }
  bool is_sparse() const { return sparse_; }

  double at(int i, int j) const;

  /// Sum over i in V of s_ij (missing sparse entries count as zero).
  double column_sum(int j) const;

  /// Visits the stored entries of column j as fn(i, s_ij). Dense kernels
  /// visit all n entries; sparse kernels visit the stored ones. Symmetry
  /// makes column j identical to row j.
  template <class Fn>
  void for_each_in_column(int j, Fn&& fn) const {
    if (!sparse_) {
      const double* col = dense_.col(j).data();
      for (int i = 0; i < n_; ++i) fn(i, col[i]);
    } else {
      for (const auto& [i, s] : rows_[j]) fn(i, s);
    }
  }

  const Matrix& dense_matrix() const;
  const std::vector<SparseRow>& sparse_rows() const;

  /// Materializes the kernel (fills implicit zeros for the sparse form).
  Matrix to_dense() const;

 private:
  SimilarityKernel() = default;
  int n_ = 0;
  bool sparse_ = false;
  Matrix dense_;
  std::vector<SparseRow> rows_;
};

/// Pairwise dissimilarity d_ij = 1 - s_ij: zero diagonal, symmetric,
/// entries in [0, 1]. Always dense.
class DistanceMatrix {
 public:
  explicit DistanceMatrix(Matrix d);
  int size() const { return static_cast<int>(d_.rows()); }
  double at(int i, int j) const { return d_(i, j); }
  double row_sum(int i) const { return d_.row(i).sum(); }
  const Matrix& matrix() const { return d_; }

 private:
  Matrix d_;
};

DistanceMatrix to_distance(const SimilarityKernel& kernel);

}  // namespace submod
