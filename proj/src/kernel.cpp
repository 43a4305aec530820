#include "submod/kernel.hpp"

#include <algorithm>
#include <cmath>

namespace submod {
namespace {

constexpr double kSnapTol = 1e-9;
constexpr double kSymTol = 1e-5;

double snap_unit_interval(double v, int i, int j) {
  if (!std::isfinite(v)) {
    throw Error("kernel entry (" + std::to_string(i) + "," + std::to_string(j) +
                ") is not finite");
  }
  if (v < -kSnapTol || v > 1.0 + kSnapTol) {
    throw Error("kernel entry (" + std::to_string(i) + "," + std::to_string(j) +
                ") = " + std::to_string(v) + " outside [0,1]");
  }
  return std::clamp(v, 0.0, 1.0);
}

}  // namespace

SimilarityKernel SimilarityKernel::from_dense(Matrix m) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw Error("kernel must be a nonempty square matrix");
  int n = static_cast<int>(m.rows());
  for (int i = 0; i < n; ++i) {
    if (std::abs(m(i, i) - 1.0) > kSymTol)
      throw Error("kernel diagonal entry " + std::to_string(i) + " is not 1");
    m(i, i) = 1.0;
    for (int j = i + 1; j < n; ++j) {
      if (std::abs(m(i, j) - m(j, i)) > kSymTol)
        throw Error("kernel is not symmetric at (" + std::to_string(i) + "," +
                    std::to_string(j) + ")");
      double v = std::max(snap_unit_interval(m(i, j), i, j),
                          snap_unit_interval(m(j, i), j, i));
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  SimilarityKernel k;
  k.n_ = n;
  k.sparse_ = false;
  k.dense_ = std::move(m);
  return k;
}

SimilarityKernel SimilarityKernel::from_sparse(int n, std::vector<SparseRow> rows) {
  if (n <= 0 || rows.size() != static_cast<std::size_t>(n))
    throw Error("sparse kernel row count mismatch");
  for (int i = 0; i < n; ++i) {
    bool diag_seen = false;
    int prev = -1;
    for (auto& [j, s] : rows[i]) {
      if (j < 0 || j >= n) throw Error("sparse kernel column out of range");
      if (j <= prev) throw Error("sparse kernel row not sorted");
      prev = j;
      s = snap_unit_interval(s, i, j);
      if (j == i) {
        if (std::abs(s - 1.0) > kSymTol)
          throw Error("kernel diagonal entry " + std::to_string(i) + " is not 1");
        s = 1.0;
        diag_seen = true;
      }
    }
    if (!diag_seen) throw Error("sparse kernel row " + std::to_string(i) +
                                " is missing its diagonal entry");
  }
  SimilarityKernel k;
  k.n_ = n;
  k.sparse_ = true;
  k.rows_ = std::move(rows);
  // symmetry of the stored structure
  for (int i = 0; i < n; ++i)
    for (const auto& [j, s] : k.rows_[i])
      if (std::abs(k.at(j, i) - s) > kSymTol)
        throw Error("sparse kernel is not symmetric at (" + std::to_string(i) +
                    "," + std::to_string(j) + ")");
  return k;
}

double SimilarityKernel::at(int i, int j) const {
  if (!sparse_) return dense_(i, j);
  const auto& row = rows_[i];
  auto it = std::lower_bound(row.begin(), row.end(), j,
                             [](const auto& e, int col) { return e.first < col; });
  if (it != row.end() && it->first == j) return it->second;
  return 0.0;
}

double SimilarityKernel::column_sum(int j) const {
  double total = 0.0;
  for_each_in_column(j, [&](int, double s) { total += s; });
  return total;
}

const Matrix& SimilarityKernel::dense_matrix() const {
  if (sparse_) throw Error("kernel is sparse; use to_dense()");
  return dense_;
}

const std::vector<SimilarityKernel::SparseRow>& SimilarityKernel::sparse_rows() const {
  if (!sparse_) throw Error("kernel is dense");
  return rows_;
}

Matrix SimilarityKernel::to_dense() const {
  if (!sparse_) return dense_;
  Matrix m = Matrix::Zero(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (const auto& [j, s] : rows_[i]) m(i, j) = s;
  return m;
}

DistanceMatrix::DistanceMatrix(Matrix d) : d_(std::move(d)) {
  if (d_.rows() != d_.cols() || d_.rows() == 0)
    throw Error("distance matrix must be square");
}

DistanceMatrix to_distance(const SimilarityKernel& kernel) {
  int n = kernel.size();
  Matrix d(n, n);
  if (!kernel.is_sparse()) {
    d = Matrix::Constant(n, n, 1.0) - kernel.dense_matrix();
  } else {
    d.setConstant(1.0);
    for (int i = 0; i < n; ++i)
      for (const auto& [j, s] : kernel.sparse_rows()[i]) d(i, j) = 1.0 - s;
  }
  for (int i = 0; i < n; ++i) d(i, i) = 0.0;
  return DistanceMatrix(std::move(d));
}

}  // namespace submod
