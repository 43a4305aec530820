#include <cmath>

#include "doctest.h"
#include "submod/kernel.hpp"
#include "test_support.hpp"

using namespace submod;

TEST_CASE("from_dense snaps tiny violations and fixes the diagonal") {
  Matrix m = test::k3_matrix();
  m(0, 1) = m(1, 0) = 1.0 + 5e-10;  // within snap tolerance
  m(2, 2) = 1.0 - 5e-10;
  SimilarityKernel k = SimilarityKernel::from_dense(m);
  CHECK(k.at(0, 1) == 1.0);
  CHECK(k.at(2, 2) == 1.0);
  CHECK(k.size() == 3);
  CHECK_FALSE(k.is_sparse());
}

TEST_CASE("from_dense rejects bad kernels") {
  Matrix m = test::k3_matrix();
  m(0, 1) = m(1, 0) = 1.5;  // symmetric so the range check is what trips
  CHECK_THROWS_WITH_AS(SimilarityKernel::from_dense(m),
                       doctest::Contains("outside [0,1]"), Error);

  m = test::k3_matrix();
  m(0, 1) = 0.3;  // asymmetric beyond tolerance
  CHECK_THROWS_WITH_AS(SimilarityKernel::from_dense(m),
                       doctest::Contains("not symmetric"), Error);

  m = test::k3_matrix();
  m(1, 1) = 0.7;
  CHECK_THROWS_WITH_AS(SimilarityKernel::from_dense(m),
                       doctest::Contains("diagonal"), Error);

  m = test::k3_matrix();
  m(0, 2) = m(2, 0) = std::nan("");
  CHECK_THROWS_WITH_AS(SimilarityKernel::from_dense(m),
                       doctest::Contains("not finite"), Error);

  CHECK_THROWS_AS(SimilarityKernel::from_dense(Matrix(2, 3)), Error);
}

TEST_CASE("mild asymmetry is resolved by the max") {
  Matrix m = test::k3_matrix();
  m(0, 1) = 0.5;
  m(1, 0) = 0.5 + 4e-6;
  SimilarityKernel k = SimilarityKernel::from_dense(m);
  CHECK(k.at(0, 1) == 0.5 + 4e-6);
  CHECK(k.at(1, 0) == 0.5 + 4e-6);
}

TEST_CASE("column_sum and for_each_in_column agree with the matrix") {
  SimilarityKernel k = SimilarityKernel::from_dense(test::k3_matrix());
  CHECK(k.column_sum(0) == doctest::Approx(1.7).epsilon(1e-12));
  CHECK(k.column_sum(1) == doctest::Approx(1.6).epsilon(1e-12));
  CHECK(k.column_sum(2) == doctest::Approx(1.3).epsilon(1e-12));
  int visits = 0;
  double total = 0.0;
  k.for_each_in_column(1, [&](int i, double s) {
    ++visits;
    total += s;
    CHECK(s == k.at(i, 1));
  });
  CHECK(visits == 3);
  CHECK(total == doctest::Approx(1.6));
}

TEST_CASE("sparse kernel stores given entries and zero elsewhere") {
  std::vector<SimilarityKernel::SparseRow> rows(3);
  rows[0] = {{0, 1.0}, {1, 0.5}};
  rows[1] = {{0, 0.5}, {1, 1.0}};
  rows[2] = {{2, 1.0}};
  SimilarityKernel k = SimilarityKernel::from_sparse(3, rows);
  CHECK(k.is_sparse());
  CHECK(k.at(0, 1) == 0.5);
  CHECK(k.at(0, 2) == 0.0);
  CHECK(k.at(2, 2) == 1.0);
  CHECK(k.column_sum(0) == doctest::Approx(1.5));

  Matrix dense = k.to_dense();
  CHECK(dense(0, 1) == 0.5);
  CHECK(dense(1, 2) == 0.0);

  int visits = 0;
  k.for_each_in_column(2, [&](int, double) { ++visits; });
  CHECK(visits == 1);  // only the stored diagonal
}

TEST_CASE("from_sparse validates structure") {
  std::vector<SimilarityKernel::SparseRow> rows(2);
  rows[0] = {{0, 1.0}};
  rows[1] = {{0, 0.4}, {1, 1.0}};  // 0.4 missing from row 0 -> asymmetric
  CHECK_THROWS_WITH_AS(SimilarityKernel::from_sparse(2, rows),
                       doctest::Contains("not symmetric"), Error);

  rows[0] = {{1, 0.4}};  // diagonal absent
  rows[1] = {{0, 0.4}, {1, 1.0}};
  CHECK_THROWS_WITH_AS(SimilarityKernel::from_sparse(2, rows),
                       doctest::Contains("missing its diagonal"), Error);

  rows[0] = {{1, 0.4}, {0, 1.0}};  // unsorted
  CHECK_THROWS_WITH_AS(SimilarityKernel::from_sparse(2, rows),
                       doctest::Contains("not sorted"), Error);
}

TEST_CASE("to_distance flips similarity and zeroes the diagonal") {
  DistanceMatrix d = to_distance(SimilarityKernel::from_dense(test::k3_matrix()));
  CHECK(d.at(0, 1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(d.at(0, 2) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(d.at(1, 2) == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(d.at(0, 0) == 0.0);
  CHECK(d.row_sum(2) == doctest::Approx(1.7).epsilon(1e-12));
}

TEST_CASE("to_distance treats missing sparse entries as distance one") {
  std::vector<SimilarityKernel::SparseRow> rows(3);
  rows[0] = {{0, 1.0}, {1, 0.5}};
  rows[1] = {{0, 0.5}, {1, 1.0}};
  rows[2] = {{2, 1.0}};
  DistanceMatrix d = to_distance(SimilarityKernel::from_sparse(3, rows));
  CHECK(d.at(0, 1) == 0.5);
  CHECK(d.at(0, 2) == 1.0);
  CHECK(d.at(2, 0) == 1.0);
  CHECK(d.at(2, 2) == 0.0);
}
