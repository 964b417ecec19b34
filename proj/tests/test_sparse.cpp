// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <sstream>

#include "test_support.hpp"

using namespace mxs;
using mxs::test::dense_mv;
using mxs::test::random_sparse;
using mxs::test::rel_diff;

TEST_CASE("from_triplets sums duplicates and sorts columns")
{
  const SparseMatrix A =
    SparseMatrix::from_triplets(2, 3, {{1, 2, 1.0}, {0, 1, 2.0}, {1, 0, 3.0}, {1, 2, 4.0}});
  A.validate();
  CHECK(A.nnz() == 3);
  CHECK(A.coeff(1, 2) == 5.0);
  CHECK(A.coeff(0, 1) == 2.0);
  CHECK(A.coeff(0, 0) == 0.0);
  CHECK_THROWS_AS(SparseMatrix::from_triplets(2, 2, {{2, 0, 1.0}}), DimensionError);
}

TEST_CASE("validate reports a broken column order")
{
  SparseMatrix A(1, 3);
  A.row_offsets = {0, 2};
  A.col_indices = {2, 1};
  A.values = {1.0, 1.0};
  CHECK_THROWS_AS(A.validate(), std::logic_error);
}

TEST_CASE("row builder matches triplet assembly")
{
  RowBuilder rb(2, 3);
  rb.push(2, 1.0);
  rb.push(0, -1.0);
  rb.finish_row();
  rb.push(1, 4.0);
  rb.finish_row();
  const SparseMatrix A = rb.build();
  const SparseMatrix B = SparseMatrix::from_triplets(2, 3, {{0, 0, -1.0}, {0, 2, 1.0}, {1, 1, 4.0}});
  CHECK(max_abs_diff(A, B) == 0.0);
  CHECK(A.col_indices == B.col_indices);
}

TEST_CASE("spmv, transpose and product agree with dense oracles")
{
  const SparseMatrix A = random_sparse(17, 11, 0.3, 1);
  const SparseMatrix B = random_sparse(11, 13, 0.3, 2);
  const DenseMatrix Ad = DenseMatrix::from_sparse(A);
  RngStream rng(3);
  const Vector x = rng.normal_vector(11);
  CHECK(rel_diff(spmv(A, x), dense_mv(Ad, x)) < 1e-15);

  const Vector z = rng.normal_vector(17);
  const DenseMatrix Atd = DenseMatrix::from_sparse(transpose(A));
  CHECK(rel_diff(spmv_transpose(A, z), dense_mv(Atd, z)) < 1e-15);
  CHECK(rel_diff(spmv(transpose(A), z), dense_mv(Atd, z)) < 1e-15);

  const SparseMatrix C = multiply(A, B);
  C.validate();
  const Vector y = rng.normal_vector(13);
  CHECK(rel_diff(spmv(C, y), spmv(A, spmv(B, y))) < 1e-13);
  CHECK_THROWS_AS(multiply(A, A), DimensionError);
}

TEST_CASE("add keeps the union pattern and scales")
{
  const SparseMatrix A = SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {1, 0, 2.0}});
  const SparseMatrix B = SparseMatrix::from_triplets(2, 2, {{0, 0, -1.0}, {0, 1, 3.0}});
  const SparseMatrix C = add(A, B);
  CHECK(C.nnz() == 3);
  CHECK(C.coeff(0, 0) == 0.0);
  const SparseMatrix D = add(A, B, 2.0, -1.0);
  CHECK(D.coeff(0, 0) == 3.0);
  CHECK(D.coeff(0, 1) == -3.0);
  CHECK(prune(C).nnz() == 2);
}

TEST_CASE("row and column scaling")
{
  const SparseMatrix A = SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {0, 1, 2.0}, {1, 1, 3.0}});
  const Vector d{2.0, 5.0};
  CHECK(scale_rows(d, A).coeff(1, 1) == 15.0);
  CHECK(scale_cols(A, d).coeff(0, 1) == 10.0);
  CHECK(scaled(A, -1.0).coeff(0, 0) == -1.0);
}

TEST_CASE("block matrix places blocks and skips empty ones")
{
  const SparseMatrix I2 = SparseMatrix::identity(2);
  const SparseMatrix R = SparseMatrix::from_triplets(2, 1, {{1, 0, 7.0}});
  const std::array<Index, 2> rows{2, 2}, cols{2, 1};
  const SparseMatrix M = block_matrix({{&I2, nullptr}, {nullptr, &R}}, rows, cols);
  M.validate();
  CHECK(M.nrows == 4);
  CHECK(M.ncols == 3);
  CHECK(M.coeff(1, 1) == 1.0);
  CHECK(M.coeff(3, 2) == 7.0);
  CHECK(M.nnz() == 3);
}

TEST_CASE("symmetric permutation")
{
  const SparseMatrix A = random_sparse(6, 6, 0.5, 9);
  const std::vector<Index> p{3, 1, 5, 0, 2, 4};
  const SparseMatrix B = permute_symmetric(A, p);
  for (Index i = 0; i < 6; ++i)
  {
    for (Index j = 0; j < 6; ++j)
    {
      CHECK(B.coeff(i, j) == A.coeff(p[i], p[j]));
    }
  }
}

TEST_CASE("norms and parts")
{
  const SparseMatrix A = SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {0, 1, -4.0}, {1, 0, 2.0}});
  CHECK(one_norm(A) == 4.0);
  CHECK(max_abs(A) == 4.0);
  const SparseMatrix H = symmetric_part(A), S = skew_part(A);
  CHECK(H.coeff(0, 1) == -1.0);
  CHECK(S.coeff(0, 1) == -3.0);
  CHECK(S.coeff(1, 0) == 3.0);
  CHECK(max_abs_diff(add(H, S), A) == 0.0);
}

TEST_CASE("matrix market round trip is exact")
{
  const SparseMatrix A = random_sparse(9, 7, 0.4, 4);
  std::stringstream ss;
  write_matrix_market(ss, A);
  const SparseMatrix B = read_matrix_market(ss);
  CHECK(B.nrows == 9);
  CHECK(B.ncols == 7);
  CHECK(max_abs_diff(A, B) == 0.0);
}

TEST_CASE("matrix market symmetric and pattern inputs")
{
  std::istringstream sym("%%MatrixMarket matrix coordinate real symmetric\n% c\n2 2 2\n1 1 4\n2 1 -1\n");
  const SparseMatrix S = read_matrix_market(sym);
  CHECK(S.coeff(0, 1) == -1.0);
  CHECK(S.coeff(1, 0) == -1.0);
  std::istringstream pat("%%MatrixMarket matrix coordinate pattern general\n2 3 1\n2 3\n");
  CHECK(read_matrix_market(pat).coeff(1, 2) == 1.0);
  std::istringstream bad("not a header\n");
  CHECK_THROWS(read_matrix_market(bad));
}

TEST_CASE("vector kernels")
{
  Vector x{3.0, 4.0}, y{1.0, 1.0};
  CHECK(norm2(x) == 5.0);
  CHECK(dot(x, y) == 7.0);
  axpy(2.0, x, y);
  CHECK(y[1] == 9.0);
}
