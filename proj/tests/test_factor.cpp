// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "test_support.hpp"

using namespace mxs;
using mxs::test::rel_diff;

namespace
{

SparseMatrix laplacian_1d(Index n)
{
  std::vector<Triplet> t;
  for (Index i = 0; i < n; ++i)
  {
    t.push_back({i, i, 2.0});
    if (i > 0)
    {
      t.push_back({i, i - 1, -1.0});
      t.push_back({i - 1, i, -1.0});
    }
  }
  return SparseMatrix::from_triplets(n, n, std::move(t));
}

}  // namespace

TEST_CASE("sparse LU solves against the dense oracle")
{
  const SparseMatrix A = add(mxs::test::random_sparse(40, 40, 0.1, 5), SparseMatrix::identity(40),
                             1.0, 10.0);
  const LuFactors lu = sparse_lu(A);
  RngStream rng(6);
  const Vector b = rng.normal_vector(40);
  const Vector x = lu.solve(b);
  const Vector xd = dense_solve(DenseMatrix::from_sparse(A), b);
  CHECK(rel_diff(x, xd) < 1e-12);
  CHECK(lu.fill_ratio >= 1.0);
}

TEST_CASE("tridiagonal LU has no fill")
{
  const LuFactors lu = sparse_lu(laplacian_1d(30));
  CHECK(lu.fill_ratio == 1.0);
}

TEST_CASE("arrow matrix fills in under natural ordering")
{
  std::vector<Triplet> t;
  for (Index i = 0; i < 5; ++i)
  {
    t.push_back({i, i, 4.0});
    if (i > 0)
    {
      t.push_back({0, i, 1.0});
      t.push_back({i, 0, 1.0});
    }
  }
  const SparseMatrix A = SparseMatrix::from_triplets(5, 5, std::move(t));
  CHECK(sparse_lu(A).fill_ratio > 1.0);
  const std::vector<Index> reversed{4, 3, 2, 1, 0};
  CHECK(sparse_lu(permute_symmetric(A, reversed)).fill_ratio == 1.0);
}

TEST_CASE("LU without pivoting breaks down on a zero pivot")
{
  const SparseMatrix A = SparseMatrix::from_triplets(2, 2, {{0, 1, 1.0}, {1, 0, 1.0}});
  CHECK_THROWS_AS(sparse_lu(A), FactorizationBreakdown);
}

TEST_CASE("IC(0) of a tridiagonal SPD matrix is the exact Cholesky factor")
{
  const SparseMatrix A = laplacian_1d(25);
  const IC0Factor ic = ic0(A);
  CHECK(ic.shift == 0.0);
  RngStream rng(7);
  const Vector b = rng.normal_vector(25);
  const Vector x = ic.solve(b);
  CHECK(rel_diff(spmv(A, x), b) < 1e-13);
}

TEST_CASE("IC(0) applies a diagonal shift when a pivot is not positive")
{
  // symmetric, positive diagonal, indefinite
  const SparseMatrix A =
    SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {0, 1, 1.02}, {1, 0, 1.02}, {1, 1, 1.0}});
  const IC0Factor ic = ic0(A);
  CHECK(ic.shift > 0.0);
  CHECK(ic.shift < 0.1);
}
