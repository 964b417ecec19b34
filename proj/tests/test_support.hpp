// SPDX-License-Identifier: Apache-2.0

#ifndef MXS_TEST_SUPPORT_HPP
#define MXS_TEST_SUPPORT_HPP

#include <cmath>
#include <span>

#include "mxs/bench.hpp"
#include "mxs/dense.hpp"
#include "mxs/solvers.hpp"

namespace mxs::test
{

inline double rel_diff(std::span<const double> a, std::span<const double> b)
{
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
  {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

inline SparseMatrix random_sparse(Index rows, Index cols, double density, std::uint64_t seed)
{
  RngStream rng(seed);
  std::vector<Triplet> t;
  for (Index i = 0; i < rows; ++i)
  {
    for (Index j = 0; j < cols; ++j)
    {
      if (rng.next_uniform() < density)
      {
        t.push_back({i, j, rng.next_normal()});
      }
    }
  }
  return SparseMatrix::from_triplets(rows, cols, std::move(t));
}

// Dense matrix-vector product, the oracle for sparse kernels.
inline Vector dense_mv(const DenseMatrix &A, std::span<const double> x)
{
  Vector y(static_cast<std::size_t>(A.rows), 0.0);
  for (Index i = 0; i < A.rows; ++i)
  {
    for (Index j = 0; j < A.cols; ++j)
    {
      y[i] += A(i, j) * x[j];
    }
  }
  return y;
}

// Random SPD matrix B^T B + n I.
inline SparseMatrix random_spd(Index n, std::uint64_t seed)
{
  const SparseMatrix B = random_sparse(n, n, 0.1, seed);
  return add(multiply(transpose(B), B), SparseMatrix::identity(n), 1.0, static_cast<double>(n));
}

// Reference scene without PML and with unit materials.
inline ProblemSpec vacuum_spec(std::array<Index, 3> cells)
{
  ProblemSpec spec = reference_spec(cells);
  spec.pml_thickness = {0.0, 0.0, 0.0};
  spec.scene.eps_inside = 1.0;
  return spec;
}

}  // namespace mxs::test

#endif  // MXS_TEST_SUPPORT_HPP
