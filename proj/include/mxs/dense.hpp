// SPDX-License-Identifier: Apache-2.0

#ifndef MXS_DENSE_HPP
#define MXS_DENSE_HPP

#include <complex>
#include <memory>
#include <span>
#include <vector>
#include "mxs/sparse.hpp"

namespace mxs
{

// Row-major dense matrix for small oracles and Hessenberg work.
struct DenseMatrix
{
  Index rows = 0;
  Index cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(Index r, Index c) : rows(r), cols(c), data(static_cast<std::size_t>(r * c), 0.0) {}

  double &operator()(Index i, Index j) { return data[static_cast<std::size_t>(i * cols + j)]; }
  double operator()(Index i, Index j) const
  {
    return data[static_cast<std::size_t>(i * cols + j)];
  }

  static DenseMatrix from_sparse(const SparseMatrix &A);
};

class SingularMatrix : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class NoConvergence : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Partial-pivoting LU, factored once; n <= 20000.
class DenseLu
{
public:
  explicit DenseLu(const DenseMatrix &A);
  Index size() const { return n_; }
  Vector solve(std::span<const double> b) const;

private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  Index n_ = 0;
};

// Partial-pivoting LU solve; n <= 20000.
Vector dense_solve(const DenseMatrix &A, std::span<const double> b);

// All eigenvalues of a k x k upper Hessenberg matrix (k <= 64). Entries below the
// first subdiagonal are ignored.
std::vector<std::complex<double>> hessenberg_eigenvalues(const DenseMatrix &H);

}  // namespace mxs

#endif  // MXS_DENSE_HPP
