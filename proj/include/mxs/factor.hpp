// SPDX-License-Identifier: Apache-2.0

#ifndef MXS_FACTOR_HPP
#define MXS_FACTOR_HPP

#include <span>
#include <stdexcept>
#include "mxs/sparse.hpp"

namespace mxs
{

class FactorizationBreakdown : public std::runtime_error
{
public:
  FactorizationBreakdown(const std::string &what, Index row)
    : std::runtime_error(what), row_(row)
  {
  }
  Index row() const { return row_; }

private:
  Index row_;
};

//
// A = L U without pivoting under the given (natural) ordering. L is unit lower
// triangular and stored without its diagonal; U carries the pivots on its diagonal.
//
struct LuFactors
{
  SparseMatrix L;
  SparseMatrix U;
  // nnz(L + U) / nnz(A), counting the unit diagonal of L once with U.
  double fill_ratio = 1.0;

  Index size() const { return U.nrows; }
  void solve_in_place(std::span<double> x) const;
  Vector solve(std::span<const double> b) const;
};

// Breakdown when |pivot| < 1e-14 * max |a_ij| of the pivot row.
LuFactors sparse_lu(const SparseMatrix &A);

//
// Zero-fill incomplete Cholesky, A ~ L L^T. If a nonpositive pivot shows up the
// factorization restarts on A + beta*diag(A), beta = 1e-3, 2e-3, ... up to 1.
//
struct IC0Factor
{
  SparseMatrix L;   // lower triangular, diagonal last in each row
  SparseMatrix Lt;  // L^T, kept for the backward sweep
  double shift = 0.0;

  Index size() const { return L.nrows; }
  void solve_in_place(std::span<double> x) const;
  Vector solve(std::span<const double> b) const;
};

IC0Factor ic0(const SparseMatrix &A);

}  // namespace mxs

#endif  // MXS_FACTOR_HPP
