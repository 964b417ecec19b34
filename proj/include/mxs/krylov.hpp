// SPDX-License-Identifier: Apache-2.0

#ifndef MXS_KRYLOV_HPP
#define MXS_KRYLOV_HPP

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>
#include "mxs/dense.hpp"
#include "mxs/sparse.hpp"

namespace mxs
{

class KrylovBreakdown : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct LinearOperator
{
  Index dim = 0;
  std::function<void(std::span<const double>, std::span<double>)> apply;

  Vector operator()(std::span<const double> x) const
  {
    Vector y(static_cast<std::size_t>(dim));
    apply(x, y);
    return y;
  }

  static LinearOperator from_matrix(const SparseMatrix &A);
  static LinearOperator identity(Index n);
};

struct SolveReport
{
  bool converged = false;
  // GMRES: total Arnoldi steps; CG: iterations; BiCGstab(l): full l-cycles.
  Index iterations = 0;
  Index cycles = 0;  // GMRES restart cycles
  Index matvecs = 0;
  Index preconditioner_applications = 0;
  // Relative recurrence residuals, one per iteration.
  std::vector<double> residual_history;
  // ||b - A x|| / ||b|| recomputed from the returned x.
  double final_residual = 0.0;
  double wall_time = 0.0;
  // Nested solves: per-outer-step inner iteration counts.
  std::vector<Index> inner_iterations;
  Index max_inner() const;
  Index total_inner() const;
};

struct SolveResult
{
  Vector x;
  SolveReport report;
};

struct KrylovOptions
{
  double tol = 1e-10;
  Index maxiter = 1000;
  // Converged runs must satisfy true residual <= slack * tol.
  double slack = 10.0;
};

// Right-preconditioned restarted GMRES. The preconditioned directions are kept, so
// a preconditioner that varies slightly between applications is tolerated.
SolveResult gmres_restarted(const LinearOperator &A, const LinearOperator *Minv,
                            std::span<const double> b, Index restart,
                            const KrylovOptions &opts);

SolveResult cg(const LinearOperator &A, const LinearOperator *Minv, std::span<const double> b,
               const KrylovOptions &opts);

// BiCGstab(l) with right preconditioning; l = 2 unless told otherwise.
SolveResult bicgstab_l(const LinearOperator &A, const LinearOperator *Minv,
                       std::span<const double> b, const KrylovOptions &opts, int ell = 2);

inline SolveResult bicgstab2(const LinearOperator &A, const LinearOperator *Minv,
                             std::span<const double> b, const KrylovOptions &opts)
{
  return bicgstab_l(A, Minv, b, opts, 2);
}

struct ArnoldiResult
{
  std::vector<Vector> V;  // k+1 basis vectors (k on breakdown)
  DenseMatrix H;          // (steps+1) x steps
  Index steps = 0;
  bool breakdown = false;
};

// Arnoldi on A M^-1 started from b; modified Gram-Schmidt with one reorthogonalization.
ArnoldiResult arnoldi(const LinearOperator &A, const LinearOperator *Minv,
                      std::span<const double> b, Index k);

struct RitzResult
{
  std::vector<std::complex<double>> values;
  Index steps = 0;
  bool breakdown = false;

  // max |Im| / max |Re|
  double imag_ratio() const;
};

// Ritz values of A M^-1 after k FOM/Arnoldi steps (k <= 64).
RitzResult fom_ritz(const LinearOperator &A, const LinearOperator *Minv,
                    std::span<const double> b, Index k);

}  // namespace mxs

#endif  // MXS_KRYLOV_HPP
