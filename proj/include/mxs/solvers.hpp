// SPDX-License-Identifier: Apache-2.0

#ifndef MXS_SOLVERS_HPP
#define MXS_SOLVERS_HPP

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>
#include "mxs/dense.hpp"
#include "mxs/factor.hpp"
#include "mxs/krylov.hpp"
#include "mxs/pml.hpp"
#include "mxs/sparse.hpp"
#include "mxs/yee.hpp"

namespace mxs
{

//
// Geometry, materials and PML of one test problem.
//
struct ProblemSpec
{
  std::array<Index, 3> cells{20, 20, 12};
  std::array<double, 3> box{5.0, 5.0, 3.0};
  // Per-side PML thickness (length units); must be a whole number of cells.
  std::array<double, 3> pml_thickness{1.0, 1.0, 0.0};
  bool pec_z = true;
  PhotonicCrystalScene scene = PhotonicCrystalScene::reference();
  PmlParams pml;
};

// Reference scene on cells; the PML is one fifth of the x/y extent rounded to whole
// cells (at least one), i.e. thickness 1 on the 5x5x3 box whenever nx, ny are
// multiples of 5.
ProblemSpec reference_spec(std::array<Index, 3> cells);

//
// Heap-allocated so the internal cross references stay valid.
//
struct Problem
{
  YeeGrid grid;
  DofMap dofs;
  SigmaProfiles profiles;
  MaterialFields materials;
  MaxwellBlocks blocks;
  PmlCoupling coupling;

  explicit Problem(const ProblemSpec &spec);
  Problem(const Problem &) = delete;
  Problem &operator=(const Problem &) = delete;

  Index n() const { return blocks.n(); }
  Index m() const { return coupling.m(); }
  Index N() const { return n() + m(); }
  ExtendedOperator extended() const { return ExtendedOperator(blocks, coupling); }
};

std::unique_ptr<Problem> build_problem(const ProblemSpec &spec);

//
// Pieces of the middle-level elimination of I + gamma A.
//
struct SchurMatrices
{
  double gamma = 0.0;
  // M_eps + gamma M_s2 + gamma^2 K^T (M_mu + gamma M_s1)^-1 K
  SparseMatrix S_bracket;
  Vector h_shift_inv;  // (I + gamma M1)^-1
  Vector eps;          // diag(M_eps)
};

SchurMatrices build_schur_matrices(const MaxwellBlocks &blocks, double gamma);

// (I + gamma M2 + gamma^2 K2^T (I + gamma M1)^-1 K1) x
Vector apply_e_schur(const MaxwellBlocks &blocks, double gamma, std::span<const double> x);

struct MiddleOptions
{
  enum class Mode
  {
    SchurCg,  // Schur elimination, inner CG + IC(0)
    Lu        // sparse LU of I + gamma A under natural ordering; tiny meshes
  };
  Mode mode = Mode::SchurCg;
  double inner_tol = 1e-12;
  Index inner_maxiter = 20000;
};

class InnerSolveFailure : public std::runtime_error
{
public:
  InnerSolveFailure(const std::string &what, SolveReport report)
      : std::runtime_error(what), report(std::move(report))
  {
  }
  SolveReport report;
};

//
// Solves (I + gamma A) x = c.
//
class MiddleSolver
{
public:
  MiddleSolver(const MaxwellBlocks &blocks, double gamma, const MiddleOptions &opts = {});

  double gamma() const { return schur_.gamma; }
  const SchurMatrices &schur() const { return schur_; }
  const MiddleOptions &options() const { return opts_; }

  // Returns the inner CG iteration count (0 in LU mode).
  Index solve(std::span<const double> c, std::span<double> x) const;
  Vector solve(std::span<const double> c) const;

  // The solve as an operator; inner counts are appended to the sink when given.
  LinearOperator as_operator(std::vector<Index> *inner_sink = nullptr) const;

private:
  const MaxwellBlocks *blocks_;
  MiddleOptions opts_;
  SchurMatrices schur_;
  std::optional<IC0Factor> ic_;
  std::optional<LuFactors> lu_;
};

struct NestedOptions
{
  double gamma = 0.012;
  Index restart = 10;
  double tol = 1e-10;
  Index maxiter = 2000;
  MiddleOptions middle;
};

//
// Outer GMRES(restart) on I + gamma A + gamma^2 B1^T B2, right-preconditioned by the
// middle solver, wrapped in the block elimination of the auxiliary variables.
//
class NestedSchurSolver
{
public:
  NestedSchurSolver(const MaxwellBlocks &blocks, const PmlCoupling &coupling,
                    const NestedOptions &opts = {});

  const NestedOptions &options() const { return opts_; }
  const MiddleSolver &middle() const { return middle_; }
  Index n() const { return blocks_->n(); }
  Index m() const { return coupling_->m(); }

  // y = (I + gamma A + gamma^2 B1^T B2) x, matrix-free
  void apply_outer(std::span<const double> x, std::span<double> y) const;
  LinearOperator outer_operator() const;
  SparseMatrix assemble_outer() const;

  // Outer solve only (length n).
  SolveResult solve_outer(std::span<const double> b1) const;
  // Full system (length n + m); final_residual is that of the full system.
  SolveResult solve(std::span<const double> b) const;

private:
  const MaxwellBlocks *blocks_;
  const PmlCoupling *coupling_;
  NestedOptions opts_;
  MiddleSolver middle_;
};

//
// Field-splitting product preconditioner (I + gamma calA1)(I + gamma calA2).
//
struct FsOptions
{
  enum class Ordering
  {
    Natural,   // fields then auxiliary variables
    AuxFirst   // auxiliary variables then fields
  };
  Ordering ordering = Ordering::Natural;
};

class FsPreconditioner
{
public:
  FsPreconditioner(const MaxwellBlocks &blocks, const PmlCoupling &coupling, double gamma,
                   const FsOptions &opts = {});

  double gamma() const { return gamma_; }
  Index size() const { return static_cast<Index>(perm_.size()); }
  const SparseMatrix &factor1() const { return F1_; }  // I + gamma calA1, natural order
  const SparseMatrix &factor2() const { return F2_; }  // I + gamma calA2, natural order
  double fill_ratio1() const { return lu1_.fill_ratio; }
  double fill_ratio2() const { return lu2_.fill_ratio; }

  // y = (I + gamma calA2)^-1 (I + gamma calA1)^-1 v
  void apply(std::span<const double> v, std::span<double> y) const;
  LinearOperator as_operator() const;

private:
  double gamma_;
  FsOptions opts_;
  SparseMatrix F1_, F2_;
  std::vector<Index> perm_;  // new -> old
  LuFactors lu1_, lu2_;
};

// calA1 and calA2 assembled (N x N, natural order).
std::pair<SparseMatrix, SparseMatrix> assemble_fs_splitting(const MaxwellBlocks &blocks,
                                                            const PmlCoupling &coupling);

// Non-restarted right-preconditioned GMRES on I + gamma calA.
SolveResult solve_fs(const ExtendedOperator &op, const FsPreconditioner &fs,
                     std::span<const double> b, double tol, Index maxiter = 500);

//
// diag(I + gamma A + gamma^2 B1^T B2, I)^-1 with a dense factorization of the leading
// block; rejected when n exceeds max_n.
//
LinearOperator ideal_schur_preconditioner(const MaxwellBlocks &blocks,
                                          const PmlCoupling &coupling, double gamma,
                                          Index max_n = 4000);

}  // namespace mxs

#endif  // MXS_SOLVERS_HPP
