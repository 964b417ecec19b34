// SPDX-License-Identifier: Apache-2.0

#include "mxs/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace mxs
{

ProblemSpec reference_spec(std::array<Index, 3> cells)
{
  ProblemSpec spec;
  spec.cells = cells;
  for (int d = 0; d < 2; ++d)
  {
    const double h = spec.box[d] / static_cast<double>(cells[d]);
    const auto pml = std::max<Index>(1, std::llround(static_cast<double>(cells[d]) / 5.0));
    spec.pml_thickness[d] = static_cast<double>(pml) * h;
  }
  spec.pml_thickness[2] = 0.0;
  return spec;
}

namespace
{

MaterialFields materials_with_pml(const DofMap &dofs, const ProblemSpec &spec,
                                  const SigmaProfiles &profiles)
{
  MaterialFields m = sample_materials(dofs, spec.scene);
  add_pml_conductivity(dofs, profiles, m);
  return m;
}

}  // namespace

Problem::Problem(const ProblemSpec &spec)
    : grid(build_grid(spec.cells, spec.box, spec.pml_thickness, spec.pec_z)),
      dofs(grid),
      profiles(build_sigma_profiles(dofs, spec.pml)),
      materials(materials_with_pml(dofs, spec, profiles)),
      blocks(assemble_blocks(dofs, materials)),
      coupling(assemble_coupling(profiles, blocks))
{
}

std::unique_ptr<Problem> build_problem(const ProblemSpec &spec)
{
  return std::make_unique<Problem>(spec);
}

SchurMatrices build_schur_matrices(const MaxwellBlocks &blocks, double gamma)
{
  const Index n1 = blocks.n1();
  SchurMatrices s;
  s.gamma = gamma;
  s.eps = blocks.M_eps.diag;
  s.h_shift_inv.resize(static_cast<std::size_t>(n1));
  Vector mid(static_cast<std::size_t>(n1));
  for (Index i = 0; i < n1; ++i)
  {
    s.h_shift_inv[i] = 1.0 / (1.0 + gamma * blocks.M1[i]);
    mid[i] = gamma * gamma / (blocks.M_mu.diag[i] + gamma * blocks.M_sigma1.diag[i]);
  }
  const SparseMatrix KtDK = multiply(blocks.Kt, scale_rows(mid, blocks.K));
  Vector d(static_cast<std::size_t>(n1));
  for (Index i = 0; i < n1; ++i)
  {
    d[i] = blocks.M_eps.diag[i] + gamma * blocks.M_sigma2.diag[i];
  }
  s.S_bracket = add(SparseMatrix::diagonal(d), KtDK);
  return s;
}

Vector apply_e_schur(const MaxwellBlocks &blocks, double gamma, std::span<const double> x)
{
  const Index n1 = blocks.n1();
  Vector t = spmv(blocks.K1, x);
  for (Index i = 0; i < n1; ++i)
  {
    t[i] /= 1.0 + gamma * blocks.M1[i];
  }
  Vector y = spmv(blocks.K2t, t);
  for (Index i = 0; i < n1; ++i)
  {
    y[i] = x[i] + gamma * blocks.M2[i] * x[i] + gamma * gamma * y[i];
  }
  return y;
}

MiddleSolver::MiddleSolver(const MaxwellBlocks &blocks, double gamma, const MiddleOptions &opts)
    : blocks_(&blocks), opts_(opts), schur_(build_schur_matrices(blocks, gamma))
{
  if (opts_.mode == MiddleOptions::Mode::Lu)
  {
    lu_ = sparse_lu(blocks.assemble_shifted(gamma));
  }
  else
  {
    ic_ = ic0(schur_.S_bracket);
  }
}

Index MiddleSolver::solve(std::span<const double> c, std::span<double> x) const
{
  const Index n1 = blocks_->n1();
  if (static_cast<Index>(c.size()) != 2 * n1 || static_cast<Index>(x.size()) != 2 * n1)
  {
    throw DimensionError("MiddleSolver::solve: length mismatch");
  }
  if (schur_.gamma == 0.0)
  {
    std::copy(c.begin(), c.end(), x.begin());
    return 0;
  }
  if (lu_)
  {
    std::copy(c.begin(), c.end(), x.begin());
    lu_->solve_in_place(x);
    return 0;
  }
  const double gamma = schur_.gamma;
  auto ch = c.subspan(0, n1), ce = c.subspan(n1);
  auto xh = x.subspan(0, n1), xe = x.subspan(n1);

  Vector t(static_cast<std::size_t>(n1));
  for (Index i = 0; i < n1; ++i)
  {
    t[i] = schur_.h_shift_inv[i] * ch[i] / blocks_->M_mu.diag[i];
  }
  // r = M_eps c_e + gamma K^T (M_mu + gamma M_s1)^-1 c_h
  Vector r = spmv(blocks_->Kt, t);
  for (Index i = 0; i < n1; ++i)
  {
    r[i] = schur_.eps[i] * ce[i] + gamma * r[i];
  }
  Index inner = 0;
  if (norm2(r) > 0.0)
  {
    const LinearOperator S = LinearOperator::from_matrix(schur_.S_bracket);
    const IC0Factor &ic = *ic_;
    const LinearOperator P{n1, [&ic](std::span<const double> v, std::span<double> out)
                           {
                             std::copy(v.begin(), v.end(), out.begin());
                             ic.solve_in_place(out);
                           }};
    KrylovOptions ko;
    ko.tol = opts_.inner_tol;
    ko.maxiter = opts_.inner_maxiter;
    SolveResult res = cg(S, &P, r, ko);
    if (!res.report.converged)
    {
      throw InnerSolveFailure("middle solve: inner CG did not converge", res.report);
    }
    std::copy(res.x.begin(), res.x.end(), xe.begin());
    inner = res.report.iterations;
  }
  else
  {
    std::fill(xe.begin(), xe.end(), 0.0);
  }
  // x_h = (I + gamma M1)^-1 (c_h - gamma K1 x_e)
  Vector k1xe = spmv(blocks_->K1, xe);
  for (Index i = 0; i < n1; ++i)
  {
    xh[i] = schur_.h_shift_inv[i] * (ch[i] - gamma * k1xe[i]);
  }
  return inner;
}

Vector MiddleSolver::solve(std::span<const double> c) const
{
  Vector x(c.size());
  solve(c, x);
  return x;
}

LinearOperator MiddleSolver::as_operator(std::vector<Index> *inner_sink) const
{
  return {blocks_->n(), [this, inner_sink](std::span<const double> c, std::span<double> x)
          {
            const Index it = solve(c, x);
            if (inner_sink)
            {
              inner_sink->push_back(it);
            }
          }};
}

NestedSchurSolver::NestedSchurSolver(const MaxwellBlocks &blocks, const PmlCoupling &coupling,
                                     const NestedOptions &opts)
    : blocks_(&blocks), coupling_(&coupling), opts_(opts),
      middle_(blocks, opts.gamma, opts.middle)
{
  if (coupling.n() != blocks.n() && coupling.m() > 0)
  {
    throw DimensionError("NestedSchurSolver: coupling and blocks disagree on n");
  }
}

void NestedSchurSolver::apply_outer(std::span<const double> x, std::span<double> y) const
{
  const double g = opts_.gamma;
  blocks_->apply_A(x, y);
  for (std::size_t i = 0; i < y.size(); ++i)
  {
    y[i] = x[i] + g * y[i];
  }
  if (coupling_->m() > 0)
  {
    apply_b1t_b2(*blocks_, *coupling_, x, y, g * g);
  }
}

LinearOperator NestedSchurSolver::outer_operator() const
{
  return {n(), [this](std::span<const double> x, std::span<double> y) { apply_outer(x, y); }};
}

SparseMatrix NestedSchurSolver::assemble_outer() const
{
  const double g = opts_.gamma;
  SparseMatrix T = blocks_->assemble_shifted(g);
  if (coupling_->m() > 0)
  {
    T = add(T, b1t_b2_formula(*blocks_, *coupling_), 1.0, g * g);
  }
  return T;
}

SolveResult NestedSchurSolver::solve_outer(std::span<const double> b1) const
{
  std::vector<Index> inner;
  const LinearOperator T = outer_operator();
  const LinearOperator P = middle_.as_operator(&inner);
  KrylovOptions ko;
  ko.tol = opts_.tol;
  ko.maxiter = opts_.maxiter;
  SolveResult res = gmres_restarted(T, &P, b1, opts_.restart, ko);
  res.report.inner_iterations = std::move(inner);
  return res;
}

SolveResult NestedSchurSolver::solve(std::span<const double> b) const
{
  const auto t0 = std::chrono::steady_clock::now();
  const Index nn = n(), mm = m();
  if (static_cast<Index>(b.size()) != nn + mm)
  {
    throw DimensionError("NestedSchurSolver::solve: right-hand side has wrong length");
  }
  const double g = opts_.gamma;
  auto b1 = b.subspan(0, static_cast<std::size_t>(nn));
  auto b2 = b.subspan(static_cast<std::size_t>(nn));
  Vector rhs(b1.begin(), b1.end());
  if (mm > 0)
  {
    spmv_add(transpose(coupling_->B1), b2, rhs, -g);
  }
  SolveResult outer = solve_outer(rhs);

  SolveResult res;
  res.report = std::move(outer.report);
  res.x.resize(b.size());
  std::copy(outer.x.begin(), outer.x.end(), res.x.begin());
  if (mm > 0)
  {
    std::span<double> x2(res.x.data() + nn, static_cast<std::size_t>(mm));
    std::copy(b2.begin(), b2.end(), x2.begin());
    spmv_add(coupling_->B2, outer.x, x2, g);
  }
  // true residual of the full system
  Vector r(b.size());
  if (mm > 0)
  {
    ExtendedOperator(*blocks_, *coupling_).apply_shifted(g, res.x, r);
  }
  else
  {
    apply_outer(res.x, r);
  }
  for (std::size_t i = 0; i < r.size(); ++i)
  {
    r[i] = b[i] - r[i];
  }
  const double bn = norm2(b);
  res.report.final_residual = bn > 0.0 ? norm2(r) / bn : norm2(r);
  res.report.wall_time =
    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

std::pair<SparseMatrix, SparseMatrix> assemble_fs_splitting(const MaxwellBlocks &blocks,
                                                            const PmlCoupling &coupling)
{
  const Index n1 = blocks.n1(), n2 = blocks.n2(), m = coupling.m();
  const SparseMatrix M1 = SparseMatrix::diagonal(blocks.M1);
  const SparseMatrix M2 = SparseMatrix::diagonal(blocks.M2);
  const SparseMatrix mK2t = scaled(blocks.K2t, -1.0);
  const std::array<Index, 2> half{n1, n2};
  const SparseMatrix A1 = block_matrix({{&M1, &blocks.K1}, {nullptr, nullptr}}, half, half);
  const SparseMatrix A2 = block_matrix({{nullptr, nullptr}, {&mK2t, &M2}}, half, half);
  const SparseMatrix B1Ht = transpose(coupling.B1H), B1Et = transpose(coupling.B1E);
  const SparseMatrix mB2H = scaled(coupling.B2H, -1.0), mB2E = scaled(coupling.B2E, -1.0);
  const std::array<Index, 2> sizes{n1 + n2, m};
  return {block_matrix({{&A1, &B1Ht}, {&mB2H, nullptr}}, sizes, sizes),
          block_matrix({{&A2, &B1Et}, {&mB2E, nullptr}}, sizes, sizes)};
}

FsPreconditioner::FsPreconditioner(const MaxwellBlocks &blocks, const PmlCoupling &coupling,
                                   double gamma, const FsOptions &opts)
    : gamma_(gamma), opts_(opts)
{
  auto [A1, A2] = assemble_fs_splitting(blocks, coupling);
  const Index N = A1.nrows;
  const SparseMatrix I = SparseMatrix::identity(N);
  F1_ = add(I, A1, 1.0, gamma);
  F2_ = add(I, A2, 1.0, gamma);
  perm_.resize(static_cast<std::size_t>(N));
  const Index n = blocks.n(), m = coupling.m();
  if (opts_.ordering == FsOptions::Ordering::AuxFirst)
  {
    std::iota(perm_.begin(), perm_.begin() + m, n);
    std::iota(perm_.begin() + m, perm_.end(), Index{0});
    lu1_ = sparse_lu(permute_symmetric(F1_, perm_));
    lu2_ = sparse_lu(permute_symmetric(F2_, perm_));
  }
  else
  {
    std::iota(perm_.begin(), perm_.end(), Index{0});
    lu1_ = sparse_lu(F1_);
    lu2_ = sparse_lu(F2_);
  }
}

void FsPreconditioner::apply(std::span<const double> v, std::span<double> y) const
{
  const std::size_t N = perm_.size();
  if (v.size() != N || y.size() != N)
  {
    throw DimensionError("FsPreconditioner::apply: length mismatch");
  }
  Vector w(N);
  for (std::size_t i = 0; i < N; ++i)
  {
    w[i] = v[perm_[i]];
  }
  lu1_.solve_in_place(w);
  lu2_.solve_in_place(w);
  for (std::size_t i = 0; i < N; ++i)
  {
    y[perm_[i]] = w[i];
  }
}

LinearOperator FsPreconditioner::as_operator() const
{
  return {size(), [this](std::span<const double> v, std::span<double> y) { apply(v, y); }};
}

SolveResult solve_fs(const ExtendedOperator &op, const FsPreconditioner &fs,
                     std::span<const double> b, double tol, Index maxiter)
{
  const double g = fs.gamma();
  const LinearOperator A{op.size(), [&op, g](std::span<const double> x, std::span<double> y)
                         { op.apply_shifted(g, x, y); }};
  const LinearOperator P = fs.as_operator();
  KrylovOptions ko;
  ko.tol = tol;
  ko.maxiter = maxiter;
  return gmres_restarted(A, &P, b, maxiter, ko);
}

LinearOperator ideal_schur_preconditioner(const MaxwellBlocks &blocks,
                                          const PmlCoupling &coupling, double gamma,
                                          Index max_n)
{
  const Index n = blocks.n(), m = coupling.m();
  if (n > max_n)
  {
    throw DimensionError("ideal_schur_preconditioner: n = " + std::to_string(n) +
                         " exceeds the dense cap " + std::to_string(max_n));
  }
  SparseMatrix S = blocks.assemble_shifted(gamma);
  if (m > 0)
  {
    S = add(S, b1t_b2_formula(blocks, coupling), 1.0, gamma * gamma);
  }
  auto lu = std::make_shared<DenseLu>(DenseMatrix::from_sparse(S));
  return {n + m, [lu, n](std::span<const double> v, std::span<double> y)
          {
            const Vector top = lu->solve(v.subspan(0, static_cast<std::size_t>(n)));
            std::copy(top.begin(), top.end(), y.begin());
            std::copy(v.begin() + n, v.end(), y.begin() + n);
          }};
}

}  // namespace mxs
