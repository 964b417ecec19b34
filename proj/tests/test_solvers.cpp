// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>

#include "test_support.hpp"

using namespace mxs;
using mxs::test::rel_diff;

namespace
{

Vector shifted_apply(const MaxwellBlocks &B, double gamma, std::span<const double> x)
{
  Vector y(x.size());
  B.apply_A(x, y);
  for (std::size_t i = 0; i < y.size(); ++i)
  {
    y[i] = x[i] + gamma * y[i];
  }
  return y;
}

// Random vector supported on non-void slots only.
Vector live_vector(const DofMap &dofs, Index n, std::uint64_t seed)
{
  RngStream rng(seed);
  Vector v = rng.normal_vector(n);
  for (Index i = 0; i < std::min(n, dofs.n()); ++i)
  {
    if (dofs.is_void(i))
    {
      v[i] = 0.0;
    }
  }
  return v;
}

}  // namespace

TEST_CASE("reference spec PML thickness")
{
  CHECK(reference_spec({20, 20, 12}).pml_thickness[0] == doctest::Approx(1.0));
  CHECK(reference_spec({6, 6, 4}).pml_thickness[0] == doctest::Approx(5.0 / 6.0));
  CHECK(reference_spec({10, 10, 6}).pml_thickness[2] == 0.0);
}

TEST_CASE("middle solve without loss matches the dense block system")
{
  const auto problem = build_problem(mxs::test::vacuum_spec({4, 4, 4}));
  const MaxwellBlocks &B = problem->blocks;
  const double gamma = 0.3;
  const MiddleSolver ms(B, gamma);
  const Vector c = live_vector(problem->dofs, B.n(), 51);
  const Vector x = ms.solve(c);
  const SparseMatrix S = B.assemble_shifted(gamma);
  // [[I, gK], [-gK^T, I]] with void rows made identity so the dense oracle is regular
  const SparseMatrix Id = SparseMatrix::identity(B.n());
  const Vector xd = dense_solve(DenseMatrix::from_sparse(S), c);
  CHECK(rel_diff(x, xd) < 1e-9);
  CHECK(max_abs_diff(S, add(Id, B.assemble_A(), 1.0, gamma)) == 0.0);
}

TEST_CASE("middle solve at gamma = 0 is the identity")
{
  const auto problem = build_problem(reference_spec({6, 6, 4}));
  const MiddleSolver ms(problem->blocks, 0.0);
  const Vector c = live_vector(problem->dofs, problem->n(), 52);
  CHECK(ms.solve(c) == c);
}

TEST_CASE("middle solve residual and LU cross-check on 10x10x6")
{
  const auto problem = build_problem(reference_spec({10, 10, 6}));
  const MaxwellBlocks &B = problem->blocks;
  const MiddleSolver ms(B, 0.012);
  const Vector c = live_vector(problem->dofs, B.n(), 53);
  Vector x(c.size());
  const Index inner = ms.solve(c, x);
  CHECK(inner > 0);
  CHECK(rel_diff(shifted_apply(B, 0.012, x), c) <= 1e-9);

  MiddleOptions lu;
  lu.mode = MiddleOptions::Mode::Lu;
  const MiddleSolver ml(B, 0.012, lu);
  Vector y(c.size());
  CHECK(ml.solve(c, y) == 0);
  CHECK(rel_diff(x, y) < 1e-9);

  Vector e(static_cast<std::size_t>(B.n2()));
  std::copy(c.begin() + B.n1(), c.end(), e.begin());
  const Vector se = apply_e_schur(B, 0.012, e);
  CHECK(se.size() == e.size());
}

TEST_CASE("nested solve with m = 0 reduces to the middle solve")
{
  const auto problem = build_problem(mxs::test::vacuum_spec({6, 6, 4}));
  REQUIRE(problem->m() == 0);
  const NestedSchurSolver solver(problem->blocks, problem->coupling);
  const Vector b = live_vector(problem->dofs, problem->N(), 54);
  const SolveResult r = solver.solve(b);
  CHECK(r.report.converged);
  CHECK(r.report.final_residual <= 1e-9);
  CHECK(r.report.iterations <= 1);
}

TEST_CASE("nested solve recovers a known solution on 6x6x4")
{
  const auto problem = build_problem(reference_spec({6, 6, 4}));
  const double gamma = 0.012;
  const ExactRhs rhs = make_exact_rhs(*problem, gamma, 55);
  NestedOptions opts;
  opts.tol = 1e-12;
  const NestedSchurSolver solver(problem->blocks, problem->coupling, opts);
  const SolveResult r = solver.solve(rhs.b);
  REQUIRE(r.report.converged);
  CHECK(rel_diff(r.x, rhs.x_star) < 1e-8);

  const SparseMatrix S = assemble_shifted_extended(problem->blocks, problem->coupling, gamma);
  const Vector xd = dense_solve(DenseMatrix::from_sparse(S), rhs.b);
  CHECK(rel_diff(r.x, xd) < 1e-8);
}

TEST_CASE("outer operator: matrix-free, assembled and block formula agree")
{
  const auto problem = build_problem(reference_spec({6, 6, 4}));
  const double gamma = 0.012;
  const NestedSchurSolver solver(problem->blocks, problem->coupling);
  RngStream rng(56);
  const Vector x = rng.normal_vector(problem->n());
  Vector y(x.size());
  solver.apply_outer(x, y);
  const SparseMatrix O = solver.assemble_outer();
  CHECK(rel_diff(y, spmv(O, x)) < 1e-14);
  const SparseMatrix ref =
    add(problem->blocks.assemble_shifted(gamma),
        multiply(transpose(problem->coupling.B1), problem->coupling.B2), 1.0, gamma * gamma);
  CHECK(max_abs_diff(O, ref) <= 1e-14 * max_abs(ref));
}

TEST_CASE("block elimination is consistent with the full system")
{
  const auto problem = build_problem(reference_spec({6, 6, 4}));
  const double gamma = 0.012;
  const Index n = problem->n(), m = problem->m();
  const NestedSchurSolver solver(problem->blocks, problem->coupling);
  const Vector b = live_vector(problem->dofs, n + m, 57);
  const SolveResult r = solver.solve(b);
  REQUIRE(r.report.converged);
  // x2 = b2 + gamma B2 x1
  const Vector x1(r.x.begin(), r.x.begin() + n);
  const Vector bx = spmv(problem->coupling.B2, x1);
  for (Index i = 0; i < m; ++i)
  {
    REQUIRE(r.x[n + i] == doctest::Approx(b[n + i] + gamma * bx[i]).epsilon(1e-12));
  }
  Vector out(b.size());
  problem->extended().apply_shifted(gamma, r.x, out);
  CHECK(rel_diff(out, b) <= 1e-9);
  CHECK(r.report.inner_iterations.size() > 0);
}

TEST_CASE("field splitting sums to the full operator")
{
  const auto problem = build_problem(reference_spec({10, 10, 6}));
  const auto [A1, A2] = assemble_fs_splitting(problem->blocks, problem->coupling);
  const SparseMatrix A = problem->extended().assemble();
  CHECK(max_abs_diff(add(A1, A2), A) <= 1e-15 * max_abs(A));
}

TEST_CASE("field splitting product differs from I + gamma calA by gamma^2 calA1 calA2")
{
  const auto problem = build_problem(reference_spec({6, 6, 4}));
  const double gamma = 0.012;
  const FsPreconditioner fs(problem->blocks, problem->coupling, gamma);
  const auto [A1, A2] = assemble_fs_splitting(problem->blocks, problem->coupling);
  const SparseMatrix P = multiply(fs.factor1(), fs.factor2());
  const SparseMatrix S = assemble_shifted_extended(problem->blocks, problem->coupling, gamma);
  const SparseMatrix D = add(P, S, 1.0, -1.0);
  CHECK(max_abs_diff(D, scaled(multiply(A1, A2), gamma * gamma)) <= 1e-13 * max_abs(P));
}

TEST_CASE("field splitting preconditioner is the identity without loss at gamma = 0")
{
  const auto problem = build_problem(mxs::test::vacuum_spec({4, 4, 4}));
  const FsPreconditioner fs(problem->blocks, problem->coupling, 0.0);
  RngStream rng(58);
  const Vector v = rng.normal_vector(fs.size());
  Vector y(v.size());
  fs.apply(v, y);
  CHECK(y == v);
}

TEST_CASE("field splitting inverts its own product")
{
  for (auto ordering : {FsOptions::Ordering::Natural, FsOptions::Ordering::AuxFirst})
  {
    const auto problem = build_problem(reference_spec({6, 6, 4}));
    FsOptions opts;
    opts.ordering = ordering;
    const FsPreconditioner fs(problem->blocks, problem->coupling, 0.012, opts);
    RngStream rng(59);
    const Vector v = rng.normal_vector(fs.size());
    Vector y(v.size());
    fs.apply(v, y);
    const Vector back = spmv(fs.factor1(), spmv(fs.factor2(), y));
    CHECK(rel_diff(back, v) < 1e-12);
    if (ordering == FsOptions::Ordering::AuxFirst)
    {
      CHECK(fs.fill_ratio1() == 1.0);
      CHECK(fs.fill_ratio2() == 1.0);
    }
  }
}

TEST_CASE("FS-preconditioned GMRES matches the dense oracle")
{
  const auto problem = build_problem(reference_spec({6, 6, 4}));
  const double gamma = 0.012;
  const ExactRhs rhs = make_exact_rhs(*problem, gamma, 60);
  const FsPreconditioner fs(problem->blocks, problem->coupling, gamma);
  const SolveResult r = solve_fs(problem->extended(), fs, rhs.b, 1e-12);
  REQUIRE(r.report.converged);
  const SparseMatrix S = assemble_shifted_extended(problem->blocks, problem->coupling, gamma);
  CHECK(rel_diff(r.x, dense_solve(DenseMatrix::from_sparse(S), rhs.b)) < 1e-8);
}

TEST_CASE("ideal Schur preconditioner")
{
  const auto problem = build_problem(reference_spec({4, 4, 4}));
  const ExtendedOperator op = problem->extended();
  const Index N = op.size();
  RngStream rng(61);
  const Vector b = rng.normal_vector(N);

  SUBCASE("gamma = 0 converges in one step")
  {
    const LinearOperator A = LinearOperator::identity(N);
    const LinearOperator M = ideal_schur_preconditioner(problem->blocks, problem->coupling, 0.0);
    const SolveResult r = gmres_restarted(A, &M, b, 10, {});
    CHECK(r.report.converged);
    CHECK(r.report.iterations == 1);
  }

  SUBCASE("preconditioned GMRES needs no more steps")
  {
    const double gamma = 0.012;
    const LinearOperator A{N, [&](std::span<const double> x, std::span<double> y)
                           { op.apply_shifted(gamma, x, y); }};
    const LinearOperator M = ideal_schur_preconditioner(problem->blocks, problem->coupling, gamma);
    KrylovOptions o;
    o.tol = 1e-10;
    const SolveResult p = gmres_restarted(A, &M, b, 50, o);
    const SolveResult u = gmres_restarted(A, nullptr, b, 50, o);
    CHECK(p.report.converged);
    CHECK(p.report.iterations <= u.report.iterations);
  }

  CHECK_THROWS(ideal_schur_preconditioner(problem->blocks, problem->coupling, 0.012, 10));
}

TEST_CASE("inner failure is reported with its solve report")
{
  const auto problem = build_problem(reference_spec({6, 6, 4}));
  MiddleOptions mo;
  mo.inner_maxiter = 1;
  mo.inner_tol = 1e-14;
  const MiddleSolver ms(problem->blocks, 0.5, mo);
  const Vector c = live_vector(problem->dofs, problem->n(), 62);
  try
  {
    (void)ms.solve(c);
    FAIL("expected an inner failure");
  }
  catch (const InnerSolveFailure &e)
  {
    CHECK_FALSE(e.report.converged);
    CHECK(e.report.iterations == 1);
  }
}
