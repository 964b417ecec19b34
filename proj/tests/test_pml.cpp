// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "test_support.hpp"

using namespace mxs;
using mxs::test::rel_diff;

TEST_CASE("graded profile values")
{
  CHECK(sigma_profile(0.0, 5.0, 1.0, 30.0, 2) == doctest::Approx(30.0));
  CHECK(sigma_profile(5.0, 5.0, 1.0, 30.0, 2) == doctest::Approx(30.0));
  CHECK(sigma_profile(1.0, 5.0, 1.0, 30.0, 2) == 0.0);
  CHECK(sigma_profile(2.5, 5.0, 1.0, 30.0, 2) == 0.0);
  CHECK(sigma_profile(0.5, 5.0, 1.0, 30.0, 2) == doctest::Approx(7.5));
  CHECK(sigma_profile(0.5, 5.0, 0.0, 30.0, 2) == 0.0);
}

TEST_CASE("reflection rule for sigma_max")
{
  const YeeGrid g = build_grid({10, 10, 6}, {5.0, 5.0, 3.0}, {1.0, 1.0, 0.0});
  PmlParams p;
  CHECK(p.resolved_sigma_max(g, 0) == doctest::Approx(-3.0 * std::log(1e-8) / 2.0));
  CHECK(p.resolved_sigma_max(g, 2) == 0.0);
  p.multiplier = 2.0;
  CHECK(p.resolved_sigma_max(g, 1) == doctest::Approx(-3.0 * std::log(1e-8)));
  p.sigma_max = {4.0, -1.0, -1.0};
  CHECK(p.resolved_sigma_max(g, 0) == 4.0);
  p.sigma_max = {-1.0, -1.0, -2.0};
  p.multiplier = -1.0;
  CHECK_THROWS(build_sigma_profiles(DofMap(g), p));
}

TEST_CASE("profiles vanish in the interior and peak at the wall")
{
  const DofMap dofs(build_grid({10, 10, 6}, {5.0, 5.0, 3.0}, {1.0, 1.0, 0.0}));
  const SigmaProfiles s = build_sigma_profiles(dofs, PmlParams{});
  const Index p = dofs.points_per_component();
  // Ey (i, j+1/2, k) at i = 0 lies on the outer x wall
  const Index wall = p + dofs.lattice(0, 3, 2);
  CHECK(s.at_e[0][wall] == doctest::Approx(s.sigma_max[0]));
  const Index half = p + dofs.lattice(1, 3, 2);
  CHECK(s.at_e[0][half] == doctest::Approx(s.sigma_max[0] / 4.0));
  const Index interface = p + dofs.lattice(2, 3, 2);
  CHECK(s.at_e[0][interface] == 0.0);
  for (double v : s.at_h[2])
  {
    REQUIRE(v == 0.0);
  }
}

TEST_CASE("no PML means no auxiliary variables")
{
  const auto problem = build_problem(mxs::test::vacuum_spec({6, 6, 4}));
  CHECK(problem->m() == 0);
  CHECK(problem->coupling.B1.nrows == 0);
  const NormPair np = skew_symmetric_diagnostics(problem->coupling, 0.012);
  CHECK(np.symmetric == 0.0);
  CHECK(np.skew == 0.0);
  const ExtendedOperator op = problem->extended();
  RngStream rng(21);
  const Vector y = rng.normal_vector(problem->n());
  Vector Ay(y.size());
  problem->blocks.apply_A(y, Ay);
  CHECK(rel_diff(op.apply(y), Ay) == 0.0);
}

TEST_CASE("zero field vector maps to zero")
{
  const auto problem = build_problem(reference_spec({6, 6, 4}));
  const Vector y(static_cast<std::size_t>(problem->N()), 0.0);
  CHECK(norm2(problem->extended().apply(y)) == 0.0);
}

TEST_CASE("auxiliary count on the 20x20x12 reference problem")
{
  const auto problem = build_problem(reference_spec({20, 20, 12}));
  CHECK(std::abs(static_cast<double>(problem->m()) - 11167.0) <= 0.05 * 11167.0);
}

TEST_CASE("B1^T B2 product equals the block formula")
{
  for (std::array<Index, 3> cells : {std::array<Index, 3>{6, 6, 4}, std::array<Index, 3>{10, 10, 6}})
  {
    const auto problem = build_problem(reference_spec(cells));
    const PmlCoupling &c = problem->coupling;
    const SparseMatrix P = multiply(transpose(c.B1), c.B2);
    const SparseMatrix F = b1t_b2_formula(problem->blocks, c);
    CHECK(max_abs_diff(P, F) <= 1e-14 * max_abs(F));

    RngStream rng(22);
    const Vector x = rng.normal_vector(problem->n());
    Vector y(x.size(), 0.0);
    apply_b1t_b2(problem->blocks, c, x, y, 1.0);
    CHECK(rel_diff(y, spmv(F, x)) < 1e-14);
  }
}

TEST_CASE("trim and untrim round trip")
{
  const auto problem = build_problem(reference_spec({6, 6, 4}));
  const PmlCoupling &c = problem->coupling;
  const Index raw = 4 * c.n1();
  for (const SparseMatrix *B : {&c.B1, &c.B2})
  {
    const SparseMatrix U = untrim(*B, c.kept, raw);
    CHECK(U.nrows == raw);
    CHECK(max_abs_diff(select_rows(U, c.kept), *B) == 0.0);
  }
  // every kept slot has B2 dynamics, every dropped slot has none
  const SparseMatrix U2 = untrim(c.B2, c.kept, raw);
  std::vector<char> kept(static_cast<std::size_t>(raw), 0);
  for (Index s : c.kept)
  {
    kept[s] = 1;
  }
  for (Index r = 0; r < raw; ++r)
  {
    bool nonzero = false;
    for (Index q = U2.row_begin(r); q < U2.row_end(r); ++q)
    {
      nonzero = nonzero || U2.values[q] != 0.0;
    }
    REQUIRE(nonzero == static_cast<bool>(kept[r]));
  }
}

TEST_CASE("H/E split partitions B1 and B2")
{
  const auto problem = build_problem(reference_spec({10, 10, 6}));
  const PmlCoupling &c = problem->coupling;
  CHECK(max_abs_diff(add(c.B1H, c.B1E), c.B1) == 0.0);
  CHECK(max_abs_diff(add(c.B2H, c.B2E), c.B2) == 0.0);
  CHECK(prune(add(add(c.B1H, c.B1E), c.B1, 1.0, -1.0)).nnz() == 0);
}

TEST_CASE("extended matvec agrees with the assembled operator")
{
  const auto problem = build_problem(reference_spec({10, 10, 6}));
  const ExtendedOperator op = problem->extended();
  const SparseMatrix A = op.assemble();
  RngStream rng(23);
  const Vector y = rng.normal_vector(op.size());
  CHECK(rel_diff(op.apply(y), spmv(A, y)) < 1e-14);

  Vector z(y.size());
  op.apply_shifted(0.012, y, z);
  const SparseMatrix S = assemble_shifted_extended(problem->blocks, problem->coupling, 0.012);
  CHECK(rel_diff(z, spmv(S, y)) < 1e-14);
}

TEST_CASE("Sigma* blocks are mesh independent, coupling blocks scale as 1/h")
{
  // a flat profile makes every sampled sigma inside the layer equal
  const auto flat = [](std::array<Index, 3> cells)
  {
    ProblemSpec spec = reference_spec(cells);
    spec.pml.order = 0;
    spec.pml.sigma_max = {3.0, 3.0, -1.0};
    return build_problem(spec);
  };
  const auto coarse = flat({10, 10, 6});
  const auto fine = flat({20, 20, 12});
  const auto star = [](const Problem &p) { return one_norm(p.coupling.sigma_star_e.to_sparse()); };
  CHECK(star(*coarse) == 9.0);
  CHECK(star(*fine) == 9.0);
  const auto off = [](const Problem &p)
  { return one_norm(multiply(p.blocks.K1, p.coupling.sigma_e.to_sparse())); };
  CHECK(off(*fine) / off(*coarse) == doctest::Approx(2.0).epsilon(1e-12));
}
