// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>

#include "test_support.hpp"

using namespace mxs;

namespace
{

using cplx = std::complex<double>;

// Greedy matching distance between two eigenvalue sets.
double set_distance(std::vector<cplx> a, std::vector<cplx> b)
{
  double worst = 0.0;
  for (const auto &z : a)
  {
    auto it = std::min_element(b.begin(), b.end(), [&](cplx p, cplx q)
                               { return std::abs(p - z) < std::abs(q - z); });
    worst = std::max(worst, std::abs(*it - z));
    b.erase(it);
  }
  return worst;
}

}  // namespace

TEST_CASE("dense solve")
{
  DenseMatrix A(2, 2);
  A(0, 0) = 0.0;
  A(0, 1) = 2.0;
  A(1, 0) = 3.0;
  A(1, 1) = 1.0;
  const Vector x = dense_solve(A, Vector{4.0, 5.0});
  CHECK(x[0] == doctest::Approx(1.0));
  CHECK(x[1] == doctest::Approx(2.0));
  DenseMatrix S(2, 2);
  S(0, 0) = 1.0;
  S(0, 1) = 2.0;
  S(1, 0) = 2.0;
  S(1, 1) = 4.0;
  CHECK_THROWS_AS(dense_solve(S, Vector{1.0, 1.0}), SingularMatrix);
}

TEST_CASE("Hessenberg eigenvalues match the Eigen oracle")
{
  for (std::uint64_t seed = 1; seed <= 20; ++seed)
  {
    RngStream rng(seed);
    const Index k = 2 + static_cast<Index>(seed % 30);
    DenseMatrix H(k, k);
    Eigen::MatrixXd E = Eigen::MatrixXd::Zero(k, k);
    for (Index i = 0; i < k; ++i)
    {
      for (Index j = std::max<Index>(0, i - 1); j < k; ++j)
      {
        H(i, j) = rng.next_normal();
        E(i, j) = H(i, j);
      }
    }
    const auto mine = hessenberg_eigenvalues(H);
    Eigen::EigenSolver<Eigen::MatrixXd> es(E, false);
    std::vector<cplx> ref(es.eigenvalues().data(), es.eigenvalues().data() + k);
    REQUIRE(mine.size() == static_cast<std::size_t>(k));
    CHECK(set_distance(mine, ref) < 1e-9 * std::max(1.0, E.norm()));
  }
}

TEST_CASE("Hessenberg eigenvalues of a rotation block are a conjugate pair")
{
  DenseMatrix H(2, 2);
  H(0, 1) = -1.0;
  H(1, 0) = 1.0;
  auto ev = hessenberg_eigenvalues(H);
  std::sort(ev.begin(), ev.end(), [](cplx a, cplx b) { return a.imag() < b.imag(); });
  CHECK(std::abs(ev[0] - cplx(0.0, -1.0)) < 1e-14);
  CHECK(std::abs(ev[1] - cplx(0.0, 1.0)) < 1e-14);
}

TEST_CASE("Hessenberg size cap")
{
  CHECK_THROWS(hessenberg_eigenvalues(DenseMatrix(65, 65)));
}
