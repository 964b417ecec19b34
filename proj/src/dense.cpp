// SPDX-License-Identifier: Apache-2.0

#include "mxs/dense.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>

namespace mxs
{

DenseMatrix DenseMatrix::from_sparse(const SparseMatrix &A)
{
  DenseMatrix D(A.nrows, A.ncols);
  for (Index i = 0; i < A.nrows; ++i)
  {
    for (Index p = A.row_offsets[i]; p < A.row_offsets[i + 1]; ++p)
    {
      D(i, A.col_indices[p]) += A.values[p];
    }
  }
  return D;
}

struct DenseLu::Impl
{
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
};

DenseLu::DenseLu(const DenseMatrix &A)
{
  if (A.rows != A.cols)
  {
    throw DimensionError("DenseLu: needs a square matrix");
  }
  if (A.rows > 20000)
  {
    throw DimensionError("DenseLu: n > 20000");
  }
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMajor> M(A.data.data(), A.rows, A.cols);
  impl_ = std::make_shared<Impl>(Impl{Eigen::PartialPivLU<Eigen::MatrixXd>(M)});
  const auto &U = impl_->lu.matrixLU();
  double umin = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < A.rows; ++i)
  {
    umin = std::min(umin, std::abs(U(i, i)));
  }
  if (A.rows > 0 && (umin == 0.0 || impl_->lu.rcond() < 1e2 * std::numeric_limits<double>::epsilon()))
  {
    throw SingularMatrix("DenseLu: matrix is singular to working precision");
  }
  n_ = A.rows;
}

Vector DenseLu::solve(std::span<const double> b) const
{
  if (static_cast<Index>(b.size()) != n_)
  {
    throw DimensionError("DenseLu::solve: right-hand side length mismatch");
  }
  Eigen::Map<const Eigen::VectorXd> rhs(b.data(), n_);
  Eigen::VectorXd x = impl_->lu.solve(rhs);
  return Vector(x.data(), x.data() + x.size());
}

Vector dense_solve(const DenseMatrix &A, std::span<const double> b)
{
  if (A.rows != A.cols || static_cast<Index>(b.size()) != A.rows)
  {
    throw DimensionError("dense_solve: needs a square matrix and matching right-hand side");
  }
  return DenseLu(A).solve(b);
}

namespace
{

using cplx = std::complex<double>;

struct Givens
{
  cplx c, s;
};

Givens make_givens(cplx a, cplx b)
{
  const double r = std::hypot(std::abs(a), std::abs(b));
  if (r == 0.0)
  {
    return {1.0, 0.0};
  }
  return {a / r, b / r};
}

// Eigenvalue of the trailing 2x2 block [[a, b], [c, d]] closest to d.
cplx wilkinson_shift(cplx a, cplx b, cplx c, cplx d)
{
  const cplx tr = a + d;
  const cplx det = a * d - b * c;
  const cplx disc = std::sqrt(tr * tr / 4.0 - det);
  const cplx l1 = tr / 2.0 + disc;
  const cplx l2 = tr / 2.0 - disc;
  return std::abs(l1 - d) < std::abs(l2 - d) ? l1 : l2;
}

}  // namespace

std::vector<std::complex<double>> hessenberg_eigenvalues(const DenseMatrix &Hin)
{
  if (Hin.rows != Hin.cols)
  {
    throw DimensionError("hessenberg_eigenvalues: matrix must be square");
  }
  const Index n = Hin.rows;
  if (n > 64)
  {
    throw DimensionError("hessenberg_eigenvalues: k > 64");
  }
  std::vector<cplx> h(static_cast<std::size_t>(n * n), 0.0);
  auto H = [&](Index i, Index j) -> cplx & { return h[static_cast<std::size_t>(i * n + j)]; };
  double hnorm = 0.0;
  for (Index i = 0; i < n; ++i)
  {
    for (Index j = std::max<Index>(0, i - 1); j < n; ++j)
    {
      H(i, j) = Hin(i, j);
      hnorm = std::max(hnorm, std::abs(Hin(i, j)));
    }
  }

  const double eps = std::numeric_limits<double>::epsilon();
  std::vector<cplx> eig;
  eig.reserve(static_cast<std::size_t>(n));
  Index hi = n - 1;
  int its = 0;
  int total = 0;
  const int max_total = 100 * static_cast<int>(std::max<Index>(n, 1));
  while (hi >= 0)
  {
    Index lo = hi;
    for (; lo > 0; --lo)
    {
      double scale = std::abs(H(lo, lo)) + std::abs(H(lo - 1, lo - 1));
      if (scale == 0.0)
      {
        scale = hnorm;
      }
      if (std::abs(H(lo, lo - 1)) <= eps * scale)
      {
        H(lo, lo - 1) = 0.0;
        break;
      }
    }
    if (lo == hi)
    {
      eig.push_back(H(hi, hi));
      --hi;
      its = 0;
      continue;
    }
    if (++total > max_total)
    {
      throw NoConvergence("hessenberg_eigenvalues: QR iteration did not converge");
    }
    ++its;

    cplx mu;
    if (its % 11 == 0)
    {
      // exceptional shift to break cycles
      mu = H(hi, hi) + 0.75 * std::abs(H(hi, hi - 1));
    }
    else
    {
      mu = wilkinson_shift(H(hi - 1, hi - 1), H(hi - 1, hi), H(hi, hi - 1), H(hi, hi));
    }

    for (Index i = lo; i <= hi; ++i)
    {
      H(i, i) -= mu;
    }
    std::vector<Givens> rot;
    rot.reserve(static_cast<std::size_t>(hi - lo));
    for (Index j = lo; j < hi; ++j)
    {
      const Givens g = make_givens(H(j, j), H(j + 1, j));
      rot.push_back(g);
      for (Index k = j; k <= hi; ++k)
      {
        const cplx a = H(j, k), b = H(j + 1, k);
        H(j, k) = std::conj(g.c) * a + std::conj(g.s) * b;
        H(j + 1, k) = -g.s * a + g.c * b;
      }
    }
    for (Index j = lo; j < hi; ++j)
    {
      const Givens &g = rot[static_cast<std::size_t>(j - lo)];
      for (Index k = lo; k <= std::min(j + 1, hi); ++k)
      {
        const cplx a = H(k, j), b = H(k, j + 1);
        H(k, j) = a * g.c + b * g.s;
        H(k, j + 1) = -a * std::conj(g.s) + b * std::conj(g.c);
      }
    }
    for (Index i = lo; i <= hi; ++i)
    {
      H(i, i) += mu;
    }
  }
  return eig;
}

}  // namespace mxs
