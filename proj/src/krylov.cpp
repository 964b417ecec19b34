// SPDX-License-Identifier: Apache-2.0

#include "mxs/krylov.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace mxs
{

namespace
{

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void check_sizes(const LinearOperator &A, const LinearOperator *M, std::span<const double> b,
                 const char *who)
{
  if (static_cast<Index>(b.size()) != A.dim || (M && M->dim != A.dim))
  {
    throw DimensionError(std::string(who) + ": operator and right-hand side sizes differ");
  }
}

double true_residual(const LinearOperator &A, std::span<const double> b,
                     std::span<const double> x, double bnorm, Vector &work)
{
  A.apply(x, work);
  for (std::size_t i = 0; i < work.size(); ++i)
  {
    work[i] = b[i] - work[i];
  }
  return norm2(work) / bnorm;
}

void scale(std::span<double> x, double a)
{
  for (auto &v : x)
  {
    v *= a;
  }
}

}  // namespace

LinearOperator LinearOperator::from_matrix(const SparseMatrix &A)
{
  if (A.nrows != A.ncols)
  {
    throw DimensionError("LinearOperator::from_matrix: matrix must be square");
  }
  return {A.nrows, [&A](std::span<const double> x, std::span<double> y) { spmv(A, x, y); }};
}

LinearOperator LinearOperator::identity(Index n)
{
  return {n, [](std::span<const double> x, std::span<double> y)
          { std::copy(x.begin(), x.end(), y.begin()); }};
}

Index SolveReport::max_inner() const
{
  return inner_iterations.empty()
           ? 0
           : *std::max_element(inner_iterations.begin(), inner_iterations.end());
}

Index SolveReport::total_inner() const
{
  return std::accumulate(inner_iterations.begin(), inner_iterations.end(), Index{0});
}

SolveResult gmres_restarted(const LinearOperator &A, const LinearOperator *Minv,
                            std::span<const double> b, Index restart,
                            const KrylovOptions &opts)
{
  check_sizes(A, Minv, b, "gmres");
  if (restart < 1)
  {
    throw std::invalid_argument("gmres: restart must be >= 1");
  }
  const auto t0 = Clock::now();
  const auto n = static_cast<std::size_t>(A.dim);
  SolveResult res;
  res.x.assign(n, 0.0);
  auto &rep = res.report;
  const double bnorm = norm2(b);
  if (bnorm == 0.0)
  {
    rep.converged = true;
    rep.wall_time = seconds_since(t0);
    return res;
  }

  const auto m = static_cast<std::size_t>(restart);
  // basis storage grows on demand so a large restart length costs nothing up front
  std::vector<Vector> V(1, Vector(n)), Z;
  std::vector<std::vector<double>> H;  // H[j] is column j
  std::vector<double> cs, sn, g;
  Vector r(b.begin(), b.end()), w(n);
  double rel = 1.0;

  while (true)
  {
    ++rep.cycles;
    const double beta = norm2(r);
    for (std::size_t i = 0; i < n; ++i)
    {
      V[0][i] = r[i] / beta;
    }
    g.assign(1, beta);
    std::size_t j = 0;
    bool recurrence_converged = false;
    for (; j < m; ++j)
    {
      if (Z.size() <= j)
      {
        Z.emplace_back(n);
        V.emplace_back(n);
        H.emplace_back();
        cs.push_back(0.0);
        sn.push_back(0.0);
      }
      H[j].assign(j + 2, 0.0);
      g.push_back(0.0);
      if (Minv)
      {
        Minv->apply(V[j], Z[j]);
        ++rep.preconditioner_applications;
      }
      else
      {
        Z[j] = V[j];
      }
      A.apply(Z[j], w);
      ++rep.matvecs;
      for (std::size_t i = 0; i <= j; ++i)
      {
        H[j][i] = dot(w, V[i]);
        axpy(-H[j][i], V[i], w);
      }
      const double hnext = norm2(w);
      H[j][j + 1] = hnext;
      if (hnext > 0.0)
      {
        for (std::size_t i = 0; i < n; ++i)
        {
          V[j + 1][i] = w[i] / hnext;
        }
      }
      for (std::size_t i = 0; i < j; ++i)
      {
        const double t = cs[i] * H[j][i] + sn[i] * H[j][i + 1];
        H[j][i + 1] = -sn[i] * H[j][i] + cs[i] * H[j][i + 1];
        H[j][i] = t;
      }
      const double denom = std::hypot(H[j][j], H[j][j + 1]);
      cs[j] = denom == 0.0 ? 1.0 : H[j][j] / denom;
      sn[j] = denom == 0.0 ? 0.0 : H[j][j + 1] / denom;
      H[j][j] = denom;
      H[j][j + 1] = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];
      ++rep.iterations;
      rel = std::abs(g[j + 1]) / bnorm;
      rep.residual_history.push_back(rel);
      const bool happy = hnext <= 1e-14 * beta;
      if (rel <= opts.tol || happy)
      {
        recurrence_converged = true;
        ++j;
        break;
      }
      if (rep.iterations >= opts.maxiter)
      {
        ++j;
        break;
      }
    }
    // y = R^-1 g, x += Z y
    std::vector<double> y(j);
    for (std::size_t i = j; i-- > 0;)
    {
      double s = g[i];
      for (std::size_t k = i + 1; k < j; ++k)
      {
        s -= H[k][i] * y[k];
      }
      y[i] = H[i][i] != 0.0 ? s / H[i][i] : 0.0;
    }
    for (std::size_t i = 0; i < j; ++i)
    {
      axpy(y[i], Z[i], res.x);
    }
    const double true_rel = true_residual(A, b, res.x, bnorm, r);
    ++rep.matvecs;
    rep.final_residual = true_rel;
    if (true_rel <= opts.tol || (recurrence_converged && true_rel <= opts.slack * opts.tol))
    {
      rep.converged = true;
      break;
    }
    if (rep.iterations >= opts.maxiter)
    {
      break;
    }
  }
  rep.wall_time = seconds_since(t0);
  return res;
}

SolveResult cg(const LinearOperator &A, const LinearOperator *Minv, std::span<const double> b,
               const KrylovOptions &opts)
{
  check_sizes(A, Minv, b, "cg");
  const auto t0 = Clock::now();
  const auto n = static_cast<std::size_t>(A.dim);
  SolveResult res;
  res.x.assign(n, 0.0);
  auto &rep = res.report;
  const double bnorm = norm2(b);
  if (bnorm == 0.0)
  {
    rep.converged = true;
    return res;
  }
  Vector r(b.begin(), b.end()), z(n), p(n), q(n);
  auto precondition = [&]
  {
    if (Minv)
    {
      Minv->apply(r, z);
      ++rep.preconditioner_applications;
    }
    else
    {
      z = r;
    }
  };
  precondition();
  p = z;
  double rz = dot(r, z);
  while (rep.iterations < opts.maxiter)
  {
    A.apply(p, q);
    ++rep.matvecs;
    const double pq = dot(p, q);
    if (!(pq > 0.0))
    {
      throw KrylovBreakdown("cg: breakdown, p^T A p <= 0 at iteration " +
                            std::to_string(rep.iterations + 1) +
                            " (operator not positive definite)");
    }
    const double alpha = rz / pq;
    axpy(alpha, p, res.x);
    axpy(-alpha, q, r);
    ++rep.iterations;
    const double rel = norm2(r) / bnorm;
    rep.residual_history.push_back(rel);
    if (rel <= opts.tol)
    {
      rep.converged = true;
      break;
    }
    precondition();
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i)
    {
      p[i] = z[i] + beta * p[i];
    }
  }
  rep.final_residual = true_residual(A, b, res.x, bnorm, q);
  ++rep.matvecs;
  if (rep.converged && rep.final_residual > opts.slack * opts.tol)
  {
    rep.converged = false;
  }
  rep.wall_time = seconds_since(t0);
  return res;
}

SolveResult bicgstab_l(const LinearOperator &A, const LinearOperator *Minv,
                       std::span<const double> b, const KrylovOptions &opts, int ell)
{
  check_sizes(A, Minv, b, "bicgstab");
  if (ell < 1)
  {
    throw std::invalid_argument("bicgstab: l must be >= 1");
  }
  const auto t0 = Clock::now();
  const auto n = static_cast<std::size_t>(A.dim);
  const auto L = static_cast<std::size_t>(ell);
  SolveResult res;
  auto &rep = res.report;
  const double bnorm = norm2(b);
  res.x.assign(n, 0.0);
  if (bnorm == 0.0)
  {
    rep.converged = true;
    return res;
  }

  Vector tmp(n);
  // Apply A M^-1.
  auto op = [&](std::span<const double> v, std::span<double> out)
  {
    if (Minv)
    {
      Minv->apply(v, tmp);
      ++rep.preconditioner_applications;
      A.apply(tmp, out);
    }
    else
    {
      A.apply(v, out);
    }
    ++rep.matvecs;
  };

  Vector y(n, 0.0);  // iterate in the preconditioned variable, x = M^-1 y
  std::vector<Vector> rh(L + 1, Vector(n, 0.0)), uh(L + 1, Vector(n, 0.0));
  rh[0].assign(b.begin(), b.end());
  Vector shadow = rh[0];
  double rho0 = 1.0, alpha = 0.0, omega = 1.0;
  bool restarted_shadow = false;
  std::vector<std::vector<double>> tau(L + 1, std::vector<double>(L + 1, 0.0));
  std::vector<double> sigma(L + 1), gp(L + 1), gm(L + 1), gpp(L + 1);

  auto recover_x = [&]
  {
    if (Minv)
    {
      Minv->apply(y, res.x);
      ++rep.preconditioner_applications;
    }
    else
    {
      res.x = y;
    }
  };

  double rel = 1.0;
  while (rep.iterations < opts.maxiter)
  {
    rho0 = -omega * rho0;
    bool breakdown = false;
    for (std::size_t j = 0; j < L; ++j)
    {
      const double rho1 = dot(rh[j], shadow);
      if (std::abs(rho1) < 1e-300 || rho0 == 0.0)
      {
        breakdown = true;
        break;
      }
      const double beta = alpha * rho1 / rho0;
      rho0 = rho1;
      for (std::size_t i = 0; i <= j; ++i)
      {
        for (std::size_t t = 0; t < n; ++t)
        {
          uh[i][t] = rh[i][t] - beta * uh[i][t];
        }
      }
      op(uh[j], uh[j + 1]);
      const double gam = dot(uh[j + 1], shadow);
      if (gam == 0.0)
      {
        breakdown = true;
        break;
      }
      alpha = rho0 / gam;
      for (std::size_t i = 0; i <= j; ++i)
      {
        axpy(-alpha, uh[i + 1], rh[i]);
      }
      op(rh[j], rh[j + 1]);
      axpy(alpha, uh[0], y);
      if (norm2(rh[0]) <= opts.tol * bnorm)
      {
        ++rep.iterations;
        rep.residual_history.push_back(norm2(rh[0]) / bnorm);
        breakdown = true;
        break;
      }
    }
    if (breakdown)
    {
      recover_x();
      const double true_rel = true_residual(A, b, res.x, bnorm, tmp);
      ++rep.matvecs;
      if (true_rel <= opts.tol)
      {
        rep.converged = true;
        rep.final_residual = true_rel;
        break;
      }
      if (restarted_shadow)
      {
        throw KrylovBreakdown("bicgstab: rho breakdown after shadow-vector restart");
      }
      restarted_shadow = true;
      rh[0] = tmp;
      shadow = rh[0];
      std::fill(uh[0].begin(), uh[0].end(), 0.0);
      rho0 = 1.0;
      alpha = 0.0;
      omega = 1.0;
      continue;
    }
    // minimal residual part (modified Gram-Schmidt)
    for (std::size_t j = 1; j <= L; ++j)
    {
      for (std::size_t i = 1; i < j; ++i)
      {
        tau[i][j] = dot(rh[j], rh[i]) / sigma[i];
        axpy(-tau[i][j], rh[i], rh[j]);
      }
      sigma[j] = dot(rh[j], rh[j]);
      gp[j] = sigma[j] != 0.0 ? dot(rh[0], rh[j]) / sigma[j] : 0.0;
    }
    gm[L] = gp[L];
    omega = gm[L];
    for (std::size_t j = L - 1; j >= 1; --j)
    {
      double s = gp[j];
      for (std::size_t i = j + 1; i <= L; ++i)
      {
        s -= tau[j][i] * gm[i];
      }
      gm[j] = s;
    }
    for (std::size_t j = 1; j < L; ++j)
    {
      double s = gm[j + 1];
      for (std::size_t i = j + 1; i < L; ++i)
      {
        s += tau[j][i] * gm[i + 1];
      }
      gpp[j] = s;
    }
    axpy(gm[1], rh[0], y);
    axpy(-gp[L], rh[L], rh[0]);
    axpy(-gm[L], uh[L], uh[0]);
    for (std::size_t j = 1; j < L; ++j)
    {
      axpy(-gm[j], uh[j], uh[0]);
      axpy(gpp[j], rh[j], y);
      axpy(-gp[j], rh[j], rh[0]);
    }
    ++rep.iterations;
    rel = norm2(rh[0]) / bnorm;
    rep.residual_history.push_back(rel);
    if (rel <= opts.tol)
    {
      recover_x();
      const double true_rel = true_residual(A, b, res.x, bnorm, tmp);
      ++rep.matvecs;
      if (true_rel <= opts.slack * opts.tol)
      {
        rep.converged = true;
        rep.final_residual = true_rel;
        break;
      }
      // residual replacement: continue from the true residual
      rh[0] = tmp;
    }
    if (omega == 0.0)
    {
      break;
    }
  }
  if (!rep.converged)
  {
    recover_x();
    rep.final_residual = true_residual(A, b, res.x, bnorm, tmp);
    ++rep.matvecs;
  }
  rep.wall_time = seconds_since(t0);
  return res;
}

ArnoldiResult arnoldi(const LinearOperator &A, const LinearOperator *Minv,
                      std::span<const double> b, Index k)
{
  check_sizes(A, Minv, b, "arnoldi");
  if (k < 1 || k > 64)
  {
    throw std::invalid_argument("arnoldi: need 1 <= k <= 64");
  }
  const auto n = static_cast<std::size_t>(A.dim);
  ArnoldiResult out;
  out.H = DenseMatrix(k + 1, k);
  const double bnorm = norm2(b);
  if (bnorm == 0.0)
  {
    throw std::invalid_argument("arnoldi: zero start vector");
  }
  out.V.emplace_back(b.begin(), b.end());
  scale(out.V[0], 1.0 / bnorm);
  Vector z(n), w(n);
  double hnorm = 0.0;
  for (Index j = 0; j < k; ++j)
  {
    if (Minv)
    {
      Minv->apply(out.V[j], z);
      A.apply(z, w);
    }
    else
    {
      A.apply(out.V[j], w);
    }
    for (int pass = 0; pass < 2; ++pass)
    {
      for (Index i = 0; i <= j; ++i)
      {
        const double hij = dot(w, out.V[i]);
        out.H(i, j) += hij;
        axpy(-hij, out.V[i], w);
      }
    }
    const double hnext = norm2(w);
    for (Index i = 0; i <= j; ++i)
    {
      hnorm = std::max(hnorm, std::abs(out.H(i, j)));
    }
    out.steps = j + 1;
    out.H(j + 1, j) = hnext;
    if (hnext <= 1e-12 * std::max(hnorm, 1e-300))
    {
      out.breakdown = true;
      break;
    }
    scale(w, 1.0 / hnext);
    out.V.push_back(w);
  }
  return out;
}

double RitzResult::imag_ratio() const
{
  double re = 0.0, im = 0.0;
  for (const auto &v : values)
  {
    re = std::max(re, std::abs(v.real()));
    im = std::max(im, std::abs(v.imag()));
  }
  return re > 0.0 ? im / re : (im > 0.0 ? INFINITY : 0.0);
}

RitzResult fom_ritz(const LinearOperator &A, const LinearOperator *Minv,
                    std::span<const double> b, Index k)
{
  const ArnoldiResult ar = arnoldi(A, Minv, b, k);
  DenseMatrix Hk(ar.steps, ar.steps);
  for (Index i = 0; i < ar.steps; ++i)
  {
    for (Index j = 0; j < ar.steps; ++j)
    {
      Hk(i, j) = ar.H(i, j);
    }
  }
  RitzResult r;
  r.values = hessenberg_eigenvalues(Hk);
  r.steps = ar.steps;
  r.breakdown = ar.breakdown;
  std::sort(r.values.begin(), r.values.end(), [](auto a, auto b)
            { return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag(); });
  return r;
}

}  // namespace mxs
