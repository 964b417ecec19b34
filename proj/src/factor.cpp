// SPDX-License-Identifier: Apache-2.0

#include "mxs/factor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>

namespace mxs
{

LuFactors sparse_lu(const SparseMatrix &A)
{
  if (A.nrows != A.ncols)
  {
    throw DimensionError("sparse_lu: matrix must be square");
  }
  const Index n = A.nrows;
  LuFactors f;
  f.L = SparseMatrix(n, n);
  f.U = SparseMatrix(n, n);
  f.L.row_offsets.assign(1, 0);
  f.U.row_offsets.assign(1, 0);
  f.L.col_indices.reserve(A.col_indices.size() / 2 + 1);
  f.L.values.reserve(A.col_indices.size() / 2 + 1);
  f.U.col_indices.reserve(A.col_indices.size() / 2 + static_cast<std::size_t>(n));
  f.U.values.reserve(A.col_indices.size() / 2 + static_cast<std::size_t>(n));

  Vector w(static_cast<std::size_t>(n), 0.0);
  std::vector<Index> marker(static_cast<std::size_t>(n), -1);
  std::vector<Index> pattern;
  std::priority_queue<Index, std::vector<Index>, std::greater<>> lower;

  for (Index i = 0; i < n; ++i)
  {
    pattern.clear();
    double row_max = 0.0;
    for (Index p = A.row_offsets[i]; p < A.row_offsets[i + 1]; ++p)
    {
      const Index j = A.col_indices[p];
      marker[j] = i;
      w[j] = A.values[p];
      pattern.push_back(j);
      row_max = std::max(row_max, std::abs(A.values[p]));
      if (j < i)
      {
        lower.push(j);
      }
    }
    while (!lower.empty())
    {
      const Index k = lower.top();
      lower.pop();
      const Index ustart = f.U.row_offsets[k];
      const double l = w[k] / f.U.values[ustart];
      f.L.col_indices.push_back(k);
      f.L.values.push_back(l);
      for (Index q = ustart + 1; q < f.U.row_offsets[k + 1]; ++q)
      {
        const Index j = f.U.col_indices[q];
        if (marker[j] != i)
        {
          marker[j] = i;
          w[j] = 0.0;
          pattern.push_back(j);
          if (j < i)
          {
            lower.push(j);
          }
        }
        w[j] -= l * f.U.values[q];
      }
    }
    f.L.row_offsets.push_back(f.L.nnz());

    std::sort(pattern.begin(), pattern.end());
    auto first_upper = std::lower_bound(pattern.begin(), pattern.end(), i);
    if (first_upper == pattern.end() || *first_upper != i ||
        std::abs(w[i]) < 1e-14 * row_max || row_max == 0.0)
    {
      throw FactorizationBreakdown("sparse_lu: zero pivot in row " + std::to_string(i), i);
    }
    for (auto it = first_upper; it != pattern.end(); ++it)
    {
      f.U.col_indices.push_back(*it);
      f.U.values.push_back(w[*it]);
    }
    f.U.row_offsets.push_back(f.U.nnz());
  }
  f.fill_ratio = A.nnz() > 0 ? static_cast<double>(f.L.nnz() + f.U.nnz()) /
                                   static_cast<double>(A.nnz())
                             : 1.0;
  return f;
}

void LuFactors::solve_in_place(std::span<double> x) const
{
  if (static_cast<Index>(x.size()) != size())
  {
    throw DimensionError("LuFactors::solve: length mismatch");
  }
  const Index n = size();
  for (Index i = 0; i < n; ++i)
  {
    double s = x[i];
    for (Index p = L.row_offsets[i]; p < L.row_offsets[i + 1]; ++p)
    {
      s -= L.values[p] * x[L.col_indices[p]];
    }
    x[i] = s;
  }
  for (Index i = n - 1; i >= 0; --i)
  {
    const Index d = U.row_offsets[i];
    double s = x[i];
    for (Index p = d + 1; p < U.row_offsets[i + 1]; ++p)
    {
      s -= U.values[p] * x[U.col_indices[p]];
    }
    x[i] = s / U.values[d];
  }
}

Vector LuFactors::solve(std::span<const double> b) const
{
  Vector x(b.begin(), b.end());
  solve_in_place(x);
  return x;
}

namespace
{

// Returns false on a nonpositive pivot.
bool try_ic0(const SparseMatrix &A, double beta, SparseMatrix &L)
{
  const Index n = A.nrows;
  L = SparseMatrix(n, n);
  L.row_offsets.assign(1, 0);
  Vector w(static_cast<std::size_t>(n), 0.0);
  for (Index i = 0; i < n; ++i)
  {
    const Index row_start = L.nnz();
    double diag = 0.0;
    bool has_diag = false;
    for (Index p = A.row_offsets[i]; p < A.row_offsets[i + 1]; ++p)
    {
      const Index k = A.col_indices[p];
      if (k > i)
      {
        break;
      }
      if (k == i)
      {
        diag = A.values[p] * (1.0 + beta);
        has_diag = true;
        break;
      }
      // L_ik = (a_ik - sum_{j<k} L_ij L_kj) / L_kk; w holds row i of L so far.
      double s = A.values[p];
      const Index kend = L.row_offsets[k + 1] - 1;  // diagonal of row k is last
      for (Index q = L.row_offsets[k]; q < kend; ++q)
      {
        s -= w[L.col_indices[q]] * L.values[q];
      }
      const double lik = s / L.values[kend];
      w[k] = lik;
      L.col_indices.push_back(k);
      L.values.push_back(lik);
    }
    double d = diag;
    for (Index q = row_start; q < L.nnz(); ++q)
    {
      d -= L.values[q] * L.values[q];
    }
    for (Index q = row_start; q < L.nnz(); ++q)
    {
      w[L.col_indices[q]] = 0.0;
    }
    if (!has_diag || !(d > 0.0))
    {
      return false;
    }
    L.col_indices.push_back(i);
    L.values.push_back(std::sqrt(d));
    L.row_offsets.push_back(L.nnz());
  }
  return true;
}

}  // namespace

IC0Factor ic0(const SparseMatrix &A)
{
  if (A.nrows != A.ncols)
  {
    throw DimensionError("ic0: matrix must be square");
  }
  IC0Factor f;
  double beta = 0.0;
  while (!try_ic0(A, beta, f.L))
  {
    if (beta >= 1.0)
    {
      throw FactorizationBreakdown("ic0: nonpositive pivot persists with diagonal shift 1",
                                   -1);
    }
    beta = beta == 0.0 ? 1e-3 : std::min(2.0 * beta, 1.0);
  }
  f.shift = beta;
  f.Lt = transpose(f.L);
  return f;
}

void IC0Factor::solve_in_place(std::span<double> x) const
{
  if (static_cast<Index>(x.size()) != size())
  {
    throw DimensionError("IC0Factor::solve: length mismatch");
  }
  const Index n = size();
  for (Index i = 0; i < n; ++i)
  {
    const Index d = L.row_offsets[i + 1] - 1;
    double s = x[i];
    for (Index p = L.row_offsets[i]; p < d; ++p)
    {
      s -= L.values[p] * x[L.col_indices[p]];
    }
    x[i] = s / L.values[d];
  }
  for (Index i = n - 1; i >= 0; --i)
  {
    const Index d = Lt.row_offsets[i];
    double s = x[i];
    for (Index p = d + 1; p < Lt.row_offsets[i + 1]; ++p)
    {
      s -= Lt.values[p] * x[Lt.col_indices[p]];
    }
    x[i] = s / Lt.values[d];
  }
}

Vector IC0Factor::solve(std::span<const double> b) const
{
  Vector x(b.begin(), b.end());
  solve_in_place(x);
  return x;
}

}  // namespace mxs
