// SPDX-License-Identifier: Apache-2.0

#include "mxs/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

namespace mxs
{

namespace
{

void check(bool cond, const std::string &msg)
{
  if (!cond)
  {
    throw DimensionError(msg);
  }
}

}  // namespace

SparseMatrix::SparseMatrix(Index rows, Index cols)
  : nrows(rows), ncols(cols), row_offsets(static_cast<std::size_t>(rows) + 1, 0)
{
}

double SparseMatrix::coeff(Index i, Index j) const
{
  auto first = col_indices.begin() + row_offsets[i];
  auto last = col_indices.begin() + row_offsets[i + 1];
  auto it = std::lower_bound(first, last, j);
  if (it != last && *it == j)
  {
    return values[static_cast<std::size_t>(it - col_indices.begin())];
  }
  return 0.0;
}

void SparseMatrix::validate() const
{
  auto fail = [](const std::string &m) { throw std::logic_error("SparseMatrix: " + m); };
  if (static_cast<Index>(row_offsets.size()) != nrows + 1)
  {
    fail("row_offsets has wrong length");
  }
  if (row_offsets.front() != 0)
  {
    fail("row_offsets[0] != 0");
  }
  if (row_offsets.back() != nnz() || col_indices.size() != values.size())
  {
    fail("row_offsets[nrows] does not match stored entries");
  }
  for (Index i = 0; i < nrows; ++i)
  {
    if (row_offsets[i + 1] < row_offsets[i])
    {
      fail("row_offsets decreasing at row " + std::to_string(i));
    }
    for (Index p = row_offsets[i]; p < row_offsets[i + 1]; ++p)
    {
      if (col_indices[p] < 0 || col_indices[p] >= ncols)
      {
        fail("column out of range in row " + std::to_string(i));
      }
      if (p > row_offsets[i] && col_indices[p] <= col_indices[p - 1])
      {
        fail("columns not strictly increasing in row " + std::to_string(i));
      }
    }
  }
}

SparseMatrix SparseMatrix::identity(Index n)
{
  return diagonal(Vector(static_cast<std::size_t>(n), 1.0));
}

SparseMatrix SparseMatrix::diagonal(std::span<const double> d)
{
  const auto n = static_cast<Index>(d.size());
  SparseMatrix m(n, n);
  m.col_indices.resize(d.size());
  m.values.assign(d.begin(), d.end());
  for (Index i = 0; i < n; ++i)
  {
    m.row_offsets[i + 1] = i + 1;
    m.col_indices[i] = i;
  }
  return m;
}

SparseMatrix SparseMatrix::from_triplets(Index rows, Index cols, std::vector<Triplet> triplets)
{
  for (const auto &t : triplets)
  {
    check(t.row >= 0 && t.row < rows && t.col >= 0 && t.col < cols,
          "triplet index out of range");
  }
  std::sort(triplets.begin(), triplets.end(), [](const Triplet &a, const Triplet &b)
            { return a.row != b.row ? a.row < b.row : a.col < b.col; });
  SparseMatrix m(rows, cols);
  m.col_indices.reserve(triplets.size());
  m.values.reserve(triplets.size());
  for (std::size_t t = 0; t < triplets.size(); ++t)
  {
    const auto &e = triplets[t];
    if (t > 0 && triplets[t - 1].row == e.row && triplets[t - 1].col == e.col)
    {
      m.values.back() += e.value;
      continue;
    }
    m.col_indices.push_back(e.col);
    m.values.push_back(e.value);
    m.row_offsets[e.row + 1] = m.nnz();
  }
  for (Index i = 0; i < rows; ++i)
  {
    m.row_offsets[i + 1] = std::max(m.row_offsets[i + 1], m.row_offsets[i]);
  }
  return m;
}

RowBuilder::RowBuilder(Index rows, Index cols) : m_(rows, cols)
{
  m_.row_offsets.assign(1, 0);
  m_.row_offsets.reserve(static_cast<std::size_t>(rows) + 1);
}

void RowBuilder::push(Index col, double value)
{
  row_.emplace_back(col, value);
}

void RowBuilder::finish_row()
{
  std::sort(row_.begin(), row_.end(),
            [](const auto &a, const auto &b) { return a.first < b.first; });
  for (const auto &[c, v] : row_)
  {
    m_.col_indices.push_back(c);
    m_.values.push_back(v);
  }
  row_.clear();
  m_.row_offsets.push_back(m_.nnz());
}

SparseMatrix RowBuilder::build()
{
  check(static_cast<Index>(m_.row_offsets.size()) == m_.nrows + 1,
        "RowBuilder: number of finished rows does not match");
  return std::move(m_);
}

void spmv(const SparseMatrix &A, std::span<const double> x, std::span<double> y)
{
  check(static_cast<Index>(x.size()) == A.ncols, "spmv: x has wrong length");
  check(static_cast<Index>(y.size()) == A.nrows, "spmv: y has wrong length");
  const Index *off = A.row_offsets.data();
  const Index *col = A.col_indices.data();
  const double *val = A.values.data();
  for (Index i = 0; i < A.nrows; ++i)
  {
    double s = 0.0;
    for (Index p = off[i]; p < off[i + 1]; ++p)
    {
      s += val[p] * x[col[p]];
    }
    y[i] = s;
  }
}

Vector spmv(const SparseMatrix &A, std::span<const double> x)
{
  Vector y(static_cast<std::size_t>(A.nrows));
  spmv(A, x, y);
  return y;
}

void spmv_add(const SparseMatrix &A, std::span<const double> x, std::span<double> y,
              double alpha)
{
  check(static_cast<Index>(x.size()) == A.ncols, "spmv_add: x has wrong length");
  check(static_cast<Index>(y.size()) == A.nrows, "spmv_add: y has wrong length");
  for (Index i = 0; i < A.nrows; ++i)
  {
    double s = 0.0;
    for (Index p = A.row_offsets[i]; p < A.row_offsets[i + 1]; ++p)
    {
      s += A.values[p] * x[A.col_indices[p]];
    }
    y[i] += alpha * s;
  }
}

Vector spmv_transpose(const SparseMatrix &A, std::span<const double> x)
{
  check(static_cast<Index>(x.size()) == A.nrows, "spmv_transpose: x has wrong length");
  Vector y(static_cast<std::size_t>(A.ncols), 0.0);
  for (Index i = 0; i < A.nrows; ++i)
  {
    for (Index p = A.row_offsets[i]; p < A.row_offsets[i + 1]; ++p)
    {
      y[A.col_indices[p]] += A.values[p] * x[i];
    }
  }
  return y;
}

SparseMatrix transpose(const SparseMatrix &A)
{
  SparseMatrix t(A.ncols, A.nrows);
  t.col_indices.resize(A.col_indices.size());
  t.values.resize(A.values.size());
  for (Index c : A.col_indices)
  {
    ++t.row_offsets[c + 1];
  }
  std::partial_sum(t.row_offsets.begin(), t.row_offsets.end(), t.row_offsets.begin());
  std::vector<Index> next(t.row_offsets.begin(), t.row_offsets.end() - 1);
  for (Index i = 0; i < A.nrows; ++i)
  {
    for (Index p = A.row_offsets[i]; p < A.row_offsets[i + 1]; ++p)
    {
      const Index q = next[A.col_indices[p]]++;
      t.col_indices[q] = i;
      t.values[q] = A.values[p];
    }
  }
  return t;
}

SparseMatrix add(const SparseMatrix &A, const SparseMatrix &B, double alpha, double beta)
{
  check(A.nrows == B.nrows && A.ncols == B.ncols, "add: shape mismatch");
  SparseMatrix C(A.nrows, A.ncols);
  C.col_indices.reserve(A.col_indices.size() + B.col_indices.size());
  C.values.reserve(A.values.size() + B.values.size());
  for (Index i = 0; i < A.nrows; ++i)
  {
    Index p = A.row_offsets[i], pe = A.row_offsets[i + 1];
    Index q = B.row_offsets[i], qe = B.row_offsets[i + 1];
    while (p < pe || q < qe)
    {
      const Index ca = p < pe ? A.col_indices[p] : std::numeric_limits<Index>::max();
      const Index cb = q < qe ? B.col_indices[q] : std::numeric_limits<Index>::max();
      if (ca == cb)
      {
        C.col_indices.push_back(ca);
        C.values.push_back(alpha * A.values[p++] + beta * B.values[q++]);
      }
      else if (ca < cb)
      {
        C.col_indices.push_back(ca);
        C.values.push_back(alpha * A.values[p++]);
      }
      else
      {
        C.col_indices.push_back(cb);
        C.values.push_back(beta * B.values[q++]);
      }
    }
    C.row_offsets[i + 1] = C.nnz();
  }
  return C;
}

SparseMatrix multiply(const SparseMatrix &A, const SparseMatrix &B)
{
  check(A.ncols == B.nrows, "multiply: inner dimensions differ");
  SparseMatrix C(A.nrows, B.ncols);
  std::vector<Index> marker(static_cast<std::size_t>(B.ncols), -1);
  std::vector<double> acc(static_cast<std::size_t>(B.ncols), 0.0);
  std::vector<Index> cols;
  for (Index i = 0; i < A.nrows; ++i)
  {
    cols.clear();
    for (Index p = A.row_offsets[i]; p < A.row_offsets[i + 1]; ++p)
    {
      const Index k = A.col_indices[p];
      const double a = A.values[p];
      for (Index q = B.row_offsets[k]; q < B.row_offsets[k + 1]; ++q)
      {
        const Index j = B.col_indices[q];
        if (marker[j] != i)
        {
          marker[j] = i;
          acc[j] = 0.0;
          cols.push_back(j);
        }
        acc[j] += a * B.values[q];
      }
    }
    std::sort(cols.begin(), cols.end());
    for (Index j : cols)
    {
      C.col_indices.push_back(j);
      C.values.push_back(acc[j]);
    }
    C.row_offsets[i + 1] = C.nnz();
  }
  return C;
}

SparseMatrix scale_rows(std::span<const double> d, const SparseMatrix &A)
{
  check(static_cast<Index>(d.size()) == A.nrows, "scale_rows: length mismatch");
  SparseMatrix C = A;
  for (Index i = 0; i < A.nrows; ++i)
  {
    for (Index p = A.row_offsets[i]; p < A.row_offsets[i + 1]; ++p)
    {
      C.values[p] *= d[i];
    }
  }
  return C;
}

SparseMatrix scale_cols(const SparseMatrix &A, std::span<const double> d)
{
  check(static_cast<Index>(d.size()) == A.ncols, "scale_cols: length mismatch");
  SparseMatrix C = A;
  for (std::size_t p = 0; p < C.values.size(); ++p)
  {
    C.values[p] *= d[C.col_indices[p]];
  }
  return C;
}

SparseMatrix scaled(const SparseMatrix &A, double alpha)
{
  SparseMatrix C = A;
  for (auto &v : C.values)
  {
    v *= alpha;
  }
  return C;
}

SparseMatrix prune(const SparseMatrix &A, double tol)
{
  SparseMatrix C(A.nrows, A.ncols);
  for (Index i = 0; i < A.nrows; ++i)
  {
    for (Index p = A.row_offsets[i]; p < A.row_offsets[i + 1]; ++p)
    {
      if (std::abs(A.values[p]) > tol)
      {
        C.col_indices.push_back(A.col_indices[p]);
        C.values.push_back(A.values[p]);
      }
    }
    C.row_offsets[i + 1] = C.nnz();
  }
  return C;
}

SparseMatrix select_rows(const SparseMatrix &A, std::span<const Index> rows)
{
  SparseMatrix C(static_cast<Index>(rows.size()), A.ncols);
  for (std::size_t r = 0; r < rows.size(); ++r)
  {
    const Index i = rows[r];
    check(i >= 0 && i < A.nrows, "select_rows: index out of range");
    C.col_indices.insert(C.col_indices.end(), A.col_indices.begin() + A.row_offsets[i],
                         A.col_indices.begin() + A.row_offsets[i + 1]);
    C.values.insert(C.values.end(), A.values.begin() + A.row_offsets[i],
                    A.values.begin() + A.row_offsets[i + 1]);
    C.row_offsets[r + 1] = C.nnz();
  }
  return C;
}

SparseMatrix permute_symmetric(const SparseMatrix &A, std::span<const Index> new_to_old)
{
  check(A.nrows == A.ncols && static_cast<Index>(new_to_old.size()) == A.nrows,
        "permute_symmetric: needs a square matrix and a full permutation");
  std::vector<Index> old_to_new(new_to_old.size(), -1);
  for (std::size_t k = 0; k < new_to_old.size(); ++k)
  {
    old_to_new[new_to_old[k]] = static_cast<Index>(k);
  }
  RowBuilder rb(A.nrows, A.ncols);
  for (Index r = 0; r < A.nrows; ++r)
  {
    const Index i = new_to_old[r];
    for (Index p = A.row_offsets[i]; p < A.row_offsets[i + 1]; ++p)
    {
      rb.push(old_to_new[A.col_indices[p]], A.values[p]);
    }
    rb.finish_row();
  }
  return rb.build();
}

SparseMatrix block_matrix(const std::vector<std::vector<const SparseMatrix *>> &blocks,
                          std::span<const Index> row_sizes, std::span<const Index> col_sizes)
{
  check(blocks.size() == row_sizes.size(), "block_matrix: row block count mismatch");
  std::vector<Index> col_start(col_sizes.size() + 1, 0);
  std::partial_sum(col_sizes.begin(), col_sizes.end(), col_start.begin() + 1);
  const Index nrows = std::accumulate(row_sizes.begin(), row_sizes.end(), Index{0});
  SparseMatrix C(nrows, col_start.back());
  Index row = 0;
  for (std::size_t bi = 0; bi < blocks.size(); ++bi)
  {
    check(blocks[bi].size() == col_sizes.size(), "block_matrix: column block count mismatch");
    for (std::size_t bj = 0; bj < col_sizes.size(); ++bj)
    {
      if (const auto *b = blocks[bi][bj])
      {
        check(b->nrows == row_sizes[bi] && b->ncols == col_sizes[bj],
              "block_matrix: block shape mismatch");
      }
    }
    for (Index i = 0; i < row_sizes[bi]; ++i, ++row)
    {
      for (std::size_t bj = 0; bj < col_sizes.size(); ++bj)
      {
        const auto *b = blocks[bi][bj];
        if (!b)
        {
          continue;
        }
        for (Index p = b->row_offsets[i]; p < b->row_offsets[i + 1]; ++p)
        {
          C.col_indices.push_back(col_start[bj] + b->col_indices[p]);
          C.values.push_back(b->values[p]);
        }
      }
      C.row_offsets[row + 1] = C.nnz();
    }
  }
  return C;
}

double one_norm(const SparseMatrix &A)
{
  Vector colsum(static_cast<std::size_t>(A.ncols), 0.0);
  for (std::size_t p = 0; p < A.values.size(); ++p)
  {
    colsum[A.col_indices[p]] += std::abs(A.values[p]);
  }
  return colsum.empty() ? 0.0 : *std::max_element(colsum.begin(), colsum.end());
}

double max_abs(const SparseMatrix &A)
{
  double m = 0.0;
  for (double v : A.values)
  {
    m = std::max(m, std::abs(v));
  }
  return m;
}

SparseMatrix symmetric_part(const SparseMatrix &A)
{
  check(A.nrows == A.ncols, "symmetric_part: matrix must be square");
  return add(A, transpose(A), 0.5, 0.5);
}

SparseMatrix skew_part(const SparseMatrix &A)
{
  check(A.nrows == A.ncols, "skew_part: matrix must be square");
  return add(A, transpose(A), 0.5, -0.5);
}

double max_abs_diff(const SparseMatrix &A, const SparseMatrix &B)
{
  return max_abs(add(A, B, 1.0, -1.0));
}

void write_matrix_market(std::ostream &os, const SparseMatrix &A)
{
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << A.nrows << ' ' << A.ncols << ' ' << A.nnz() << '\n';
  os << std::setprecision(17);
  for (Index i = 0; i < A.nrows; ++i)
  {
    for (Index p = A.row_offsets[i]; p < A.row_offsets[i + 1]; ++p)
    {
      os << i + 1 << ' ' << A.col_indices[p] + 1 << ' ' << A.values[p] << '\n';
    }
  }
}

void write_matrix_market(const std::string &path, const SparseMatrix &A)
{
  std::ofstream os(path);
  if (!os)
  {
    throw std::runtime_error("cannot open " + path + " for writing");
  }
  write_matrix_market(os, A);
}

SparseMatrix read_matrix_market(std::istream &is)
{
  std::string line;
  if (!std::getline(is, line) || line.rfind("%%MatrixMarket", 0) != 0)
  {
    throw std::runtime_error("Matrix Market: missing banner");
  }
  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  auto lower = [](std::string s)
  {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
  };
  if (lower(object) != "matrix" || lower(format) != "coordinate")
  {
    throw std::runtime_error("Matrix Market: only coordinate matrices are supported");
  }
  field = lower(field);
  symmetry = lower(symmetry);
  if (field != "real" && field != "integer" && field != "pattern")
  {
    throw std::runtime_error("Matrix Market: unsupported field '" + field + "'");
  }
  if (symmetry != "general" && symmetry != "symmetric" && symmetry != "skew-symmetric")
  {
    throw std::runtime_error("Matrix Market: unsupported symmetry '" + symmetry + "'");
  }
  while (std::getline(is, line) && (line.empty() || line[0] == '%'))
  {
  }
  Index rows = 0, cols = 0, entries = 0;
  if (!(std::istringstream(line) >> rows >> cols >> entries))
  {
    throw std::runtime_error("Matrix Market: bad size line");
  }
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(entries));
  for (Index e = 0; e < entries; ++e)
  {
    Index i = 0, j = 0;
    double v = 1.0;
    if (!(is >> i >> j) || (field != "pattern" && !(is >> v)))
    {
      throw std::runtime_error("Matrix Market: truncated entry list");
    }
    t.push_back({i - 1, j - 1, v});
    if (symmetry != "general" && i != j)
    {
      t.push_back({j - 1, i - 1, symmetry == "symmetric" ? v : -v});
    }
  }
  return SparseMatrix::from_triplets(rows, cols, std::move(t));
}

SparseMatrix read_matrix_market(const std::string &path)
{
  std::ifstream is(path);
  if (!is)
  {
    throw std::runtime_error("cannot open " + path);
  }
  return read_matrix_market(is);
}

double dot(std::span<const double> x, std::span<const double> y)
{
  check(x.size() == y.size(), "dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
  {
    s += x[i] * y[i];
  }
  return s;
}

double norm2(std::span<const double> x)
{
  return std::sqrt(dot(x, x));
}

void axpy(double alpha, std::span<const double> x, std::span<double> y)
{
  check(x.size() == y.size(), "axpy: length mismatch");
  for (std::size_t i = 0; i < x.size(); ++i)
  {
    y[i] += alpha * x[i];
  }
}

}  // namespace mxs
