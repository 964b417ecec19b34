// SPDX-License-Identifier: Apache-2.0

#ifndef MXS_SPARSE_HPP
#define MXS_SPARSE_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mxs
{

using Index = std::int64_t;
using Vector = std::vector<double>;

class DimensionError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

struct Triplet
{
  Index row;
  Index col;
  double value;
};

//
// Compressed sparse row matrix. Column indices are strictly increasing within each
// row; explicitly stored zeros are allowed.
//
struct SparseMatrix
{
  Index nrows = 0;
  Index ncols = 0;
  std::vector<Index> row_offsets{0};
  std::vector<Index> col_indices;
  std::vector<double> values;

  SparseMatrix() = default;
  SparseMatrix(Index rows, Index cols);

  Index nnz() const { return static_cast<Index>(values.size()); }
  Index row_begin(Index i) const { return row_offsets[i]; }
  Index row_end(Index i) const { return row_offsets[i + 1]; }

  // Stored value at (i, j), zero if the entry is not stored.
  double coeff(Index i, Index j) const;

  // Throws std::logic_error naming the first violated CSR invariant.
  void validate() const;

  static SparseMatrix identity(Index n);
  static SparseMatrix diagonal(std::span<const double> d);

  // Duplicates are summed.
  static SparseMatrix from_triplets(Index rows, Index cols, std::vector<Triplet> triplets);
};

//
// Appends rows in order; used by the assembly routines so they never have to sort.
//
class RowBuilder
{
public:
  RowBuilder(Index rows, Index cols);

  // Entries of the current row, any order, no duplicates.
  void push(Index col, double value);
  void finish_row();
  SparseMatrix build();

private:
  SparseMatrix m_;
  std::vector<std::pair<Index, double>> row_;
};

struct DiagonalMatrix
{
  Vector diag;

  Index size() const { return static_cast<Index>(diag.size()); }
  SparseMatrix to_sparse() const { return SparseMatrix::diagonal(diag); }
};

void spmv(const SparseMatrix &A, std::span<const double> x, std::span<double> y);
Vector spmv(const SparseMatrix &A, std::span<const double> x);
// y += alpha * A x
void spmv_add(const SparseMatrix &A, std::span<const double> x, std::span<double> y,
              double alpha = 1.0);
// y = A^T x without forming the transpose
Vector spmv_transpose(const SparseMatrix &A, std::span<const double> x);

SparseMatrix transpose(const SparseMatrix &A);

// alpha*A + beta*B on the union pattern; entries cancelling to zero stay stored.
SparseMatrix add(const SparseMatrix &A, const SparseMatrix &B, double alpha = 1.0,
                 double beta = 1.0);
SparseMatrix multiply(const SparseMatrix &A, const SparseMatrix &B);
SparseMatrix scale_rows(std::span<const double> d, const SparseMatrix &A);
SparseMatrix scale_cols(const SparseMatrix &A, std::span<const double> d);
SparseMatrix scaled(const SparseMatrix &A, double alpha);
// Drops stored entries with |a_ij| <= tol.
SparseMatrix prune(const SparseMatrix &A, double tol = 0.0);
// Rows/columns selected by index lists, in list order.
SparseMatrix select_rows(const SparseMatrix &A, std::span<const Index> rows);
SparseMatrix permute_symmetric(const SparseMatrix &A, std::span<const Index> new_to_old);

// Block matrix from a grid of (possibly empty) blocks; empty blocks must have nrows=0
// or ncols=0 consistent with their grid row/column.
SparseMatrix block_matrix(const std::vector<std::vector<const SparseMatrix *>> &blocks,
                          std::span<const Index> row_sizes, std::span<const Index> col_sizes);

double one_norm(const SparseMatrix &A);
double max_abs(const SparseMatrix &A);
SparseMatrix symmetric_part(const SparseMatrix &A);
SparseMatrix skew_part(const SparseMatrix &A);

// Largest |a_ij - b_ij| over the union pattern.
double max_abs_diff(const SparseMatrix &A, const SparseMatrix &B);

// Matrix Market coordinate real general.
void write_matrix_market(std::ostream &os, const SparseMatrix &A);
void write_matrix_market(const std::string &path, const SparseMatrix &A);
SparseMatrix read_matrix_market(std::istream &is);
SparseMatrix read_matrix_market(const std::string &path);

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

}  // namespace mxs

#endif  // MXS_SPARSE_HPP
