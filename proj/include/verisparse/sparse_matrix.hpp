#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace verisparse {

using Index = std::ptrdiff_t;

// A (row, col, value) entry used to assemble matrices.
struct Triplet {
  Index row;
  Index col;
  double value;
};

// Real matrix in compressed sparse column form.
//
// Row indices are strictly increasing within each column. Explicitly stored
// zeros are kept: they are part of the pattern.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  // Empty rows x cols matrix.
  SparseMatrix(Index rows, Index cols);
  // Takes ownership of CSC arrays. Throws InvalidArgument if they violate the
  // storage invariants.
  SparseMatrix(Index rows, Index cols, std::vector<Index> col_ptr, std::vector<Index> row_idx,
               std::vector<double> values);

  // Duplicate (row, col) entries are summed.
  static SparseMatrix from_triplets(Index rows, Index cols, std::span<const Triplet> triplets);
  static SparseMatrix identity(Index n);
  static SparseMatrix diagonal(std::span<const double> d);
  static SparseMatrix from_dense(Index rows, Index cols, std::span<const double> col_major,
                                 bool keep_zeros = false);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index nnz() const { return static_cast<Index>(values_.size()); }
  bool is_square() const { return rows_ == cols_; }

  std::span<const Index> col_ptr() const { return col_ptr_; }
  std::span<const Index> row_idx() const { return row_idx_; }
  std::span<const double> values() const { return values_; }

  // Entry (i, j), zero when outside the pattern. O(log nnz(column)).
  double coeff(Index i, Index j) const;
  // Position of (i, j) in values(), or -1.
  Index find(Index i, Index j) const;

  SparseMatrix transpose() const;
  // (P A Q)(i, j) = A(row_perm[i], col_perm[j]).
  SparseMatrix permute(std::span<const Index> row_perm, std::span<const Index> col_perm) const;
  // Bit-identical (i, j) and (j, i) entries, including the pattern.
  bool is_symmetric() const;
  // Dense column-major copy.
  std::vector<double> to_dense() const;

  friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Index> col_ptr_{0};
  std::vector<Index> row_idx_;
  std::vector<double> values_;
};

// Symmetric 2n x 2n matrix [[0, A^T], [A, 0]]. Throws for non-square A.
SparseMatrix augment(const SparseMatrix& a);

// S + shift * I on a square S; diagonal entries are added to the pattern.
SparseMatrix add_diagonal(const SparseMatrix& s, double shift);

// y = A x in round-to-nearest, accumulated in index order.
std::vector<double> spmv(const SparseMatrix& a, std::span<const double> x);
// y = A^T x in round-to-nearest.
std::vector<double> spmv_transpose(const SparseMatrix& a, std::span<const double> x);

// Inverse of a permutation vector.
std::vector<Index> invert_permutation(std::span<const Index> perm);
// True if perm is a permutation of 0..n-1.
bool is_permutation(std::span<const Index> perm, Index n);

// 64-bit FNV-1a hash over dimensions, pattern and value bits.
std::uint64_t content_hash(const SparseMatrix& a);

}  // namespace verisparse
