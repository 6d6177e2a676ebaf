#pragma once

#include <span>
#include <vector>

#include "verisparse/interval.hpp"
#include "verisparse/sparse_matrix.hpp"

namespace verisparse {

// Interval matrix sharing one CSC pattern for both endpoint arrays. Entries
// off the pattern are exactly [0, 0].
class IntervalSparseMatrix {
 public:
  IntervalSparseMatrix() = default;
  // Point matrix with the pattern and values of a.
  explicit IntervalSparseMatrix(const SparseMatrix& a);
  // Throws InvalidArgument if lo > hi anywhere or the pattern is malformed.
  IntervalSparseMatrix(Index rows, Index cols, std::vector<Index> col_ptr, std::vector<Index> row_idx,
                       std::vector<double> lo, std::vector<double> hi);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index nnz() const { return static_cast<Index>(lo_.size()); }

  std::span<const Index> col_ptr() const { return col_ptr_; }
  std::span<const Index> row_idx() const { return row_idx_; }
  std::span<const double> lo() const { return lo_; }
  std::span<const double> hi() const { return hi_; }

  Interval entry(Index p) const { return Interval(lo_[p], hi_[p]); }
  Interval coeff(Index i, Index j) const;

  // Midpoint matrix (round-to-nearest) with the same pattern.
  SparseMatrix mid() const;
  // Upper bounds on |member - mid()| entrywise, same pattern as mid().
  SparseMatrix rad() const;
  // Entrywise upper bound on |member|.
  SparseMatrix mag() const;
  IntervalSparseMatrix transpose() const;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Index> col_ptr_{0};
  std::vector<Index> row_idx_;
  std::vector<double> lo_;
  std::vector<double> hi_;
};

// Accuracy of interval matrix products.
//
// sharp accumulates every entry in interval arithmetic. fast evaluates the
// midpoint product in round-to-nearest and bounds its error a posteriori from
// an upward-rounded magnitude product, which is cheaper and wider. Both
// enclose the exact product.
enum class Accuracy { fast, sharp };

// Enclosure of {A B : A in a, B in b}. The result pattern is the structural
// product pattern. Throws DimensionMismatch.
IntervalSparseMatrix spgemm_interval(const IntervalSparseMatrix& a, const IntervalSparseMatrix& b,
                                     Accuracy accuracy = Accuracy::sharp);

// Enclosure of {A - B}; the result pattern is the union of both patterns.
IntervalSparseMatrix subtract(const IntervalSparseMatrix& a, const IntervalSparseMatrix& b);

enum class Norm { one, inf };

// Upper bound on max ||M||_1 or ||M||_inf over all members of m.
double norm_bound_1_inf(const IntervalSparseMatrix& m, Norm which);

// Upper bound on max ||M||_2 over all members, as sqrt(||M||_1 ||M||_inf)
// with every step rounded upward.
double spectral_norm_bound(const IntervalSparseMatrix& m);

}  // namespace verisparse
