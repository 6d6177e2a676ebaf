#pragma once

#include <span>
#include <utility>
#include <vector>

#include "verisparse/sparse_matrix.hpp"

namespace verisparse {

// Row permutation and power-of-two scalings with
//   scaled = diag(row_scale) * P * A * diag(col_scale),
// where (P A)(k, :) = A(row_perm[k], :). Every scaling is a nonzero finite
// power of two, so forming the scaled matrix involves no rounding.
struct Equilibration {
  std::vector<Index> row_perm;
  std::vector<double> row_scale;
  std::vector<double> col_scale;

  Index size() const { return static_cast<Index>(row_perm.size()); }
  double max_row_scale() const;
  double max_col_scale() const;

  friend bool operator==(const Equilibration&, const Equilibration&) = default;
};

// sign(s) * 2^z with z the integer nearest to log2|s|. Throws
// InvalidArgument for zero or non-finite s.
double pow2_round(double s);

// True when |x| is an exact (normal or subnormal) power of two.
bool is_power_of_two(double x);

// Permutes large entries onto the diagonal (maximum-product matching) and
// scales so that, before power-of-two rounding, the diagonal has unit
// magnitude and no entry exceeds one in magnitude. Returns the transformation
// and the exactly representable scaled matrix.
//
// Throws StructurallySingular when the nonzero pattern has no perfect
// matching, and InvalidArgument when a scaled entry would underflow or
// overflow (the product would then not be exact).
std::pair<Equilibration, SparseMatrix> equilibrate(const SparseMatrix& a);

// diag(row_scale) * P * A * diag(col_scale). Throws InvalidArgument if any
// product is inexact or the transformation does not fit a.
SparseMatrix apply_equilibration(const Equilibration& eq, const SparseMatrix& a);

// Lower bound on sigma_min(A) from a lower bound on sigma_min of the scaled
// matrix: delta_scaled / (max|r| * max|c|), rounded downward.
double sigma_back_propagate(double delta_scaled, const Equilibration& eq);

// Maps a right-hand side into scaled coordinates: diag(row_scale) * P * b.
std::vector<double> scale_rhs(const Equilibration& eq, std::span<const double> b);

}  // namespace verisparse
