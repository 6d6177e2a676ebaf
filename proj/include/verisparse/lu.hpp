#pragma once

#include <span>
#include <vector>

#include "verisparse/sparse_matrix.hpp"

namespace verisparse {

// P A Q = L U with (P A Q)(i, j) = A(row_perm[i], col_perm[j]); L is unit
// lower triangular (diagonal stored), U upper triangular. Unverified.
struct LuFactors {
  std::vector<Index> row_perm;
  std::vector<Index> col_perm;
  SparseMatrix lower;
  SparseMatrix upper;

  Index dim() const { return static_cast<Index>(row_perm.size()); }
};

// Left-looking sparse LU with partial pivoting (largest magnitude, ties to
// the smaller row). Columns are taken in `col_order`, by default a
// minimum-degree order of the pattern of A + A^T.
//
// Throws FactorizationBreakdown when a column has no nonzero pivot
// candidate, or when a factor entry is not finite.
LuFactors lu(const SparseMatrix& a, std::span<const Index> col_order = {});

// x with A x ~= b.
std::vector<double> lu_solve(const LuFactors& f, std::span<const double> b);
// x with A^T x ~= b.
std::vector<double> lu_solve_transpose(const LuFactors& f, std::span<const double> b);

}  // namespace verisparse
