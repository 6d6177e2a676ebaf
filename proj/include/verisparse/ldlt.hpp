#pragma once

#include <span>
#include <vector>

#include "verisparse/sparse_matrix.hpp"

namespace verisparse {

// One diagonal block of D: the scalar [a] (size 1) or the symmetric
// [[a, b], [b, c]] (size 2), starting at row `first`.
struct DiagBlock {
  Index first = 0;
  int size = 1;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  static DiagBlock scalar(Index first, double d) { return {first, 1, d, 0.0, 0.0}; }
  static DiagBlock pair(Index first, double a, double b, double c) { return {first, 2, a, b, c}; }

  friend bool operator==(const DiagBlock&, const DiagBlock&) = default;
};

// Block-diagonal matrix with 1x1 and 2x2 blocks tiling 0..dim()-1 in order.
struct BlockDiag {
  std::vector<DiagBlock> blocks;

  Index dim() const;
  // Blocks are contiguous, start at 0 and have size 1 or 2.
  bool valid() const;
  // Entries (including both off-diagonal copies of every 2x2 block) as a
  // sparse matrix.
  SparseMatrix to_sparse() const;

  friend bool operator==(const BlockDiag&, const BlockDiag&) = default;
};

struct Inertia {
  Index positive = 0;
  Index negative = 0;
  Index zero = 0;

  friend bool operator==(const Inertia&, const Inertia&) = default;
};

// Exact eigenvalue sign counts of D. 2x2 blocks are classified by the exact
// sign of their determinant.
Inertia inertia(const BlockDiag& d);
Inertia block_inertia(const DiagBlock& block);

enum class Pivoting { bunch_kaufman, none };

// L D L^T ~= P S P^T with (P S P^T)(i, j) = S(perm[i], perm[j]).
struct LdltFactors {
  std::vector<Index> perm;
  SparseMatrix lower;  // unit lower triangular, diagonal ones stored
  BlockDiag d;

  Index dim() const { return static_cast<Index>(perm.size()); }
};

// Sparse symmetric indefinite factorization of a bit-symmetric S.
//
// `order` is the preferred elimination order (a fill-reducing ordering; empty
// means compute one). With Bunch-Kaufman pivoting the next vertex in `order`
// is the pivot candidate and may be paired with, or replaced by, its largest
// off-diagonal neighbor. The trailing matrix switches to dense storage once
// more than half of it is nonzero.
//
// Throws InvalidArgument for a non-symmetric S or a bad order, and
// FactorizationBreakdown when the pivot search finds only exact zeros or a
// factor entry overflows.
LdltFactors ldlt(const SparseMatrix& s, std::span<const Index> order = {},
                 Pivoting pivoting = Pivoting::bunch_kaufman);

// x with S x ~= rhs: x = P^T L^-T D^-1 L^-1 P rhs in round-to-nearest.
// Throws DivisionByZero for an exactly singular block of D.
std::vector<double> solve_ldlt(const LdltFactors& f, std::span<const double> rhs);

}  // namespace verisparse
