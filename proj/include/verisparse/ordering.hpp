#pragma once

#include <span>
#include <vector>

#include "verisparse/sparse_matrix.hpp"

namespace verisparse {

// Minimum-degree ordering of the graph of a square matrix with a symmetric
// pattern (values are ignored; the diagonal is ignored). Returns perm with
// perm[k] = vertex eliminated k-th.
//
// Ties are broken by the smaller original degree, then by the smaller index,
// so the result is deterministic.
std::vector<Index> fill_reducing_order(const SparseMatrix& pattern);

// Symmetrized pattern of A + A^T with the diagonal removed; values are 1.
SparseMatrix symmetric_pattern(const SparseMatrix& a);

// Elimination tree of the symmetric pattern permuted by perm
// (parent[k] == -1 for roots), indexed by position.
std::vector<Index> elimination_tree(const SparseMatrix& pattern, std::span<const Index> perm);

// Number of nonzeros strictly below the diagonal of the Cholesky factor of
// the permuted symmetric pattern, assuming no numerical cancellation.
Index symbolic_factor_nnz(const SparseMatrix& pattern, std::span<const Index> perm);

}  // namespace verisparse
