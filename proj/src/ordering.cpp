#include "verisparse/ordering.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "verisparse/error.hpp"

namespace verisparse {

SparseMatrix symmetric_pattern(const SparseMatrix& a) {
  if (!a.is_square()) throw InvalidArgument("symmetric_pattern: matrix is not square");
  std::vector<Triplet> t;
  t.reserve(2 * a.nnz());
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index p = a.col_ptr()[j]; p < a.col_ptr()[j + 1]; ++p) {
      const Index i = a.row_idx()[p];
      if (i == j) continue;
      t.push_back({i, j, 1.0});
      t.push_back({j, i, 1.0});
    }
  }
  SparseMatrix summed = SparseMatrix::from_triplets(a.rows(), a.cols(), t);
  std::vector<double> ones(summed.nnz(), 1.0);
  return SparseMatrix(summed.rows(), summed.cols(), {summed.col_ptr().begin(), summed.col_ptr().end()},
                      {summed.row_idx().begin(), summed.row_idx().end()}, std::move(ones));
}

std::vector<Index> fill_reducing_order(const SparseMatrix& pattern) {
  if (!pattern.is_square()) throw InvalidArgument("fill_reducing_order: matrix is not square");
  const SparseMatrix g = symmetric_pattern(pattern);
  const Index n = g.rows();

  // Elimination graph as sorted adjacency lists.
  std::vector<std::vector<Index>> adj(n);
  for (Index j = 0; j < n; ++j) adj[j].assign(g.row_idx().begin() + g.col_ptr()[j], g.row_idx().begin() + g.col_ptr()[j + 1]);
  std::vector<Index> initial_degree(n);
  for (Index v = 0; v < n; ++v) initial_degree[v] = static_cast<Index>(adj[v].size());

  using Key = std::tuple<Index, Index, Index>;  // degree, initial degree, vertex
  std::set<Key> queue;
  for (Index v = 0; v < n; ++v) queue.emplace(initial_degree[v], initial_degree[v], v);

  std::vector<Index> perm;
  perm.reserve(n);
  std::vector<char> eliminated(n, 0);
  std::vector<Index> merged;
  std::vector<Index> others;
  while (!queue.empty()) {
    const auto [degree, init, v] = *queue.begin();
    const auto remaining = static_cast<Index>(queue.size());
    if (degree == remaining - 1) {
      // The rest is a clique; every order yields the same fill.
      for (const auto& key : queue) perm.push_back(std::get<2>(key));
      break;
    }
    queue.erase(queue.begin());
    perm.push_back(v);
    eliminated[v] = 1;
    const std::vector<Index> nbrs = std::move(adj[v]);
    adj[v].clear();
    for (const Index u : nbrs) {
      queue.erase({static_cast<Index>(adj[u].size()), initial_degree[u], u});
      // adj[u] <- (adj[u] u nbrs) \ {u, v}
      others.clear();
      for (const Index w : nbrs) {
        if (w != u) others.push_back(w);
      }
      merged.clear();
      std::set_union(adj[u].begin(), adj[u].end(), others.begin(), others.end(), std::back_inserter(merged));
      merged.erase(std::remove(merged.begin(), merged.end(), v), merged.end());
      adj[u].swap(merged);
      queue.emplace(static_cast<Index>(adj[u].size()), initial_degree[u], u);
    }
  }
  return perm;
}

std::vector<Index> elimination_tree(const SparseMatrix& pattern, std::span<const Index> perm) {
  const Index n = pattern.rows();
  if (!pattern.is_square() || !is_permutation(perm, n)) throw InvalidArgument("elimination_tree: bad input");
  const SparseMatrix g = symmetric_pattern(pattern);
  const auto pos = invert_permutation(perm);
  std::vector<Index> parent(n, -1);
  std::vector<Index> ancestor(n, -1);
  for (Index k = 0; k < n; ++k) {
    const Index v = perm[k];
    for (Index p = g.col_ptr()[v]; p < g.col_ptr()[v + 1]; ++p) {
      Index i = pos[g.row_idx()[p]];
      // Walk from i towards the root, compressing the path to k.
      while (i != -1 && i < k) {
        const Index next = ancestor[i];
        ancestor[i] = k;
        if (next == -1) {
          parent[i] = k;
          break;
        }
        i = next;
      }
    }
  }
  return parent;
}

Index symbolic_factor_nnz(const SparseMatrix& pattern, std::span<const Index> perm) {
  const Index n = pattern.rows();
  const auto parent = elimination_tree(pattern, perm);
  const SparseMatrix g = symmetric_pattern(pattern);
  const auto pos = invert_permutation(perm);
  // Row k of L is the union of the tree paths from each i < k adjacent to k
  // up to k.
  std::vector<Index> mark(n, -1);
  Index count = 0;
  for (Index k = 0; k < n; ++k) {
    mark[k] = k;
    const Index v = perm[k];
    for (Index p = g.col_ptr()[v]; p < g.col_ptr()[v + 1]; ++p) {
      Index i = pos[g.row_idx()[p]];
      if (i > k) continue;
      while (mark[i] != k) {
        mark[i] = k;
        ++count;
        i = parent[i];
      }
    }
  }
  return count;
}

}  // namespace verisparse
