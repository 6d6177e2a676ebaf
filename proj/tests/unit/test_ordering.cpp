#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "oracles.hpp"
#include "verisparse/ordering.hpp"

using namespace verisparse;

namespace {

SparseMatrix arrow(Index n) {
  std::vector<Triplet> t;
  for (Index i = 0; i < n; ++i) {
    t.push_back({i, i, 4.0});
    if (i > 0) {
      t.push_back({0, i, 1.0});
      t.push_back({i, 0, 1.0});
    }
  }
  return SparseMatrix::from_triplets(n, n, t);
}

SparseMatrix grid_laplacian(Index k) {
  std::vector<Triplet> t;
  const auto id = [k](Index i, Index j) { return i * k + j; };
  for (Index i = 0; i < k; ++i) {
    for (Index j = 0; j < k; ++j) {
      t.push_back({id(i, j), id(i, j), 4.0});
      if (i + 1 < k) {
        t.push_back({id(i, j), id(i + 1, j), -1.0});
        t.push_back({id(i + 1, j), id(i, j), -1.0});
      }
      if (j + 1 < k) {
        t.push_back({id(i, j), id(i, j + 1), -1.0});
        t.push_back({id(i, j + 1), id(i, j), -1.0});
      }
    }
  }
  return SparseMatrix::from_triplets(k * k, k * k, t);
}

std::vector<Index> identity_order(Index n) {
  std::vector<Index> p(n);
  std::iota(p.begin(), p.end(), Index{0});
  return p;
}

}  // namespace

TEST(Ordering, DiagonalHasNoFill) {
  const SparseMatrix d = SparseMatrix::identity(6);
  const std::vector<Index> p = fill_reducing_order(d);
  EXPECT_TRUE(is_permutation(p, 6));
  EXPECT_EQ(symbolic_factor_nnz(d, p), 0);
}

TEST(Ordering, ArrowVertexGoesLast) {
  const SparseMatrix a = arrow(10);
  const std::vector<Index> p = fill_reducing_order(a);
  EXPECT_EQ(p.back(), 0);
  EXPECT_EQ(oracle::elimination_game_nnz(a, p) - oracle::lower_pattern_nnz(a), 0);
  // The identity order eliminates the hub first and fills everything.
  EXPECT_EQ(oracle::elimination_game_nnz(a, identity_order(10)), 9 * 8 / 2 + 9);
}

TEST(Ordering, GridFillNoWorseThanNaturalOrder) {
  const SparseMatrix g = grid_laplacian(10);
  const std::vector<Index> p = fill_reducing_order(g);
  EXPECT_TRUE(is_permutation(p, 100));
  EXPECT_LE(oracle::elimination_game_nnz(g, p), oracle::elimination_game_nnz(g, identity_order(100)));
}

TEST(Ordering, SymbolicCountMatchesEliminationGame) {
  std::mt19937_64 rng(79);
  for (int t = 0; t < 40; ++t) {
    const Index n = std::uniform_int_distribution<Index>(1, 40)(rng);
    const SparseMatrix a = symmetric_pattern(oracle::random_sparse(rng, n, 0.08, true));
    std::vector<Index> p = identity_order(n);
    std::shuffle(p.begin(), p.end(), rng);
    EXPECT_EQ(symbolic_factor_nnz(a, p), oracle::elimination_game_nnz(a, p));
    const std::vector<Index> md = fill_reducing_order(a);
    EXPECT_EQ(symbolic_factor_nnz(a, md), oracle::elimination_game_nnz(a, md));
  }
}

TEST(Ordering, EliminationTreeParentsComeLater) {
  const SparseMatrix g = grid_laplacian(5);
  const std::vector<Index> p = fill_reducing_order(g);
  const std::vector<Index> parent = elimination_tree(g, p);
  Index roots = 0;
  for (Index k = 0; k < 25; ++k) {
    if (parent[k] < 0) {
      ++roots;
    } else {
      EXPECT_GT(parent[k], k);
    }
  }
  EXPECT_EQ(roots, 1);  // the grid is connected
}

TEST(Ordering, Deterministic) {
  std::mt19937_64 rng(83);
  const SparseMatrix a = symmetric_pattern(oracle::random_sparse(rng, 60, 0.05, true));
  EXPECT_EQ(fill_reducing_order(a), fill_reducing_order(a));
}
