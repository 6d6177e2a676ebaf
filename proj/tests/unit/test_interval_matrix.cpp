#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gen.hpp"
#include "oracles.hpp"
#include "verisparse/interval_matrix.hpp"

using namespace verisparse;
using oracle::contains;
using oracle::exact;
using oracle::Q;

namespace {

// Interval matrix around a point matrix; some entries widened.
IntervalSparseMatrix widen(std::mt19937_64& rng, const SparseMatrix& a, double rel) {
  std::vector<double> lo(a.values().begin(), a.values().end()), hi = lo;
  std::uniform_real_distribution<double> u(0, rel);
  for (std::size_t p = 0; p < lo.size(); ++p) {
    if (std::bernoulli_distribution(0.5)(rng)) continue;
    lo[p] -= u(rng) * std::fabs(lo[p]);
    hi[p] += u(rng) * std::fabs(hi[p]);
  }
  return IntervalSparseMatrix(a.rows(), a.cols(), {a.col_ptr().begin(), a.col_ptr().end()},
                              {a.row_idx().begin(), a.row_idx().end()}, lo, hi);
}

// A member: each entry at lo, hi or the midpoint.
SparseMatrix member(std::mt19937_64& rng, const IntervalSparseMatrix& m) {
  std::vector<double> v(m.nnz());
  std::uniform_int_distribution<int> pick(0, 2);
  for (Index p = 0; p < m.nnz(); ++p) {
    const int k = pick(rng);
    v[p] = k == 0 ? m.lo()[p] : (k == 1 ? m.hi()[p] : m.entry(p).mid());
  }
  return SparseMatrix(m.rows(), m.cols(), {m.col_ptr().begin(), m.col_ptr().end()},
                      {m.row_idx().begin(), m.row_idx().end()}, v);
}

void expect_product_contained(const IntervalSparseMatrix& c, const SparseMatrix& a, const SparseMatrix& b) {
  const std::vector<Q> ex = oracle::exact_product(a, b);
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < b.cols(); ++j) {
      ASSERT_TRUE(contains(c.coeff(i, j), ex[i * b.cols() + j])) << i << ',' << j;
    }
  }
}

SparseMatrix scaled_random(std::mt19937_64& rng, Index n, double density) {
  SparseMatrix a = oracle::random_sparse(rng, n, density, false);
  std::vector<double> v(a.values().begin(), a.values().end());
  for (double& x : v) x = std::ldexp(x, std::uniform_int_distribution<int>(-40, 40)(rng));
  return SparseMatrix(n, n, {a.col_ptr().begin(), a.col_ptr().end()}, {a.row_idx().begin(), a.row_idx().end()}, v);
}

}  // namespace

TEST(SpgemmInterval, IdentityTimesB) {
  std::mt19937_64 rng(43);
  const SparseMatrix b = oracle::random_sparse(rng, 15, 0.3, true);
  for (const Accuracy acc : {Accuracy::sharp, Accuracy::fast}) {
    const IntervalSparseMatrix c = spgemm_interval(IntervalSparseMatrix(SparseMatrix::identity(15)),
                                                   IntervalSparseMatrix(b), acc);
    ASSERT_EQ(c.nnz(), b.nnz());
    for (Index p = 0; p < b.nnz(); ++p) {
      const double v = b.values()[p];
      EXPECT_TRUE(c.entry(p).contains(v));
      EXPECT_GE(c.lo()[p], next_down(v));
      EXPECT_LE(c.hi()[p], next_up(v));
    }
  }
}

TEST(SpgemmInterval, TimesZeroHasEmptyPattern) {
  std::mt19937_64 rng(47);
  const SparseMatrix a = oracle::random_sparse(rng, 10, 0.4, true);
  const IntervalSparseMatrix c =
      spgemm_interval(IntervalSparseMatrix(a), IntervalSparseMatrix(SparseMatrix(10, 10)));
  EXPECT_EQ(c.nnz(), 0);
  EXPECT_THROW(spgemm_interval(IntervalSparseMatrix(a), IntervalSparseMatrix(SparseMatrix(9, 9))),
               DimensionMismatch);
}

TEST(SpgemmInterval, PointProductsContainRationalProduct) {
  std::mt19937_64 rng(53);
  for (int t = 0; t < 40; ++t) {
    const Index n = std::uniform_int_distribution<Index>(1, 20)(rng);
    const SparseMatrix a = scaled_random(rng, n, 0.3), b = scaled_random(rng, n, 0.3);
    for (const Accuracy acc : {Accuracy::sharp, Accuracy::fast}) {
      expect_product_contained(spgemm_interval(IntervalSparseMatrix(a), IntervalSparseMatrix(b), acc), a, b);
    }
  }
}

TEST(SpgemmInterval, IntervalProductsContainEveryMemberProduct) {
  std::mt19937_64 rng(59);
  for (int t = 0; t < 30; ++t) {
    const Index n = std::uniform_int_distribution<Index>(1, 12)(rng);
    const IntervalSparseMatrix a = widen(rng, scaled_random(rng, n, 0.4), 1e-3);
    const IntervalSparseMatrix b = widen(rng, scaled_random(rng, n, 0.4), 1e-3);
    for (const Accuracy acc : {Accuracy::sharp, Accuracy::fast}) {
      const IntervalSparseMatrix c = spgemm_interval(a, b, acc);
      for (int k = 0; k < 4; ++k) expect_product_contained(c, member(rng, a), member(rng, b));
    }
  }
}

TEST(SpgemmInterval, FastModeIsExactOnExactProducts) {
  const std::vector<double> d{1, 2, 4, 0.5};
  const SparseMatrix a = SparseMatrix::diagonal(d);
  const IntervalSparseMatrix c = spgemm_interval(IntervalSparseMatrix(a), IntervalSparseMatrix(a), Accuracy::fast);
  for (Index p = 0; p < c.nnz(); ++p) EXPECT_TRUE(c.entry(p).is_point());
}

TEST(Subtract, UnionPatternAndContainment) {
  std::mt19937_64 rng(61);
  const SparseMatrix a = oracle::random_sparse(rng, 8, 0.3, false), b = oracle::random_sparse(rng, 8, 0.3, false);
  const IntervalSparseMatrix d = subtract(IntervalSparseMatrix(a), IntervalSparseMatrix(b));
  for (Index i = 0; i < 8; ++i) {
    for (Index j = 0; j < 8; ++j) {
      EXPECT_TRUE(contains(d.coeff(i, j), exact(a.coeff(i, j)) - exact(b.coeff(i, j))));
    }
  }
}

TEST(NormBounds, Examples) {
  const IntervalSparseMatrix id(SparseMatrix::identity(5));
  EXPECT_EQ(norm_bound_1_inf(id, Norm::one), 1.0);
  EXPECT_EQ(norm_bound_1_inf(id, Norm::inf), 1.0);
  EXPECT_EQ(spectral_norm_bound(id), 1.0);
  const IntervalSparseMatrix s(SparseMatrix::from_dense(2, 2, std::vector<double>{0, 2, 2, 0}));
  EXPECT_EQ(norm_bound_1_inf(s, Norm::one), 2.0);
  EXPECT_EQ(norm_bound_1_inf(s, Norm::inf), 2.0);
  EXPECT_EQ(spectral_norm_bound(s), 2.0);
}

TEST(NormBounds, BoundRationalNorms) {
  std::mt19937_64 rng(67);
  for (int t = 0; t < 30; ++t) {
    const Index n = std::uniform_int_distribution<Index>(1, 25)(rng);
    const SparseMatrix a = scaled_random(rng, n, 0.3);
    const std::vector<Q> m = oracle::exact_dense(a);
    Q one = 0, inf = 0;
    for (Index j = 0; j < n; ++j) {
      Q col = 0, row = 0;
      for (Index i = 0; i < n; ++i) {
        col += abs(m[i * n + j]);
        row += abs(m[j * n + i]);
      }
      one = std::max(one, col);
      inf = std::max(inf, row);
    }
    EXPECT_GE(exact(norm_bound_1_inf(IntervalSparseMatrix(a), Norm::one)), one);
    EXPECT_GE(exact(norm_bound_1_inf(IntervalSparseMatrix(a), Norm::inf)), inf);
  }
}

TEST(NormBounds, SpectralBoundVersusSvd) {
  std::mt19937_64 rng(71);
  for (int t = 0; t < 30; ++t) {
    const Index n = 30;
    const SparseMatrix a = oracle::random_sparse(rng, n, 0.2, true);
    const double smax = oracle::sigma_max(a);
    const double bound = spectral_norm_bound(IntervalSparseMatrix(a));
    EXPECT_GE(bound, smax - oracle::svd_error_bound(a));
    EXPECT_LE(bound, std::sqrt(static_cast<double>(n)) * smax * (1 + 1e-12));
  }
}

TEST(IntervalSparseMatrix, MidRadMag) {
  const IntervalSparseMatrix m(2, 2, {0, 1, 2}, {0, 1}, {1.0, -3.0}, {2.0, -1.0});
  EXPECT_EQ(m.mid().coeff(0, 0), 1.5);
  EXPECT_GE(m.rad().coeff(1, 1), 1.0);
  EXPECT_EQ(m.mag().coeff(1, 1), 3.0);
  EXPECT_EQ(m.coeff(0, 1), Interval(0.0));
  EXPECT_THROW(IntervalSparseMatrix(1, 1, {0, 1}, {0}, {2.0}, {1.0}), InvalidArgument);
  EXPECT_EQ(m.transpose().coeff(1, 1), Interval(-3, -1));
}
