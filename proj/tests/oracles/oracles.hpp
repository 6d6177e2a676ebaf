#pragma once

// Independent reference computations for the tests: exact rational
// arithmetic (GMP), dense linear algebra (Eigen) and brute-force symbolic
// elimination. None of this shares code with the library under test.

#include <gmpxx.h>

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "verisparse/interval.hpp"
#include "verisparse/ldlt.hpp"
#include "verisparse/sparse_matrix.hpp"

namespace oracle {

using verisparse::Index;
using verisparse::SparseMatrix;
using Q = mpq_class;

// Exact value of a finite double.
Q exact(double x);
bool contains(const verisparse::Interval& iv, const Q& q);

// Dense row-major rational copy.
std::vector<Q> exact_dense(const SparseMatrix& a);
// Exact dense product (row-major, a.rows() x b.cols()).
std::vector<Q> exact_product(const SparseMatrix& a, const SparseMatrix& b);
// Exact solution of A x = b by Gaussian elimination over the rationals;
// nullopt for singular A.
std::optional<std::vector<Q>> exact_solve(const SparseMatrix& a, std::span<const double> b);

Eigen::MatrixXd dense(const SparseMatrix& a);
Eigen::VectorXd singular_values(const SparseMatrix& a);  // descending
double sigma_min(const SparseMatrix& a);
double sigma_max(const SparseMatrix& a);
// Absolute accuracy of the computed singular values: a backward-stable SVD
// returns each sigma_i within this of the exact value.
double svd_error_bound(const SparseMatrix& a);

// Eigenvalue sign counts of D from per-block symmetric eigendecompositions;
// eigenvalues too small for the decomposition to resolve take their sign
// from the exact rational determinant.
verisparse::Inertia eigen_inertia(const verisparse::BlockDiag& d);

// Number of strictly lower nonzeros of the Cholesky factor of the permuted
// pattern of a (diagonal ignored), by playing the elimination game on
// explicit adjacency sets.
Index elimination_game_nnz(const SparseMatrix& pattern, std::span<const Index> perm);
// Strictly lower nonzeros of the symmetrized pattern itself.
Index lower_pattern_nnz(const SparseMatrix& pattern);

// Random sparse n x n matrix: each entry present with probability density,
// plus a full diagonal when with_diagonal; values uniform in [-1, 1].
SparseMatrix random_sparse(std::mt19937_64& rng, Index n, double density, bool with_diagonal);
// Random integer matrix with entries in [-range, range], diagonally weighted
// so that it is almost surely nonsingular.
SparseMatrix random_integer(std::mt19937_64& rng, Index n, double density, int range);
// Random double with a random exponent in [lo_exp, hi_exp] and random sign.
double random_scaled(std::mt19937_64& rng, int lo_exp, int hi_exp);

}  // namespace oracle
