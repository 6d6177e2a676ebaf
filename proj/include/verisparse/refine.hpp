#pragma once

#include <functional>
#include <span>
#include <vector>

#include "verisparse/ldlt.hpp"
#include "verisparse/sparse_matrix.hpp"
#include "verisparse/verify.hpp"

namespace verisparse {

struct RefineOptions {
  int max_iterations = 200;
  // Consecutive residual increases treated as divergence.
  int divergence_window = 3;
  // Called after the initial solve (iteration 0) and after every update with
  // the current pair, in the coordinates of the input system.
  std::function<void(int iteration, std::span<const double> y, std::span<const double> z)> observer;
};

// Approximate solution x = y + z kept as an unevaluated sum.
//
// residual_norm_sup and delta belong to the system that was verified: the
// equilibrated one when the certificate carries an equilibration. Then
// x_j = col_scale[j] * (scaled solution)_j and col_scale is stored here;
// otherwise col_scale is empty.
struct PairedSolution {
  std::vector<double> y;
  std::vector<double> z;
  double residual_norm_sup = 0.0;
  double delta = 0.0;
  int iterations = 0;  // solves with the factors, the initial one included
  bool converged = false;
  std::vector<double> col_scale;
  // Extra radius for scalings back to the input coordinates that were not
  // exact (subnormal results); zero almost always.
  double scaling_slack = 0.0;
  std::vector<double> residual_history;
};

struct SolutionEnclosure {
  std::vector<double> mid;
  std::vector<double> rad;
};

// Relative residual test ||r|| / ||b|| <= 2^-53 delta, with the quotient
// rounded upward and the threshold downward. Throws InvalidArgument for a
// nonpositive b_norm or delta.
bool stopping_check(double residual_norm_sup, double b_norm, double delta);

// Refinement with the factors of the shifted augmented matrix from a verified
// certificate: residuals in twice working precision, corrections from
// (M^T r; r), updates accumulated in the (y, z) pair.
// Throws InvalidArgument when cert is not verified or does not match a, and
// DimensionMismatch for a wrong-length b.
PairedSolution refine_augmented(const SparseMatrix& a, std::span<const double> b, const LdltFactors& f,
                                const Certificate& cert, const RefineOptions& opts = {});

// Classical refinement with an unverified LU of the verified system; the
// certificate supplies delta. Throws FactorizationBreakdown if the LU fails.
PairedSolution refine_lu(const SparseMatrix& a, std::span<const double> b, const Certificate& cert,
                         const RefineOptions& opts = {});

// mid = y, rad = |z| + |col_scale| * residual_norm_sup / delta, rounded
// upward. Contains A^-1 b whenever the certificate is valid.
SolutionEnclosure enclose_solution(const PairedSolution& ps, const Certificate& cert);

// max rad_i / |mid_i|; +inf if some mid_i = 0 has a nonzero radius.
double max_relative_radius(const SolutionEnclosure& enc);

}  // namespace verisparse
