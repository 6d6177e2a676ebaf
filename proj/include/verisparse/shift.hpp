#pragma once

#include <optional>
#include <vector>

#include "verisparse/sparse_matrix.hpp"

namespace verisparse {

// How the shift is picked from an estimate of the smallest singular value and
// how many retries of each kind are allowed.
struct ShiftPolicy {
  double initial_fraction = 0.5;
  int max_shrinks = 3;
  int max_grows = 2;

  // Throws InvalidArgument unless 0 < initial_fraction < 1 and the budgets
  // are nonnegative.
  void validate() const;
};

enum class ShiftFailure { inertia, residual };

struct ShiftAttempt {
  double theta = 0.0;
  double rho = 0.0;  // residual bound observed at theta, if computed
  ShiftFailure failure = ShiftFailure::inertia;
};

// Failed attempts so far, oldest first.
struct ShiftState {
  std::vector<ShiftAttempt> failures;
};

// Approximate smallest singular value of a square A by inverse iteration on
// A^T A with an unverified sparse LU, starting from the all-ones vector and
// stopping once successive estimates agree to 1%. Falls back to inverse
// iteration on [[0, A^T], [A, 0]] with an LDL^T factorization when the LU
// breaks down. Throws Error when both fail.
double estimate_sigma_min(const SparseMatrix& a);

// Next shift to try, or nullopt once the retry budget is spent.
//
// No failure yet: initial_fraction * sigma_est. After an inertia failure the
// previous shift is halved; after a residual failure the new shift is twice
// the observed residual bound. A candidate at or above a shift that failed
// the inertia test, or at or below one that failed the residual test, is
// replaced by the midpoint of that bracket.
std::optional<double> choose_theta(double sigma_est, const ShiftPolicy& policy, const ShiftState& state);

}  // namespace verisparse
