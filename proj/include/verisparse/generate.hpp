#pragma once

#include <cstdint>
#include <vector>

#include "verisparse/sparse_matrix.hpp"

namespace verisparse {

// Random sparse matrices with a prescribed singular spectrum:
// A = P U diag(s) V, with s geometric from 1 down to 1 / kappa, U and V
// products of `layers` sweeps of Givens rotations on index pairs at most
// `window` apart, and P a random row permutation (when permute_rows).
// Entries that come out exactly zero are dropped.
struct SpectrumOptions {
  Index n = 100;
  double kappa = 1e6;
  int layers = 3;
  Index window = 4;
  bool permute_rows = true;
};

// s_i = kappa^(-i / (n - 1)), so s_0 = 1 and s_{n-1} = 1 / kappa.
std::vector<double> geometric_spectrum(Index n, double kappa);

// Deterministic for a given seed and options. Throws InvalidArgument for
// n < 1, kappa < 1, layers < 0 or window < 1.
SparseMatrix random_with_spectrum(const SpectrumOptions& opts, std::uint64_t seed);

}  // namespace verisparse
