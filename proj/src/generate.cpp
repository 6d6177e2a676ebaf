#include "verisparse/generate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "verisparse/error.hpp"

namespace verisparse {

std::vector<double> geometric_spectrum(Index n, double kappa) {
  if (n < 1 || !(kappa >= 1) || !std::isfinite(kappa)) throw InvalidArgument("geometric_spectrum: bad arguments");
  std::vector<double> s(n, 1.0);
  for (Index i = 1; i < n; ++i) s[i] = std::pow(kappa, -static_cast<double>(i) / static_cast<double>(n - 1));
  if (n > 1) s[n - 1] = 1.0 / kappa;
  return s;
}

namespace {

// One sweep of rotations on disjoint pairs (i, i + d), d in [1, window].
// rows = true rotates rows (left factor), otherwise columns.
void rotation_sweep(std::vector<double>& a, Index n, Index window, bool rows, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_int_distribution<Index> offset(1, window);
  std::vector<char> used(n, 0);
  for (Index i = 0; i < n; ++i) {
    if (used[i]) continue;
    const Index j = i + offset(rng);
    if (j >= n || used[j]) continue;
    used[i] = used[j] = 1;
    const double t = angle(rng);
    const double c = std::cos(t);
    const double s = std::sin(t);
    for (Index k = 0; k < n; ++k) {
      double& x = rows ? a[k * n + i] : a[i * n + k];
      double& y = rows ? a[k * n + j] : a[j * n + k];
      const double xi = x;
      const double yj = y;
      x = c * xi - s * yj;
      y = s * xi + c * yj;
    }
  }
}

}  // namespace

SparseMatrix random_with_spectrum(const SpectrumOptions& opts, std::uint64_t seed) {
  const Index n = opts.n;
  if (n < 1 || opts.layers < 0 || opts.window < 1) throw InvalidArgument("random_with_spectrum: bad options");
  const std::vector<double> s = geometric_spectrum(n, opts.kappa);
  std::mt19937_64 rng(seed);
  // Dense column-major work array starting from diag(s) with shuffled
  // singular values so small ones are not clustered in one corner.
  std::vector<double> a(static_cast<std::size_t>(n * n), 0.0);
  std::vector<Index> place(n);
  for (Index i = 0; i < n; ++i) place[i] = i;
  std::shuffle(place.begin(), place.end(), rng);
  for (Index i = 0; i < n; ++i) a[place[i] * n + place[i]] = s[i];
  for (int l = 0; l < opts.layers; ++l) {
    rotation_sweep(a, n, opts.window, true, rng);
    rotation_sweep(a, n, opts.window, false, rng);
  }
  std::vector<Index> perm(n);
  for (Index i = 0; i < n; ++i) perm[i] = i;
  if (opts.permute_rows) std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<Triplet> t;
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      const double v = a[j * n + perm[i]];
      if (v != 0) t.push_back({i, j, v});
    }
  }
  return SparseMatrix::from_triplets(n, n, t);
}

}  // namespace verisparse
