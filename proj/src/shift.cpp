#include "verisparse/shift.hpp"

#include <algorithm>
#include <cmath>

#include "verisparse/error.hpp"
#include "verisparse/ldlt.hpp"
#include "verisparse/lu.hpp"
#include "verisparse/rounding.hpp"

namespace verisparse {

void ShiftPolicy::validate() const {
  if (!(initial_fraction > 0 && initial_fraction < 1)) {
    throw InvalidArgument("shift policy: initial fraction must lie in (0, 1)");
  }
  if (max_shrinks < 0 || max_grows < 0) throw InvalidArgument("shift policy: negative retry budget");
}

namespace {

constexpr int kMaxIterations = 100;
constexpr double kAgreement = 1e-2;

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (const double x : v) s = std::hypot(s, x);
  return s;
}

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// Inverse iteration with an operator pair: forward applies M^-T (or the
// symmetric inverse), backward applies M^-1. Returns 0 on failure.
template <class Forward, class Backward>
double inverse_iteration(Index n, const Forward& forward, const Backward& backward) {
  std::vector<double> x(n, 1.0);
  double previous = -1.0;
  double est = 0.0;
  for (int it = 0; it < kMaxIterations; ++it) {
    const std::vector<double> y = forward(x);
    const std::vector<double> z = backward(y);
    if (!all_finite(y) || !all_finite(z)) return 0.0;
    const double ny = norm2(y);
    const double nz = norm2(z);
    if (ny == 0 || nz == 0) return 0.0;
    est = ny / nz;
    if (previous >= 0 && std::fabs(est - previous) <= kAgreement * est) break;
    previous = est;
    for (Index i = 0; i < n; ++i) x[i] = z[i] / nz;
  }
  return est;
}

}  // namespace

double estimate_sigma_min(const SparseMatrix& a) {
  if (!a.is_square() || a.rows() == 0) throw InvalidArgument("estimate_sigma_min: need a nonempty square matrix");
  const Index n = a.rows();
  try {
    const LuFactors f = lu(a);
    const double est = inverse_iteration(
        n, [&](const std::vector<double>& v) { return lu_solve_transpose(f, v); },
        [&](const std::vector<double>& v) { return lu_solve(f, v); });
    if (est > 0 && std::isfinite(est)) return est;
  } catch (const FactorizationBreakdown&) {
  }
  try {
    const SparseMatrix aug = augment(a);
    const LdltFactors f = ldlt(aug);
    // Eigenvalues of the augmented matrix are +-sigma_i; two symmetric solves
    // per step mirror the LU variant.
    const auto solve = [&](const std::vector<double>& v) { return solve_ldlt(f, v); };
    const double est = inverse_iteration(2 * n, solve, solve);
    if (est > 0 && std::isfinite(est)) return est;
  } catch (const Error&) {
  }
  throw Error("estimate_sigma_min: no usable factorization");
}

std::optional<double> choose_theta(double sigma_est, const ShiftPolicy& policy, const ShiftState& state) {
  policy.validate();
  if (!(sigma_est > 0) || !std::isfinite(sigma_est)) throw InvalidArgument("choose_theta: estimate must be positive");
  if (state.failures.empty()) return policy.initial_fraction * sigma_est;

  int shrinks = 0;
  int grows = 0;
  double low = 0.0;   // largest shift that failed the residual test
  double high = kInf; // smallest shift that failed the inertia test
  for (const auto& f : state.failures) {
    if (f.failure == ShiftFailure::inertia) {
      ++shrinks;
      high = std::min(high, f.theta);
    } else {
      ++grows;
      low = std::max(low, f.theta);
    }
  }
  if (shrinks > policy.max_shrinks || grows > policy.max_grows) return std::nullopt;

  const ShiftAttempt& last = state.failures.back();
  double theta = last.failure == ShiftFailure::inertia ? last.theta / 2 : mul_up(2.0, last.rho);
  if (!(theta > low && theta < high)) {
    if (!std::isfinite(high)) return std::nullopt;
    theta = low / 2 + high / 2;
  }
  if (!(theta > low && theta < high) || !(theta > 0) || !std::isfinite(theta)) return std::nullopt;
  return theta;
}

}  // namespace verisparse
