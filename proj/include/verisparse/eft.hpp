#pragma once

// Error-free transformations and compensated accumulation.

#include <cmath>
#include <span>

#include "verisparse/interval.hpp"

namespace verisparse {

// value + error represents a real number as an unevaluated sum.
struct ErrorFreePair {
  double value = 0.0;
  double error = 0.0;

  friend bool operator==(const ErrorFreePair&, const ErrorFreePair&) = default;
};

// value = fl(a + b) and value + error = a + b exactly, barring overflow.
inline ErrorFreePair two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

// Same contract as two_sum, requires |a| >= |b| or a == 0.
inline ErrorFreePair fast_two_sum(double a, double b) {
  const double s = a + b;
  return {s, b - (s - a)};
}

// value = fl(a * b) and value + error = a * b exactly, provided the product
// neither overflows nor falls below 2^-969 in magnitude.
inline ErrorFreePair two_prod(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

// Dot product evaluated as if in twice the working precision; the returned
// pair is normalized so that value = fl(value + error).
ErrorFreePair dot_compensated(std::span<const double> x, std::span<const double> y);

// Accumulates a sum of floating-point terms and products exactly enough to
// return both a twice-working-precision approximation and a rigorous
// enclosure of the exact real sum.
//
// The leading part is carried with two_sum, so the running value plus the
// collected rounding errors equals the exact sum. The errors themselves are
// summed with directed rounding. Products are split with two_prod; products
// too small for two_prod to be exact add one subnormal unit of slack each.
class ExactSumAccumulator {
 public:
  void add(double term);
  void add_product(double a, double b);

  // fl(exact sum), up to a few units of the second order.
  double approx() const { return value_ + err_near_; }
  // Rigorous enclosure of the exact sum of all accumulated terms.
  Interval enclosure() const;

 private:
  double value_ = 0.0;
  double err_near_ = 0.0;
  double err_lo_ = 0.0;
  double err_hi_ = 0.0;
  double slack_ = 0.0;
  bool nonfinite_ = false;
};

// Exact sign (-1, 0, +1) of the determinant a*c - b*b of the symmetric 2x2
// matrix [[a, b], [b, c]]. Exact for all finite inputs, subnormals included.
int det2_sign(double a, double b, double c);

// a*c - b*b evaluated with Kahan's fma scheme (relative error <= 2u in the
// absence of underflow).
double det2_value(double a, double b, double c);

}  // namespace verisparse
