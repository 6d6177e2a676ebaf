#pragma once

// Directed rounding without touching the floating-point environment.
//
// Every operation is evaluated once in round-to-nearest. The exact rounding
// error is then recovered with an error-free transformation and the result is
// moved one ulp outward only when the error points that way. Near underflow
// the operands are rescaled first so the error stays exact; on overflow the
// result saturates to the largest finite value or infinity.

#include <cmath>
#include <limits>

namespace verisparse {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kMaxDouble = std::numeric_limits<double>::max();
// Unit roundoff of binary64.
inline constexpr double kUnitRoundoff = 0x1p-53;
// Smallest positive subnormal.
inline constexpr double kEta = 0x1p-1074;

namespace detail {

// Below this magnitude the fma-based remainders may lose bits to underflow.
inline constexpr double kSafeTiny = 0x1p-960;

inline double sanitize_down(double x) { return std::isnan(x) ? -kInf : x; }
inline double sanitize_up(double x) { return std::isnan(x) ? kInf : x; }

// Products and quotients whose operands or result are too small for the fma
// remainder to be exact. The operands are rescaled to exponent zero, where the
// remainder is exact, and the side on which the rounded result lies is read
// off the rescaled residual. Both operands are finite and nonzero.
inline double tiny_mul(double a, double b, bool up) {
  const int ea = std::ilogb(a), eb = std::ilogb(b);
  const double as = std::ldexp(a, -ea), bs = std::ldexp(b, -eb);
  const double r = std::ldexp(as * bs, ea + eb);
  const double back = std::ldexp(r, -(ea + eb));  // exact: |back| < 8
  const double d = std::fma(-as, bs, back);       // sign of r - a b
  if (up) return d < 0 ? std::nextafter(r, kInf) : r;
  return d > 0 ? std::nextafter(r, -kInf) : r;
}

inline double tiny_div(double a, double b, bool up) {
  const int ea = std::ilogb(a), eb = std::ilogb(b);
  const double as = std::ldexp(a, -ea), bs = std::ldexp(b, -eb);
  const double r = std::ldexp(as / bs, ea - eb);
  const double back = std::ldexp(r, -(ea - eb));
  const double d = std::fma(back, bs, -as);  // sign of (r - a / b) * b
  const bool above = bs > 0 ? d > 0 : d < 0;
  const bool below = bs > 0 ? d < 0 : d > 0;
  if (up) return below ? std::nextafter(r, kInf) : r;
  return above ? std::nextafter(r, -kInf) : r;
}

}  // namespace detail

inline double next_up(double x) { return std::nextafter(x, kInf); }
inline double next_down(double x) { return std::nextafter(x, -kInf); }

inline double add_up(double a, double b) {
  const double s = a + b;
  if (!std::isfinite(s)) {
    if (std::isfinite(a) && std::isfinite(b)) return s > 0 ? kInf : -kMaxDouble;
    return detail::sanitize_up(s);
  }
  const double bb = s - a;
  const double err = (a - (s - bb)) + (b - bb);
  return err > 0 ? next_up(s) : s;
}

inline double add_down(double a, double b) {
  const double s = a + b;
  if (!std::isfinite(s)) {
    if (std::isfinite(a) && std::isfinite(b)) return s > 0 ? kMaxDouble : -kInf;
    return detail::sanitize_down(s);
  }
  const double bb = s - a;
  const double err = (a - (s - bb)) + (b - bb);
  return err < 0 ? next_down(s) : s;
}

inline double sub_up(double a, double b) { return add_up(a, -b); }
inline double sub_down(double a, double b) { return add_down(a, -b); }

inline double mul_up(double a, double b) {
  if (a == 0 || b == 0) return 0.0;
  const double p = a * b;
  if (!std::isfinite(p)) {
    if (std::isfinite(a) && std::isfinite(b)) return p > 0 ? kInf : -kMaxDouble;
    return detail::sanitize_up(p);
  }
  if (std::fabs(p) < detail::kSafeTiny) return detail::tiny_mul(a, b, true);
  const double err = std::fma(a, b, -p);
  return err > 0 ? next_up(p) : p;
}

inline double mul_down(double a, double b) {
  if (a == 0 || b == 0) return 0.0;
  const double p = a * b;
  if (!std::isfinite(p)) {
    if (std::isfinite(a) && std::isfinite(b)) return p > 0 ? kMaxDouble : -kInf;
    return detail::sanitize_down(p);
  }
  if (std::fabs(p) < detail::kSafeTiny) return detail::tiny_mul(a, b, false);
  const double err = std::fma(a, b, -p);
  return err < 0 ? next_down(p) : p;
}

// Callers guarantee b != 0.
inline double div_up(double a, double b) {
  if (a == 0) return 0.0;
  const double q = a / b;
  if (!std::isfinite(q)) {
    if (std::isfinite(a) && std::isfinite(b)) return q > 0 ? kInf : -kMaxDouble;
    return detail::sanitize_up(q);
  }
  if (!std::isfinite(b)) return next_up(q);
  if (std::fabs(q) < detail::kSafeTiny || std::fabs(a) < detail::kSafeTiny) return detail::tiny_div(a, b, true);
  // a/b - q = r/b exactly.
  const double r = std::fma(-q, b, a);
  const bool above = (r > 0 && b > 0) || (r < 0 && b < 0);
  return above ? next_up(q) : q;
}

inline double div_down(double a, double b) {
  if (a == 0) return 0.0;
  const double q = a / b;
  if (!std::isfinite(q)) {
    if (std::isfinite(a) && std::isfinite(b)) return q > 0 ? kMaxDouble : -kInf;
    return detail::sanitize_down(q);
  }
  if (!std::isfinite(b)) return next_down(q);
  if (std::fabs(q) < detail::kSafeTiny || std::fabs(a) < detail::kSafeTiny) return detail::tiny_div(a, b, false);
  const double r = std::fma(-q, b, a);
  const bool below = (r < 0 && b > 0) || (r > 0 && b < 0);
  return below ? next_down(q) : q;
}

// Square root rounded upward: result^2 >= x and the result is at most one ulp
// above the exact root. Throws InvalidArgument for x < 0.
double sqrt_up(double x);
// Square root rounded downward. Throws InvalidArgument for x < 0.
double sqrt_down(double x);

}  // namespace verisparse
