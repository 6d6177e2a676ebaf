#include "verisparse/interval.hpp"

#include <ostream>

namespace verisparse {

double sqrt_up(double x) {
  if (std::isnan(x) || x < 0) throw InvalidArgument("sqrt_up: negative argument");
  if (x == 0 || std::isinf(x)) return x;
  const double s = std::sqrt(x);
  // Scaling by an even power of two keeps the remainder exact.
  if (x < detail::kSafeTiny) return std::ldexp(sqrt_up(std::ldexp(x, 1076)), -538);
  // x - s*s is exact here.
  const double r = std::fma(-s, s, x);
  return r > 0 ? next_up(s) : s;
}

double sqrt_down(double x) {
  if (std::isnan(x) || x < 0) throw InvalidArgument("sqrt_down: negative argument");
  if (x == 0 || std::isinf(x)) return x;
  const double s = std::sqrt(x);
  if (x < detail::kSafeTiny) return std::ldexp(sqrt_down(std::ldexp(x, 1076)), -538);
  const double r = std::fma(-s, s, x);
  return r < 0 ? next_down(s) : s;
}

double Interval::mid() const {
  if (lo_ == -kInf) return hi_ == kInf ? 0.0 : -kMaxDouble;
  if (hi_ == kInf) return kMaxDouble;
  // Halving first avoids overflow; the sum of halves stays inside [lo, hi].
  const double m = 0.5 * lo_ + 0.5 * hi_;
  return std::clamp(m, lo_, hi_);
}

double Interval::rad() const {
  const double m = mid();
  return std::max(sub_up(m, lo_), sub_up(hi_, m));
}

Interval operator*(const Interval& x, const Interval& y) {
  const double a = x.lo_, b = x.hi_, c = y.lo_, d = y.hi_;
  double lo;
  double hi;
  if (a >= 0) {
    if (c >= 0) {
      lo = mul_down(a, c);
      hi = mul_up(b, d);
    } else if (d <= 0) {
      lo = mul_down(b, c);
      hi = mul_up(a, d);
    } else {
      lo = mul_down(b, c);
      hi = mul_up(b, d);
    }
  } else if (b <= 0) {
    if (c >= 0) {
      lo = mul_down(a, d);
      hi = mul_up(b, c);
    } else if (d <= 0) {
      lo = mul_down(b, d);
      hi = mul_up(a, c);
    } else {
      lo = mul_down(a, d);
      hi = mul_up(a, c);
    }
  } else {
    if (c >= 0) {
      lo = mul_down(a, d);
      hi = mul_up(b, d);
    } else if (d <= 0) {
      lo = mul_down(b, c);
      hi = mul_up(a, c);
    } else {
      lo = std::min(mul_down(a, d), mul_down(b, c));
      hi = std::max(mul_up(a, c), mul_up(b, d));
    }
  }
  return Interval(lo, hi, Interval::Unchecked{});
}

Interval operator/(const Interval& x, const Interval& y) {
  if (y.contains_zero()) throw DivisionByZero("interval division by an interval containing zero");
  const double a = x.lo_, b = x.hi_, c = y.lo_, d = y.hi_;
  double lo;
  double hi;
  if (c > 0) {
    if (a >= 0) {
      lo = div_down(a, d);
      hi = div_up(b, c);
    } else if (b <= 0) {
      lo = div_down(a, c);
      hi = div_up(b, d);
    } else {
      lo = div_down(a, c);
      hi = div_up(b, c);
    }
  } else {
    if (a >= 0) {
      lo = div_down(b, d);
      hi = div_up(a, c);
    } else if (b <= 0) {
      lo = div_down(b, c);
      hi = div_up(a, d);
    } else {
      lo = div_down(b, d);
      hi = div_up(a, d);
    }
  }
  return Interval(lo, hi, Interval::Unchecked{});
}

Interval hull(const Interval& x, const Interval& y) {
  return Interval(std::min(x.lo_, y.lo_), std::max(x.hi_, y.hi_), Interval::Unchecked{});
}

Interval abs(const Interval& x) { return Interval(x.mig(), x.mag(), Interval::Unchecked{}); }

Interval sqr(const Interval& x) {
  const double lo = x.mig();
  const double hi = x.mag();
  return Interval(mul_down(lo, lo), mul_up(hi, hi), Interval::Unchecked{});
}

Interval sqrt(const Interval& x) {
  if (x.lo_ < 0) throw InvalidArgument("sqrt of an interval with negative members");
  return Interval(sqrt_down(x.lo_), sqrt_up(x.hi_), Interval::Unchecked{});
}

std::ostream& operator<<(std::ostream& os, const Interval& x) {
  return os << '[' << x.lo() << ", " << x.hi() << ']';
}

}  // namespace verisparse
