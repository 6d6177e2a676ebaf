#pragma once

#include <algorithm>
#include <cmath>
#include <iosfwd>

#include "verisparse/error.hpp"
#include "verisparse/rounding.hpp"

namespace verisparse {

// Closed interval [lo, hi] of binary64 endpoints. Endpoints may be infinite
// but never NaN, and lo <= hi always holds.
//
// All arithmetic returns an enclosure of the exact real result over every
// pair of members of the operands.
class Interval {
 public:
  constexpr Interval() = default;
  // Point interval. Throws InvalidArgument for NaN.
  explicit Interval(double value) : Interval(value, value) {}
  // Throws InvalidArgument when lo > hi or an endpoint is NaN.
  Interval(double lo, double hi) : lo_(lo), hi_(hi) {
    if (std::isnan(lo) || std::isnan(hi) || lo > hi) {
      throw InvalidArgument("Interval: invalid endpoints");
    }
  }

  constexpr double lo() const { return lo_; }
  constexpr double hi() const { return hi_; }

  bool is_point() const { return lo_ == hi_; }
  bool contains(double x) const { return lo_ <= x && x <= hi_; }
  bool contains_zero() const { return lo_ <= 0 && 0 <= hi_; }
  bool subset_of(const Interval& other) const { return other.lo_ <= lo_ && hi_ <= other.hi_; }

  // Largest absolute value of any member.
  double mag() const { return std::max(std::fabs(lo_), std::fabs(hi_)); }
  // Smallest absolute value of any member.
  double mig() const { return contains_zero() ? 0.0 : std::min(std::fabs(lo_), std::fabs(hi_)); }
  // Approximate midpoint (round-to-nearest), always inside the interval.
  double mid() const;
  // Upper bound on the distance from mid() to either endpoint.
  double rad() const;

  friend bool operator==(const Interval&, const Interval&) = default;

 private:
  // Unchecked constructor for results of outward-rounded arithmetic.
  struct Unchecked {};
  constexpr Interval(double lo, double hi, Unchecked) : lo_(lo), hi_(hi) {}

  friend Interval operator+(const Interval&, const Interval&);
  friend Interval operator-(const Interval&, const Interval&);
  friend Interval operator-(const Interval&);
  friend Interval operator*(const Interval&, const Interval&);
  friend Interval operator/(const Interval&, const Interval&);
  friend Interval hull(const Interval&, const Interval&);
  friend Interval abs(const Interval&);
  friend Interval sqr(const Interval&);
  friend Interval sqrt(const Interval&);

  double lo_ = 0.0;
  double hi_ = 0.0;
};

inline Interval operator+(const Interval& x, const Interval& y) {
  return Interval(add_down(x.lo_, y.lo_), add_up(x.hi_, y.hi_), Interval::Unchecked{});
}

inline Interval operator-(const Interval& x, const Interval& y) {
  return Interval(sub_down(x.lo_, y.hi_), sub_up(x.hi_, y.lo_), Interval::Unchecked{});
}

inline Interval operator-(const Interval& x) { return Interval(-x.hi_, -x.lo_, Interval::Unchecked{}); }

Interval operator*(const Interval& x, const Interval& y);

// Throws DivisionByZero when y contains zero.
Interval operator/(const Interval& x, const Interval& y);

inline Interval& operator+=(Interval& x, const Interval& y) { return x = x + y; }
inline Interval& operator-=(Interval& x, const Interval& y) { return x = x - y; }
inline Interval& operator*=(Interval& x, const Interval& y) { return x = x * y; }

// Smallest interval containing both operands.
Interval hull(const Interval& x, const Interval& y);
// {|t| : t in x}
Interval abs(const Interval& x);
// {t^2 : t in x}, tighter than x * x when x straddles zero.
Interval sqr(const Interval& x);
// Throws InvalidArgument when x has negative members.
Interval sqrt(const Interval& x);

std::ostream& operator<<(std::ostream& os, const Interval& x);

}  // namespace verisparse
