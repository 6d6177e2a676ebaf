#include "verisparse/eft.hpp"

#include <bit>
#include <cstdint>

#include "verisparse/error.hpp"

namespace verisparse {

ErrorFreePair dot_compensated(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionMismatch("dot_compensated: length mismatch");
  if (x.empty()) return {};
  auto [p, s] = two_prod(x[0], y[0]);
  for (std::size_t i = 1; i < x.size(); ++i) {
    const auto [h, r] = two_prod(x[i], y[i]);
    const auto [t, q] = two_sum(p, h);
    p = t;
    s += q + r;
  }
  return two_sum(p, s);
}

void ExactSumAccumulator::add(double term) {
  if (!std::isfinite(term)) {
    nonfinite_ = true;
    return;
  }
  const auto [s, e] = two_sum(value_, term);
  if (!std::isfinite(s)) {
    nonfinite_ = true;
    return;
  }
  value_ = s;
  err_near_ += e;
  err_lo_ = add_down(err_lo_, e);
  err_hi_ = add_up(err_hi_, e);
}

void ExactSumAccumulator::add_product(double a, double b) {
  if (a == 0 || b == 0) return;
  const auto [p, e] = two_prod(a, b);
  if (!std::isfinite(p)) {
    nonfinite_ = true;
    return;
  }
  if (std::fabs(p) < 0x1p-969) slack_ = add_up(slack_, kEta);
  add(p);
  add(e);
}

Interval ExactSumAccumulator::enclosure() const {
  if (nonfinite_) return Interval(-kInf, kInf);
  return Interval(add_down(value_, sub_down(err_lo_, slack_)), add_up(value_, add_up(err_hi_, slack_)));
}

namespace {

// |x| = mantissa * 2^exponent with an integer mantissa below 2^53.
struct Split {
  std::uint64_t mantissa;
  int exponent;
};

Split split(double x) {
  int e = 0;
  const double f = std::frexp(std::fabs(x), &e);
  return {static_cast<std::uint64_t>(std::ldexp(f, 53)), e - 53};
}

int bit_length(unsigned __int128 v) {
  const auto hi = static_cast<std::uint64_t>(v >> 64);
  if (hi != 0) return 128 - std::countl_zero(hi);
  return 64 - std::countl_zero(static_cast<std::uint64_t>(v));
}

// Sign of m1*2^e1 - m2*2^e2 for nonnegative mantissas.
int compare_scaled(unsigned __int128 m1, int e1, unsigned __int128 m2, int e2) {
  if (m1 == 0) return m2 == 0 ? 0 : -1;
  if (m2 == 0) return 1;
  const int top1 = bit_length(m1) + e1;
  const int top2 = bit_length(m2) + e2;
  if (top1 != top2) return top1 > top2 ? 1 : -1;
  // Equal leading positions: the shift keeps the larger-exponent mantissa
  // within the bit length of the other one.
  if (e1 > e2) {
    m1 <<= (e1 - e2);
  } else {
    m2 <<= (e2 - e1);
  }
  return m1 == m2 ? 0 : (m1 > m2 ? 1 : -1);
}

}  // namespace

int det2_sign(double a, double b, double c) {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c)) {
    throw InvalidArgument("det2_sign: non-finite entry");
  }
  // det = ac - b^2 with b^2 >= 0.
  const int sign_ac = (a == 0 || c == 0) ? 0 : ((a > 0) == (c > 0) ? 1 : -1);
  if (sign_ac <= 0) return (sign_ac < 0 || b != 0) ? -1 : 0;
  const Split sa = split(a);
  const Split sc = split(c);
  const Split sb = split(b);
  const auto ac = static_cast<unsigned __int128>(sa.mantissa) * sc.mantissa;
  const auto bb = static_cast<unsigned __int128>(sb.mantissa) * sb.mantissa;
  return compare_scaled(ac, sa.exponent + sc.exponent, bb, 2 * sb.exponent);
}

double det2_value(double a, double b, double c) {
  const double w = b * b;
  const double e = std::fma(-b, b, w);
  const double f = std::fma(a, c, -w);
  return f + e;
}

}  // namespace verisparse
