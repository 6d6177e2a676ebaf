#pragma once

// Hand-rolled generators shared by the property tests.

#include <cmath>
#include <random>

namespace gen {

// Doubles spread over the whole exponent range, biased toward the ranges
// where directed rounding is delicate: tiny and subnormal results, values
// near overflow, exact zeros and small integers.
inline double any_double(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> kind(0, 19);
  std::uniform_real_distribution<double> mant(1.0, 2.0);
  std::bernoulli_distribution neg(0.5);
  const int k = kind(rng);
  double v;
  if (k == 0) {
    v = 0.0;
  } else if (k == 1) {
    v = std::uniform_int_distribution<int>(1, 16)(rng);
  } else if (k <= 3) {
    v = std::ldexp(mant(rng), std::uniform_int_distribution<int>(-1074, -960)(rng));
  } else if (k <= 5) {
    v = std::ldexp(mant(rng), std::uniform_int_distribution<int>(960, 1023)(rng));
  } else {
    v = std::ldexp(mant(rng), std::uniform_int_distribution<int>(-60, 60)(rng));
  }
  return neg(rng) ? -v : v;
}

// Moderate doubles, no extreme exponents.
inline double moderate(std::mt19937_64& rng, int span = 30) {
  std::uniform_real_distribution<double> mant(1.0, 2.0);
  std::bernoulli_distribution neg(0.5);
  const double v = std::ldexp(mant(rng), std::uniform_int_distribution<int>(-span, span)(rng));
  return neg(rng) ? -v : v;
}

}  // namespace gen
