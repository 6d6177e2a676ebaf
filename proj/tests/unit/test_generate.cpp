#include <gtest/gtest.h>

#include "oracles.hpp"
#include "verisparse/generate.hpp"

using namespace verisparse;

TEST(GeometricSpectrum, Endpoints) {
  const std::vector<double> s = geometric_spectrum(5, 1e4);
  ASSERT_EQ(s.size(), 5u);
  EXPECT_EQ(s[0], 1.0);
  EXPECT_NEAR(s[2], 1e-2, 1e-15);
  EXPECT_NEAR(s[4], 1e-4, 1e-18);
  for (size_t i = 1; i < s.size(); ++i) EXPECT_LT(s[i], s[i - 1]);
  EXPECT_EQ(geometric_spectrum(1, 10), std::vector<double>{1.0});
}

TEST(RandomWithSpectrum, Deterministic) {
  SpectrumOptions o;
  o.n = 40;
  EXPECT_EQ(random_with_spectrum(o, 7), random_with_spectrum(o, 7));
  EXPECT_FALSE(random_with_spectrum(o, 7) == random_with_spectrum(o, 8));
}

TEST(RandomWithSpectrum, HasPrescribedSingularValues) {
  for (const double kappa : {1.0, 1e3, 1e8, 1e12}) {
    SpectrumOptions o;
    o.n = 60;
    o.kappa = kappa;
    const SparseMatrix a = random_with_spectrum(o, 11);
    const Eigen::VectorXd sv = oracle::singular_values(a);
    const std::vector<double> want = geometric_spectrum(o.n, kappa);
    for (Index i = 0; i < o.n; ++i) EXPECT_NEAR(sv(i), want[i], 1e-13 * o.n) << "kappa=" << kappa;
    EXPECT_LT(a.nnz(), o.n * o.n);
  }
}

TEST(RandomWithSpectrum, RejectsBadOptions) {
  SpectrumOptions o;
  o.n = 0;
  EXPECT_THROW(random_with_spectrum(o, 1), InvalidArgument);
  o = SpectrumOptions{};
  o.kappa = 0.5;
  EXPECT_THROW(random_with_spectrum(o, 1), InvalidArgument);
  o = SpectrumOptions{};
  o.window = 0;
  EXPECT_THROW(random_with_spectrum(o, 1), InvalidArgument);
  o = SpectrumOptions{};
  o.layers = -1;
  EXPECT_THROW(random_with_spectrum(o, 1), InvalidArgument);
}
