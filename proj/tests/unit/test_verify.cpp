#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "verisparse/generate.hpp"
#include "verisparse/report.hpp"
#include "verisparse/verify.hpp"

using namespace verisparse;

namespace {

SparseMatrix spectrum_matrix(std::mt19937_64& rng, Index n, double max_log_kappa) {
  SpectrumOptions o;
  o.n = n;
  o.kappa = std::pow(10.0, std::uniform_real_distribution<double>(0, max_log_kappa)(rng));
  return random_with_spectrum(o, rng());
}

// Copy of f with the last bit of one off-diagonal L entry flipped.
LdltFactors flip_one_entry(const LdltFactors& f) {
  std::vector<Triplet> t;
  bool flipped = false;
  for (Index j = 0; j < f.lower.cols(); ++j) {
    for (Index p = f.lower.col_ptr()[j]; p < f.lower.col_ptr()[j + 1]; ++p) {
      double v = f.lower.values()[p];
      const Index i = f.lower.row_idx()[p];
      if (!flipped && i != j && v != 0) {
        v = std::nextafter(v, kInf);
        flipped = true;
      }
      t.push_back({i, j, v});
    }
  }
  LdltFactors g = f;
  g.lower = SparseMatrix::from_triplets(f.lower.rows(), f.lower.cols(), t);
  return g;
}

}  // namespace

TEST(ResidualNormBound, ExactFactorsOfShiftedIdentity) {
  const SparseMatrix a_bar = augment(SparseMatrix::identity(4));
  const SparseMatrix s = add_diagonal(a_bar, 0.5);
  const LdltFactors f = ldlt(s);
  EXPECT_EQ(residual_norm_bound(a_bar, 0.5, f), 0.0);
  EXPECT_EQ(residual_norm_bound(s, f), 0.0);
  EXPECT_EQ(residual_norm_bound(s, f, Accuracy::fast), 0.0);
}

TEST(ResidualNormBound, DetectsOneBitPerturbation) {
  std::mt19937_64 rng(401);
  const SparseMatrix a = oracle::random_sparse(rng, 10, 0.3, true);
  const SparseMatrix s = add_diagonal(augment(a), 0.25);
  const LdltFactors f = ldlt(s);
  const LdltFactors g = flip_one_entry(f);
  EXPECT_GT(residual_norm_bound(s, g), 0.0);
  EXPECT_GT(residual_norm_bound(s, g, Accuracy::fast), 0.0);
}

TEST(ResidualNormBound, AboveDenseResidualNorm) {
  std::mt19937_64 rng(403);
  for (int t = 0; t < 20; ++t) {
    const SparseMatrix a = oracle::random_sparse(rng, 40, 0.1, true);
    const double theta = 0.3 * oracle::sigma_min(a);
    const SparseMatrix a_bar = augment(a);
    const SparseMatrix s = add_diagonal(a_bar, theta);
    const LdltFactors f = ldlt(s);
    // Residual in rational arithmetic, then its 2-norm with Eigen.
    const SparseMatrix ps = s.permute(f.perm, f.perm);
    const std::vector<oracle::Q> ldl = [&] {
      const Index m = f.lower.rows();
      const std::vector<oracle::Q> l = oracle::exact_dense(f.lower);
      const std::vector<oracle::Q> dlt_q = oracle::exact_product(f.d.to_sparse(), f.lower.transpose());
      std::vector<oracle::Q> out(m * m);
      for (Index i = 0; i < m; ++i)
        for (Index k = 0; k < m; ++k) {
          if (l[i * m + k] == 0) continue;
          for (Index j = 0; j < m; ++j) out[i * m + j] += l[i * m + k] * dlt_q[k * m + j];
        }
      return out;
    }();
    const std::vector<oracle::Q> psq = oracle::exact_dense(ps);
    const Index m = ps.rows();
    Eigen::MatrixXd r(m, m);
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < m; ++j) r(i, j) = oracle::Q(psq[i * m + j] - ldl[i * m + j]).get_d();
    const double truth = r.jacobiSvd().singularValues()(0);
    for (const Accuracy acc : {Accuracy::sharp, Accuracy::fast}) {
      const double rho = residual_norm_bound(a_bar, theta, f, acc);
      EXPECT_GE(rho, truth * (1 - 1e-10));
      EXPECT_EQ(rho, residual_norm_bound(s, f, acc));
    }
  }
}

TEST(VerifySigmin, Identity) {
  const Certificate c = verify_sigmin(SparseMatrix::identity(5));
  ASSERT_TRUE(c.verified()) << c.message;
  EXPECT_EQ(c.theta, 0.5);
  EXPECT_EQ(c.rho, 0.0);
  EXPECT_EQ(c.delta, 0.5);
  EXPECT_EQ(c.inv_norm_bound, 2.0);
  EXPECT_EQ(c.delta_original, 0.5);
  EXPECT_EQ(c.counts, (Inertia{5, 5, 0}));
  EXPECT_EQ(c.attempts.size(), 1u);
  EXPECT_EQ(c.matrix, fingerprint(SparseMatrix::identity(5)));
}

TEST(VerifySigmin, SingularIsNotVerified) {
  const SparseMatrix ones = SparseMatrix::from_dense(2, 2, std::vector<double>{1, 1, 1, 1});
  for (const bool precond : {false, true}) {
    VerifyOptions o;
    o.precond = precond;
    const Certificate c = verify_sigmin(ones, o);
    EXPECT_FALSE(c.verified());
    EXPECT_EQ(c.delta, 0.0);
    EXPECT_EQ(c.delta_original, 0.0);
    EXPECT_EQ(c.inv_norm_bound, kInf);
  }
  EXPECT_FALSE(verify_sigmin(SparseMatrix(3, 3)).verified());
}

TEST(VerifySigmin, RejectsBadInput) {
  EXPECT_THROW(verify_sigmin(SparseMatrix(2, 3)), InvalidArgument);
  EXPECT_THROW(verify_sigmin(SparseMatrix(0, 0)), InvalidArgument);
  VerifyOptions o;
  o.policy.initial_fraction = 2;
  EXPECT_THROW(verify_sigmin(SparseMatrix::identity(2), o), InvalidArgument);
}

TEST(VerifySigmin, NonFiniteEntryFailsCleanly) {
  const std::vector<Triplet> t{{0, 0, 1.0}, {1, 1, std::numeric_limits<double>::quiet_NaN()}};
  const Certificate c = verify_sigmin(SparseMatrix::from_triplets(2, 2, t));
  EXPECT_FALSE(c.verified());
}

TEST(VerifySigmin, CertificateInvariants) {
  std::mt19937_64 rng(409);
  for (int t = 0; t < 40; ++t) {
    const SparseMatrix a = spectrum_matrix(rng, 30, 10);
    VerifyOptions o;
    o.precond = t % 2;
    o.acc = t % 3 == 0;
    const Certificate c = verify_sigmin(a, o);
    if (!c.verified()) continue;
    EXPECT_EQ(c.counts, (Inertia{30, 30, 0}));
    EXPECT_LT(c.rho, c.theta);
    EXPECT_EQ(c.delta, sub_down(c.theta, c.rho));
    EXPECT_EQ(c.inv_norm_bound, div_up(1.0, c.delta));
    EXPECT_GE(c.delta * c.inv_norm_bound, 1 - 2 * 0x1p-52);
    EXPECT_EQ(c.equilibration.has_value(), o.precond);
    if (!o.precond) {
      EXPECT_EQ(c.delta_original, c.delta);
    }
    EXPECT_EQ(c.attempts.back().outcome, VerifyStatus::verified);
    // Shrink-only after inertia failures, grow-only after residual failures.
    for (size_t i = 0; i + 1 < c.attempts.size(); ++i) {
      for (size_t k = i + 1; k < c.attempts.size(); ++k) {
        if (c.attempts[i].outcome == VerifyStatus::failed_inertia) {
          EXPECT_LT(c.attempts[k].theta, c.attempts[i].theta);
        }
        if (c.attempts[i].outcome == VerifyStatus::failed_residual) {
          EXPECT_GT(c.attempts[k].theta, c.attempts[i].theta);
        }
      }
    }
  }
}

TEST(VerifySigmin, SoundAgainstSvd) {
  std::mt19937_64 rng(411);
  int verified = 0;
  for (int t = 0; t < 120; ++t) {
    const Index n = std::uniform_int_distribution<Index>(5, 60)(rng);
    const SparseMatrix a = t % 3 == 0 ? oracle::random_sparse(rng, n, 0.15, true) : spectrum_matrix(rng, n, 12);
    VerifyOptions o;
    o.precond = t % 2;
    o.acc = (t / 2) % 2;
    const Certificate c = verify_sigmin(a, o);
    if (!c.verified()) continue;
    ++verified;
    EXPECT_GT(c.delta_original, 0.0);
    EXPECT_LE(c.delta_original, oracle::sigma_min(a) + oracle::svd_error_bound(a)) << "trial " << t;
  }
  EXPECT_GT(verified, 60);
}

TEST(CheckCertificate, ValidInflatedAndRoundTrip) {
  std::mt19937_64 rng(413);
  const SparseMatrix id = SparseMatrix::identity(3);
  EXPECT_TRUE(check_certificate(id, verify_sigmin(id)));
  for (const bool precond : {false, true}) {
    const SparseMatrix a = spectrum_matrix(rng, 25, 6);
    VerifyOptions o;
    o.precond = precond;
    const Certificate c = verify_sigmin(a, o);
    ASSERT_TRUE(c.verified()) << c.message;
    EXPECT_TRUE(check_certificate(a, c));
    Certificate inflated = c;
    inflated.delta *= 1.1;
    EXPECT_FALSE(check_certificate(a, inflated));
    inflated = c;
    inflated.delta_original *= 1.1;
    EXPECT_FALSE(check_certificate(a, inflated));
    inflated = c;
    inflated.inv_norm_bound_original *= 0.9;
    EXPECT_FALSE(check_certificate(a, inflated));
    const Certificate back = certificate_from_json(nlohmann::json::parse(certificate_to_json(c).dump()));
    EXPECT_TRUE(check_certificate(a, back));
    // A different matrix does not match.
    SparseMatrix other = add_diagonal(a, 1e-3);
    EXPECT_FALSE(check_certificate(other, c));
  }
  Certificate failed = verify_sigmin(SparseMatrix::from_dense(2, 2, std::vector<double>{1, 1, 1, 1}));
  EXPECT_FALSE(check_certificate(SparseMatrix::from_dense(2, 2, std::vector<double>{1, 1, 1, 1}), failed));
}

TEST(VerifyAndFactor, ReturnsFactorsOfVerifiedSystem) {
  const SparseMatrix a = SparseMatrix::diagonal(std::vector<double>{2, 3, 4});
  const Verification v = verify_and_factor(a);
  ASSERT_TRUE(v.certificate.verified());
  ASSERT_TRUE(v.factors);
  EXPECT_EQ(v.system, a);
  EXPECT_EQ(v.factors->perm, v.certificate.ordering);
  VerifyOptions o;
  o.precond = true;
  const Verification w = verify_and_factor(a, o);
  ASSERT_TRUE(w.certificate.verified());
  EXPECT_EQ(w.system, apply_equilibration(*w.certificate.equilibration, a));
}

TEST(VerifyStatus, Names) {
  EXPECT_STREQ(to_string(VerifyStatus::verified), "verified");
  EXPECT_STREQ(to_string(VerifyStatus::failed_inertia), "failed_inertia");
  EXPECT_STREQ(to_string(VerifyStatus::failed_residual), "failed_residual");
  EXPECT_STREQ(to_string(VerifyStatus::failed_breakdown), "failed_breakdown");
}
