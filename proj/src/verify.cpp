#include "verisparse/verify.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "verisparse/eft.hpp"
#include "verisparse/error.hpp"
#include "verisparse/ordering.hpp"
#include "verisparse/rounding.hpp"

namespace verisparse {

const char* to_string(VerifyStatus s) {
  switch (s) {
    case VerifyStatus::verified: return "verified";
    case VerifyStatus::failed_inertia: return "failed_inertia";
    case VerifyStatus::failed_residual: return "failed_residual";
    case VerifyStatus::failed_breakdown: return "failed_breakdown";
  }
  return "unknown";
}

bool operator==(const AttemptRecord& x, const AttemptRecord& y) {
  return std::bit_cast<std::uint64_t>(x.theta) == std::bit_cast<std::uint64_t>(y.theta) &&
         std::bit_cast<std::uint64_t>(x.rho) == std::bit_cast<std::uint64_t>(y.rho) && x.counts == y.counts &&
         x.outcome == y.outcome;
}

MatrixFingerprint fingerprint(const SparseMatrix& a) { return {a.rows(), a.nnz(), content_hash(a)}; }

namespace {

// Interval enclosure of L D, column by column.
IntervalSparseMatrix lower_times_diag(const LdltFactors& f) {
  const Index n = f.dim();
  const auto cp = f.lower.col_ptr();
  const auto ri = f.lower.row_idx();
  const auto lv = f.lower.values();
  std::vector<Index> col_ptr{0};
  std::vector<Index> rows;
  std::vector<double> lo, hi;
  const auto push = [&](Index i, const Interval& v) {
    rows.push_back(i);
    lo.push_back(v.lo());
    hi.push_back(v.hi());
  };
  for (const auto& b : f.d.blocks) {
    const Index k = b.first;
    if (b.size == 1) {
      const Interval d(b.a);
      for (Index p = cp[k]; p < cp[k + 1]; ++p) push(ri[p], Interval(lv[p]) * d);
      col_ptr.push_back(static_cast<Index>(rows.size()));
      continue;
    }
    // Columns k and k+1 mix L(:, k) and L(:, k+1) with [[a, b], [b, c]].
    const Interval a(b.a), bb(b.b), c(b.c);
    for (int side = 0; side < 2; ++side) {
      const Interval& w0 = side == 0 ? a : bb;
      const Interval& w1 = side == 0 ? bb : c;
      Index x = cp[k], y = cp[k + 1];
      const Index xe = cp[k + 1], ye = cp[k + 2];
      while (x < xe || y < ye) {
        if (y == ye || (x < xe && ri[x] < ri[y])) {
          push(ri[x], Interval(lv[x]) * w0);
          ++x;
        } else if (x == xe || ri[y] < ri[x]) {
          push(ri[y], Interval(lv[y]) * w1);
          ++y;
        } else {
          push(ri[x], Interval(lv[x]) * w0 + Interval(lv[y]) * w1);
          ++x;
          ++y;
        }
      }
      col_ptr.push_back(static_cast<Index>(rows.size()));
    }
  }
  return IntervalSparseMatrix(n, n, std::move(col_ptr), std::move(rows), std::move(lo), std::move(hi));
}

Certificate base_certificate(const SparseMatrix& a, const VerifyOptions& opts) {
  Certificate cert;
  cert.precond = opts.precond;
  cert.acc = opts.acc;
  cert.pivoting = opts.pivoting;
  cert.policy = opts.policy;
  cert.matrix = fingerprint(a);
  cert.inv_norm_bound = kInf;
  cert.inv_norm_bound_original = kInf;
  return cert;
}

// inv * delta >= 1, decided exactly.
bool product_at_least_one(double inv, double delta) {
  if (!(inv > 0) || !(delta > 0)) return false;
  if (!std::isfinite(inv)) return true;
  const auto [p, e] = two_prod(inv, delta);
  if (std::fabs(p) < 0x1p-900) return false;
  return p > 1 || (p == 1 && e >= 0);
}

}  // namespace

double residual_norm_bound(const SparseMatrix& shifted, const LdltFactors& f, Accuracy accuracy) {
  const Index n = f.dim();
  if (!shifted.is_square() || shifted.rows() != n || !f.d.valid() || f.d.dim() != n) {
    throw DimensionMismatch("residual_norm_bound: factors do not match the matrix");
  }
  const IntervalSparseMatrix ld = lower_times_diag(f);
  const IntervalSparseMatrix product = spgemm_interval(IntervalSparseMatrix(f.lower), ld.transpose(), accuracy);
  const IntervalSparseMatrix permuted(shifted.permute(f.perm, f.perm));
  return spectral_norm_bound(subtract(permuted, product));
}

double residual_norm_bound(const SparseMatrix& a_bar, double theta, const LdltFactors& f, Accuracy accuracy) {
  return residual_norm_bound(add_diagonal(a_bar, theta), f, accuracy);
}

Verification verify_and_factor(const SparseMatrix& a, const VerifyOptions& opts) {
  if (!a.is_square() || a.rows() == 0) throw InvalidArgument("verify_sigmin: need a nonempty square matrix");
  opts.policy.validate();
  Verification out;
  Certificate& cert = out.certificate;
  cert = base_certificate(a, opts);
  const Index n = a.rows();
  const auto fail = [&](VerifyStatus s, std::string why) {
    cert.status = s;
    cert.message = std::move(why);
    return std::move(out);
  };

  for (const double v : a.values()) {
    if (!std::isfinite(v)) return fail(VerifyStatus::failed_breakdown, "matrix has non-finite entries");
  }
  out.system = a;
  if (opts.precond) {
    try {
      auto [eq, scaled] = equilibrate(a);
      cert.equilibration = std::move(eq);
      out.system = std::move(scaled);
    } catch (const Error& e) {
      return fail(VerifyStatus::failed_breakdown, e.what());
    }
  }

  if (opts.sigma_estimate) {
    cert.sigma_estimate = *opts.sigma_estimate;
    if (!(cert.sigma_estimate > 0) || !std::isfinite(cert.sigma_estimate)) {
      throw InvalidArgument("verify_sigmin: supplied estimate must be positive and finite");
    }
  } else {
    try {
      cert.sigma_estimate = estimate_sigma_min(out.system);
    } catch (const Error& e) {
      return fail(VerifyStatus::failed_breakdown, e.what());
    }
  }

  const SparseMatrix aug = augment(out.system);
  cert.ordering = fill_reducing_order(aug);
  const Accuracy accuracy = opts.acc ? Accuracy::sharp : Accuracy::fast;
  ShiftState state;
  VerifyStatus last_failure = VerifyStatus::failed_breakdown;
  for (;;) {
    const auto next = choose_theta(cert.sigma_estimate, opts.policy, state);
    if (!next) return fail(last_failure, "retry budget exhausted");
    const double theta = *next;
    AttemptRecord rec;
    rec.theta = theta;
    rec.rho = std::numeric_limits<double>::quiet_NaN();
    cert.theta = theta;
    const SparseMatrix shifted = add_diagonal(aug, theta);
    std::optional<LdltFactors> f;
    try {
      f = ldlt(shifted, cert.ordering, opts.pivoting);
    } catch (const FactorizationBreakdown&) {
      rec.outcome = last_failure = VerifyStatus::failed_breakdown;
      cert.attempts.push_back(rec);
      state.failures.push_back({theta, 0.0, ShiftFailure::inertia});
      continue;
    }
    const Inertia in = inertia(f->d);
    rec.counts = in;
    cert.counts = in;
    if (in.positive != n || in.negative != n) {
      rec.outcome = last_failure = VerifyStatus::failed_inertia;
      cert.attempts.push_back(rec);
      state.failures.push_back({theta, 0.0, ShiftFailure::inertia});
      continue;
    }
    const double rho = residual_norm_bound(shifted, *f, accuracy);
    rec.rho = rho;
    cert.rho = rho;
    const double delta = rho < theta ? sub_down(theta, rho) : 0.0;
    if (!(delta > 0)) {
      rec.outcome = last_failure = VerifyStatus::failed_residual;
      cert.attempts.push_back(rec);
      state.failures.push_back({theta, rho, ShiftFailure::residual});
      continue;
    }
    rec.outcome = VerifyStatus::verified;
    cert.attempts.push_back(rec);
    cert.status = VerifyStatus::verified;
    cert.delta = delta;
    cert.inv_norm_bound = div_up(1.0, delta);
    cert.delta_original = cert.equilibration ? sigma_back_propagate(delta, *cert.equilibration) : delta;
    cert.inv_norm_bound_original = div_up(1.0, cert.delta_original);
    out.factors = std::move(f);
    return out;
  }
}

Certificate verify_sigmin(const SparseMatrix& a, const VerifyOptions& opts) {
  return verify_and_factor(a, opts).certificate;
}

bool check_certificate(const SparseMatrix& a, const Certificate& cert) {
  if (!cert.verified() || !a.is_square() || a.rows() == 0) return false;
  if (!(cert.matrix == fingerprint(a))) return false;
  if (cert.precond != cert.equilibration.has_value()) return false;
  const Index n = a.rows();
  if (!(cert.theta > 0) || !std::isfinite(cert.theta) || !(cert.rho >= 0) || !(cert.rho < cert.theta)) return false;
  if (!is_permutation(cert.ordering, 2 * n)) return false;
  try {
    const SparseMatrix system = cert.equilibration ? apply_equilibration(*cert.equilibration, a) : a;
    const SparseMatrix shifted = add_diagonal(augment(system), cert.theta);
    const LdltFactors f = ldlt(shifted, cert.ordering, cert.pivoting);
    const Inertia in = inertia(f.d);
    if (in.positive != n || in.negative != n || in.zero != 0 || !(in == cert.counts)) return false;
    const double rho = residual_norm_bound(shifted, f, cert.acc ? Accuracy::sharp : Accuracy::fast);
    if (!(rho <= cert.rho)) return false;
  } catch (const Error&) {
    return false;
  }
  if (!(cert.delta > 0) || cert.delta > sub_down(cert.theta, cert.rho)) return false;
  if (!product_at_least_one(cert.inv_norm_bound, cert.delta)) return false;
  const double bound = cert.equilibration ? sigma_back_propagate(cert.delta, *cert.equilibration) : cert.delta;
  if (!(cert.delta_original > 0) || cert.delta_original > bound) return false;
  return product_at_least_one(cert.inv_norm_bound_original, cert.delta_original);
}

}  // namespace verisparse
