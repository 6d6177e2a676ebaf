#include "verisparse/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "verisparse/eft.hpp"
#include "verisparse/error.hpp"
#include "verisparse/interval.hpp"
#include "verisparse/rounding.hpp"

namespace verisparse {

namespace {

std::size_t at(Index n, Index i, Index j) { return static_cast<std::size_t>(j * n + i); }

// gamma_m = m u / (1 - m u), rounded upward.
double gamma_up(Index m) {
  const double mu = mul_up(static_cast<double>(m), kUnitRoundoff);
  return div_up(mu, sub_down(1.0, mu));
}

}  // namespace

bool verify_spd(const IntervalSparseMatrix& s) {
  const Index n = s.rows();
  if (s.cols() != n) return false;
  if (n == 0) return true;
  // Symmetric members lie in the intersection of s and s^T, which is itself
  // symmetric.
  std::vector<Interval> h(static_cast<std::size_t>(n * n), Interval(0.0));
  for (Index j = 0; j < n; ++j) {
    for (Index p = s.col_ptr()[j]; p < s.col_ptr()[j + 1]; ++p) h[at(n, s.row_idx()[p], j)] = s.entry(p);
  }
  for (Index j = 0; j < n; ++j) {
    for (Index i = j + 1; i < n; ++i) {
      const Interval& x = h[at(n, i, j)];
      const Interval& y = h[at(n, j, i)];
      const double lo = std::max(x.lo(), y.lo());
      const double hi = std::min(x.hi(), y.hi());
      if (lo > hi) return false;  // no symmetric member; nothing to certify
      h[at(n, i, j)] = h[at(n, j, i)] = Interval(lo, hi);
    }
  }
  std::vector<double> mid(static_cast<std::size_t>(n * n), 0.0);
  double rad_norm = 0.0;  // ||rad||_2 <= ||rad||_inf for a symmetric radius
  for (Index i = 0; i < n; ++i) {
    double row = 0.0;
    for (Index j = 0; j < n; ++j) {
      const Interval& x = h[at(n, i, j)];
      if (!std::isfinite(x.lo()) || !std::isfinite(x.hi())) return false;
      mid[at(n, i, j)] = x.mid();
      row = add_up(row, x.rad());
    }
    rad_norm = std::max(rad_norm, row);
  }

  double trace = 0.0;
  double max_diag = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double d = mid[at(n, i, i)];
    if (!(d > 0)) return false;
    trace = add_up(trace, d);
    max_diag = std::max(max_diag, d);
  }
  // Shift covering the Cholesky rounding error (relative part, with the
  // underflow part bounded by a multiple of the smallest subnormal) and the
  // radius.
  const double g = gamma_up(n + 1);
  const double rel = mul_up(div_up(g, sub_down(1.0, g)), trace);
  const double nn = static_cast<double>(n);
  const double tiny = mul_up(mul_up(4.0 * nn, add_up(2.0 * nn + 4.0, max_diag)), kEta);
  const double shift = add_up(add_up(rel, tiny), rad_norm);
  if (!std::isfinite(shift)) return false;

  std::vector<double> g_factor(static_cast<std::size_t>(n * n), 0.0);
  for (Index i = 0; i < n; ++i) mid[at(n, i, i)] = sub_down(mid[at(n, i, i)], shift);
  for (Index j = 0; j < n; ++j) {
    double d = mid[at(n, j, j)];
    for (Index k = 0; k < j; ++k) d -= g_factor[at(n, j, k)] * g_factor[at(n, j, k)];
    if (!(d > 0)) return false;
    const double gjj = std::sqrt(d);
    g_factor[at(n, j, j)] = gjj;
    for (Index i = j + 1; i < n; ++i) {
      double t = mid[at(n, i, j)];
      for (Index k = 0; k < j; ++k) t -= g_factor[at(n, i, k)] * g_factor[at(n, j, k)];
      g_factor[at(n, i, j)] = t / gjj;
      if (!std::isfinite(g_factor[at(n, i, j)])) return false;
    }
  }
  return true;
}

std::optional<double> sigmin_normal_eq(const SparseMatrix& a, double alpha) {
  if (!a.is_square()) throw InvalidArgument("sigmin_normal_eq: matrix is not square");
  if (!(alpha >= 0) || !std::isfinite(alpha)) throw InvalidArgument("sigmin_normal_eq: alpha must be >= 0");
  const IntervalSparseMatrix ata =
      spgemm_interval(IntervalSparseMatrix(a.transpose()), IntervalSparseMatrix(a), Accuracy::sharp);
  const std::vector<double> shift(a.rows(), alpha);
  const IntervalSparseMatrix s = subtract(ata, IntervalSparseMatrix(SparseMatrix::diagonal(shift)));
  if (!verify_spd(s)) return std::nullopt;
  return sqrt_down(alpha);
}

namespace {

// Dense column-major inverses of unit lower and upper triangular factors.
std::vector<double> inverse_unit_lower(const SparseMatrix& l) {
  const Index n = l.rows();
  std::vector<double> x(static_cast<std::size_t>(n * n), 0.0);
  for (Index j = 0; j < n; ++j) {
    double* col = &x[at(n, 0, j)];
    col[j] = 1.0;
    for (Index k = j; k < n; ++k) {
      const double xk = col[k];
      if (xk == 0) continue;
      for (Index p = l.col_ptr()[k] + 1; p < l.col_ptr()[k + 1]; ++p) col[l.row_idx()[p]] -= l.values()[p] * xk;
    }
  }
  return x;
}

std::vector<double> inverse_upper(const SparseMatrix& u) {
  const Index n = u.rows();
  std::vector<double> x(static_cast<std::size_t>(n * n), 0.0);
  for (Index j = 0; j < n; ++j) {
    double* col = &x[at(n, 0, j)];
    col[j] = 1.0;
    for (Index k = j; k >= 0; --k) {
      if (col[k] == 0) continue;
      const Index last = u.col_ptr()[k + 1] - 1;
      col[k] /= u.values()[last];
      const double xk = col[k];
      for (Index p = u.col_ptr()[k]; p < last; ++p) col[u.row_idx()[p]] -= u.values()[p] * xk;
    }
  }
  return x;
}

using IntervalDense = std::vector<Interval>;

// X * B for dense point X and sparse B.
IntervalDense dense_times_sparse(Index n, const std::vector<double>& x, const SparseMatrix& b) {
  IntervalDense out(static_cast<std::size_t>(n * n), Interval(0.0));
  for (Index j = 0; j < n; ++j) {
    for (Index p = b.col_ptr()[j]; p < b.col_ptr()[j + 1]; ++p) {
      const Index k = b.row_idx()[p];
      const Interval bk(b.values()[p]);
      for (Index i = 0; i < n; ++i) {
        const double xik = x[at(n, i, k)];
        if (xik != 0) out[at(n, i, j)] += Interval(xik) * bk;
      }
    }
  }
  return out;
}

// F * X for dense interval F and dense point X.
IntervalDense interval_times_dense(Index n, const IntervalDense& f, const std::vector<double>& x) {
  IntervalDense out(static_cast<std::size_t>(n * n), Interval(0.0));
  for (Index j = 0; j < n; ++j) {
    for (Index k = 0; k < n; ++k) {
      const double xkj = x[at(n, k, j)];
      if (xkj == 0) continue;
      const Interval xi(xkj);
      for (Index i = 0; i < n; ++i) {
        const Interval& fik = f[at(n, i, k)];
        if (fik.lo() != 0 || fik.hi() != 0) out[at(n, i, j)] += fik * xi;
      }
    }
  }
  return out;
}

// S * X for sparse point S and dense point X.
IntervalDense sparse_times_dense(Index n, const SparseMatrix& s, const std::vector<double>& x) {
  IntervalDense out(static_cast<std::size_t>(n * n), Interval(0.0));
  for (Index j = 0; j < n; ++j) {
    for (Index k = 0; k < n; ++k) {
      const double xkj = x[at(n, k, j)];
      if (xkj == 0) continue;
      const Interval xi(xkj);
      for (Index p = s.col_ptr()[k]; p < s.col_ptr()[k + 1]; ++p) {
        out[at(n, s.row_idx()[p], j)] += Interval(s.values()[p]) * xi;
      }
    }
  }
  return out;
}

// Upper bound on ||M - I - sub||_p over the members; I is subtracted only
// when minus_identity is set and sub is an optional sparse point matrix.
double dense_norm_bound(Index n, const IntervalDense& m, Norm p, bool minus_identity,
                        const SparseMatrix* sub = nullptr) {
  std::vector<double> sums(n, 0.0);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      Interval x = m[at(n, i, j)];
      if (minus_identity && i == j) x = x - Interval(1.0);
      if (sub != nullptr) {
        const double s = sub->coeff(i, j);
        if (s != 0) x = x - Interval(s);
      }
      const Index slot = p == Norm::inf ? i : j;
      sums[slot] = add_up(sums[slot], x.mag());
    }
  }
  double best = 0.0;
  for (const double s : sums) best = std::max(best, s);
  return best;
}

double point_norm_bound(Index n, const std::vector<double>& x, Norm p) {
  std::vector<double> sums(n, 0.0);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      const Index slot = p == Norm::inf ? i : j;
      sums[slot] = add_up(sums[slot], std::fabs(x[at(n, i, j)]));
    }
  }
  double best = 0.0;
  for (const double s : sums) best = std::max(best, s);
  return best;
}

double fill_ratio(const LuFactors& f, const std::vector<double>& xl, const std::vector<double>& xu) {
  const auto nz = [](const std::vector<double>& v) {
    return static_cast<double>(std::count_if(v.begin(), v.end(), [](double x) { return x != 0; }));
  };
  return (nz(xl) + nz(xu)) / static_cast<double>(f.lower.nnz() + f.upper.nnz());
}

struct InverseFactors {
  LuFactors f;
  SparseMatrix paq;
  std::vector<double> xl;
  std::vector<double> xu;
};

std::optional<InverseFactors> inverse_factors(const SparseMatrix& a) {
  if (!a.is_square()) throw InvalidArgument("inverse factors: matrix is not square");
  InverseFactors out;
  try {
    out.f = lu(a);
  } catch (const FactorizationBreakdown&) {
    return std::nullopt;
  }
  out.paq = a.permute(out.f.row_perm, out.f.col_perm);
  out.xl = inverse_unit_lower(out.f.lower);
  out.xu = inverse_upper(out.f.upper);
  const auto finite = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  if (!finite(out.xl) || !finite(out.xu)) return std::nullopt;
  return out;
}

std::optional<InverseNormBound> lu_test(const InverseFactors& inv, const IntervalDense& xla, Norm p) {
  const Index n = inv.f.dim();
  const IntervalDense t = interval_times_dense(n, xla, inv.xu);
  const double rho = dense_norm_bound(n, t, p, true);
  if (!(rho < 1)) return std::nullopt;
  InverseNormBound b;
  b.p = p;
  b.contraction = rho;
  b.method = InverseNormMethod::lu;
  b.bound = div_up(mul_up(point_norm_bound(n, inv.xu, p), point_norm_bound(n, inv.xl, p)), sub_down(1.0, rho));
  b.inverse_fill_ratio = fill_ratio(inv.f, inv.xl, inv.xu);
  return b;
}

}  // namespace

std::optional<InverseNormBound> inv_norm_lu(const SparseMatrix& a, Norm p) {
  const auto inv = inverse_factors(a);
  if (!inv) return std::nullopt;
  const IntervalDense xla = dense_times_sparse(a.rows(), inv->xl, inv->paq);
  return lu_test(*inv, xla, p);
}

std::optional<InverseNormBound> inv_norm_lu_modified(const SparseMatrix& a, Norm p) {
  const auto inv = inverse_factors(a);
  if (!inv) return std::nullopt;
  const Index n = a.rows();
  const IntervalDense xla = dense_times_sparse(n, inv->xl, inv->paq);
  const double norm_xu = point_norm_bound(n, inv->xu, p);
  const double alpha = mul_up(dense_norm_bound(n, xla, p, false, &inv->f.upper), norm_xu);
  if (alpha < 1) {
    const IntervalDense uxu = sparse_times_dense(n, inv->f.upper, inv->xu);
    const double beta = dense_norm_bound(n, uxu, p, true);
    const double sum = add_up(alpha, beta);
    if (sum < 1) {
      InverseNormBound b;
      b.p = p;
      b.contraction = sum;
      b.method = InverseNormMethod::lu_modified;
      b.bound = div_up(mul_up(point_norm_bound(n, inv->xl, p), norm_xu), sub_down(1.0, sum));
      b.inverse_fill_ratio = fill_ratio(inv->f, inv->xl, inv->xu);
      return b;
    }
  }
  return lu_test(*inv, xla, p);
}

std::optional<ComponentwiseBound> componentwise_inverse_bound(const SparseMatrix& a, std::span<const double> v) {
  if (!a.is_square()) throw InvalidArgument("componentwise_inverse_bound: matrix is not square");
  const Index n = a.rows();
  if (!v.empty()) {
    if (static_cast<Index>(v.size()) != n) throw InvalidArgument("componentwise_inverse_bound: v has wrong length");
    for (const double x : v) {
      if (!(x > 0) || !std::isfinite(x)) throw InvalidArgument("componentwise_inverse_bound: v must be positive");
    }
  }
  auto inv = inverse_factors(a);
  if (!inv) return std::nullopt;
  const IntervalDense t = interval_times_dense(n, dense_times_sparse(n, inv->xl, inv->paq), inv->xu);

  ComponentwiseBound cb;
  cb.n_ = n;
  // Comparison matrix H = D - E: D_ii >= 0 lower bounds, E_ij upper bounds.
  std::vector<double> d(n);
  for (Index i = 0; i < n; ++i) {
    d[i] = t[at(n, i, i)].mig();
    if (!(d[i] > 0)) return std::nullopt;
  }
  const auto e = [&](Index i, Index j) { return i == j ? 0.0 : t[at(n, i, j)].mag(); };

  if (!v.empty()) {
    cb.v_.assign(v.begin(), v.end());
  } else {
    // Unverified solve of mid(H) v = ones by Gaussian elimination with
    // partial pivoting.
    std::vector<double> h(static_cast<std::size_t>(n * n));
    for (Index j = 0; j < n; ++j) {
      for (Index i = 0; i < n; ++i) h[at(n, i, j)] = i == j ? std::fabs(t[at(n, i, i)].mid()) : -std::fabs(t[at(n, i, j)].mid());
    }
    std::vector<double> rhs(n, 1.0);
    bool ok = true;
    for (Index k = 0; k < n && ok; ++k) {
      Index piv = k;
      for (Index i = k + 1; i < n; ++i) {
        if (std::fabs(h[at(n, i, k)]) > std::fabs(h[at(n, piv, k)])) piv = i;
      }
      if (h[at(n, piv, k)] == 0) {
        ok = false;
        break;
      }
      if (piv != k) {
        for (Index j = 0; j < n; ++j) std::swap(h[at(n, k, j)], h[at(n, piv, j)]);
        std::swap(rhs[k], rhs[piv]);
      }
      for (Index i = k + 1; i < n; ++i) {
        const double l = h[at(n, i, k)] / h[at(n, k, k)];
        if (l == 0) continue;
        for (Index j = k; j < n; ++j) h[at(n, i, j)] -= l * h[at(n, k, j)];
        rhs[i] -= l * rhs[k];
      }
    }
    if (ok) {
      for (Index k = n - 1; k >= 0; --k) {
        double s = rhs[k];
        for (Index j = k + 1; j < n; ++j) s -= h[at(n, k, j)] * rhs[j];
        rhs[k] = s / h[at(n, k, k)];
      }
      ok = std::all_of(rhs.begin(), rhs.end(), [](double x) { return x > 0 && std::isfinite(x); });
    }
    cb.v_ = ok ? rhs : std::vector<double>(n, 1.0);
  }

  // u = H v > 0, rounded downward.
  cb.u_.assign(n, 0.0);
  for (Index i = 0; i < n; ++i) {
    double off = 0.0;
    for (Index j = 0; j < n; ++j) off = add_up(off, mul_up(e(i, j), cb.v_[j]));
    cb.u_[i] = sub_down(mul_down(d[i], cb.v_[i]), off);
    if (!(cb.u_[i] > 0)) return std::nullopt;
  }
  // G = E D^-1 and w_k = max_i G_ik / u_i, rounded upward.
  cb.w_.assign(n, 0.0);
  cb.dinv_.assign(n, 0.0);
  for (Index k = 0; k < n; ++k) {
    cb.dinv_[k] = div_up(1.0, d[k]);
    for (Index i = 0; i < n; ++i) {
      const double gik = div_up(e(i, k), d[k]);
      cb.w_[k] = std::max(cb.w_[k], div_up(gik, cb.u_[i]));
    }
  }
  cb.f_ = std::move(inv->f);
  cb.xl_ = std::move(inv->xl);
  cb.xu_ = std::move(inv->xu);
  return cb;
}

std::vector<double> ComponentwiseBound::error_bound(const SparseMatrix& a, std::span<const double> b,
                                                    std::span<const double> x) const {
  const Index n = n_;
  if (a.rows() != n || a.cols() != n || static_cast<Index>(b.size()) != n || static_cast<Index>(x.size()) != n) {
    throw DimensionMismatch("error_bound: dimensions do not match");
  }
  // Residual enclosure, one row at a time.
  const SparseMatrix at_rows = a.transpose();
  std::vector<Interval> r(n, Interval(0.0));
  for (Index i = 0; i < n; ++i) {
    ExactSumAccumulator acc;
    acc.add(b[i]);
    for (Index p = at_rows.col_ptr()[i]; p < at_rows.col_ptr()[i + 1]; ++p) {
      acc.add_product(-at_rows.values()[p], x[at_rows.row_idx()[p]]);
    }
    r[i] = acc.enclosure();
  }
  // |X_L P r|, then (D^-1 + v w^T) of it, then |X_U| of that.
  std::vector<double> t(n, 0.0);
  for (Index i = 0; i < n; ++i) {
    Interval s(0.0);
    for (Index k = 0; k <= i; ++k) {
      const double xl = xl_[at(n, i, k)];
      if (xl != 0) s += Interval(xl) * r[f_.row_perm[k]];
    }
    t[i] = s.mag();
  }
  double wt = 0.0;
  for (Index k = 0; k < n; ++k) wt = add_up(wt, mul_up(w_[k], t[k]));
  std::vector<double> s(n);
  for (Index i = 0; i < n; ++i) s[i] = add_up(mul_up(dinv_[i], t[i]), mul_up(v_[i], wt));
  std::vector<double> out(n, 0.0);
  for (Index i = 0; i < n; ++i) {
    double sum = 0.0;
    for (Index k = i; k < n; ++k) sum = add_up(sum, mul_up(std::fabs(xu_[at(n, i, k)]), s[k]));
    out[f_.col_perm[i]] = sum;
  }
  return out;
}

std::vector<double> ComponentwiseBound::inverse_abs_bound() const {
  const Index n = n_;
  // M = (D^-1 + v w^T) |X_L|, then |X_U| M, then undo the permutations.
  std::vector<double> m(static_cast<std::size_t>(n * n), 0.0);
  for (Index j = 0; j < n; ++j) {
    double wt = 0.0;
    for (Index k = 0; k < n; ++k) wt = add_up(wt, mul_up(w_[k], std::fabs(xl_[at(n, k, j)])));
    for (Index i = 0; i < n; ++i) {
      m[at(n, i, j)] = add_up(mul_up(dinv_[i], std::fabs(xl_[at(n, i, j)])), mul_up(v_[i], wt));
    }
  }
  std::vector<double> out(static_cast<std::size_t>(n * n), 0.0);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      double sum = 0.0;
      for (Index k = i; k < n; ++k) sum = add_up(sum, mul_up(std::fabs(xu_[at(n, i, k)]), m[at(n, k, j)]));
      out[at(n, f_.col_perm[i], f_.row_perm[j])] = sum;
    }
  }
  return out;
}

}  // namespace verisparse
