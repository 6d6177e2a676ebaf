#include "verisparse/refine.hpp"

#include <algorithm>
#include <cmath>

#include "verisparse/eft.hpp"
#include "verisparse/equilibrate.hpp"
#include "verisparse/error.hpp"
#include "verisparse/lu.hpp"
#include "verisparse/rounding.hpp"

namespace verisparse {

bool stopping_check(double residual_norm_sup, double b_norm, double delta) {
  if (!(b_norm > 0) || !(delta > 0)) throw InvalidArgument("stopping_check: norms must be positive");
  if (!(residual_norm_sup >= 0)) return false;
  return div_up(residual_norm_sup, b_norm) <= mul_down(0x1p-53, delta);
}

namespace {

// The verified system M y = c and the way back to the input coordinates.
struct System {
  SparseMatrix m;
  SparseMatrix m_rows;  // transpose, for row access
  std::vector<double> c;
  std::vector<double> col_scale;
};

System verified_system(const SparseMatrix& a, std::span<const double> b, const Certificate& cert) {
  if (!cert.verified()) throw InvalidArgument("refine: certificate is not verified");
  if (!(cert.matrix == fingerprint(a))) throw InvalidArgument("refine: certificate belongs to another matrix");
  if (static_cast<Index>(b.size()) != a.rows()) throw DimensionMismatch("refine: right-hand side length mismatch");
  System s;
  if (cert.equilibration) {
    s.m = apply_equilibration(*cert.equilibration, a);
    s.c = scale_rhs(*cert.equilibration, b);
    s.col_scale = cert.equilibration->col_scale;
  } else {
    s.m = a;
    s.c.assign(b.begin(), b.end());
  }
  s.m_rows = s.m.transpose();
  return s;
}

double norm2_up(std::span<const double> v) {
  double s = 0.0;
  for (const double x : v) s = add_up(s, mul_up(x, x));
  return sqrt_up(s);
}

// c - M (y + z): the value rounded to working precision and an upper bound
// on the exact residual's 2-norm.
double residual(const System& s, const std::vector<double>& y, const std::vector<double>& z, std::vector<double>& r) {
  const Index n = s.m.rows();
  double sq = 0.0;
  for (Index i = 0; i < n; ++i) {
    ExactSumAccumulator acc;
    acc.add(s.c[i]);
    for (Index p = s.m_rows.col_ptr()[i]; p < s.m_rows.col_ptr()[i + 1]; ++p) {
      const Index j = s.m_rows.row_idx()[p];
      const double mij = -s.m_rows.values()[p];
      acc.add_product(mij, y[j]);
      if (z[j] != 0) acc.add_product(mij, z[j]);
    }
    r[i] = acc.approx();
    const double mag = acc.enclosure().mag();
    sq = add_up(sq, mul_up(mag, mag));
  }
  return sqrt_up(sq);
}

// Scales a pair back to input coordinates; returns false if some product was
// not exact.
bool to_input(const std::vector<double>& col_scale, const std::vector<double>& v, std::vector<double>& out) {
  out = v;
  if (col_scale.empty()) return true;
  bool exact = true;
  for (std::size_t j = 0; j < v.size(); ++j) {
    out[j] = v[j] * col_scale[j];
    if (v[j] != 0 && (out[j] == 0 || std::ldexp(out[j], -std::ilogb(col_scale[j])) != v[j])) exact = false;
  }
  return exact;
}

template <class Correct>
PairedSolution iterate(const System& s, const Certificate& cert, const RefineOptions& opts, std::vector<double> y,
                       const Correct& correct) {
  const Index n = s.m.rows();
  PairedSolution ps;
  ps.delta = cert.delta;
  ps.col_scale = s.col_scale;
  std::vector<double> z(n, 0.0);
  std::vector<double> r(n, 0.0);
  std::vector<double> yo, zo;
  const auto observe = [&](int it) {
    if (!opts.observer) return;
    to_input(s.col_scale, y, yo);
    to_input(s.col_scale, z, zo);
    opts.observer(it, yo, zo);
  };

  const double b_norm = norm2_up(s.c);
  if (b_norm == 0) {
    ps.y.assign(n, 0.0);
    ps.z.assign(n, 0.0);
    ps.converged = true;
    return ps;
  }
  observe(0);
  int increases = 0;
  double previous = kInf;
  for (int it = 0;; ++it) {
    const double res = residual(s, y, z, r);
    ps.residual_history.push_back(res);
    ps.residual_norm_sup = res;
    ps.iterations = it + 1;  // solves so far, the initial one included
    if (stopping_check(res, b_norm, cert.delta)) {
      ps.converged = true;
      break;
    }
    increases = res > previous ? increases + 1 : 0;
    previous = res;
    if (increases >= opts.divergence_window || it >= opts.max_iterations || !std::isfinite(res)) break;
    const std::vector<double> e = correct(r);
    for (Index j = 0; j < n; ++j) {
      const auto [hi, lo] = two_sum(y[j], z[j] + e[j]);
      y[j] = hi;
      z[j] = lo;
    }
    observe(it + 1);
  }
  const bool exact = to_input(s.col_scale, y, ps.y) & to_input(s.col_scale, z, ps.z);
  ps.scaling_slack = exact ? 0.0 : 2 * kEta;
  return ps;
}

}  // namespace

PairedSolution refine_augmented(const SparseMatrix& a, std::span<const double> b, const LdltFactors& f,
                                const Certificate& cert, const RefineOptions& opts) {
  const System s = verified_system(a, b, cert);
  const Index n = s.m.rows();
  if (f.dim() != 2 * n) throw DimensionMismatch("refine_augmented: factors do not match the system");
  // (M^T r; r) through the factors; the leading half is the correction.
  const auto correct = [&](const std::vector<double>& r) {
    const std::vector<double> mtr = spmv_transpose(s.m, r);
    std::vector<double> rhs(2 * n);
    std::copy(mtr.begin(), mtr.end(), rhs.begin());
    std::copy(r.begin(), r.end(), rhs.begin() + n);
    std::vector<double> e = solve_ldlt(f, rhs);
    e.resize(n);
    return e;
  };
  return iterate(s, cert, opts, correct(s.c), correct);
}

PairedSolution refine_lu(const SparseMatrix& a, std::span<const double> b, const Certificate& cert,
                         const RefineOptions& opts) {
  const System s = verified_system(a, b, cert);
  const LuFactors f = lu(s.m);
  const auto correct = [&](const std::vector<double>& r) { return lu_solve(f, r); };
  return iterate(s, cert, opts, correct(s.c), correct);
}

SolutionEnclosure enclose_solution(const PairedSolution& ps, const Certificate& cert) {
  if (!cert.verified() || !(ps.delta > 0)) throw InvalidArgument("enclose_solution: certificate is not verified");
  if (ps.z.size() != ps.y.size()) throw DimensionMismatch("enclose_solution: pair lengths differ");
  const double err = div_up(ps.residual_norm_sup, ps.delta);
  SolutionEnclosure enc;
  enc.mid = ps.y;
  enc.rad.resize(ps.y.size());
  for (std::size_t j = 0; j < ps.y.size(); ++j) {
    const double scaled = ps.col_scale.empty() ? err : mul_up(std::fabs(ps.col_scale[j]), err);
    enc.rad[j] = add_up(add_up(std::fabs(ps.z[j]), scaled), ps.scaling_slack);
  }
  return enc;
}

double max_relative_radius(const SolutionEnclosure& enc) {
  double worst = 0.0;
  for (std::size_t i = 0; i < enc.mid.size(); ++i) {
    if (enc.mid[i] == 0) {
      if (enc.rad[i] != 0) return kInf;
      continue;
    }
    worst = std::max(worst, div_up(enc.rad[i], std::fabs(enc.mid[i])));
  }
  return worst;
}

}  // namespace verisparse
