#include "verisparse/interval_matrix.hpp"

#include <algorithm>
#include <cmath>

#include "verisparse/eft.hpp"
#include "verisparse/error.hpp"

namespace verisparse {

IntervalSparseMatrix::IntervalSparseMatrix(const SparseMatrix& a)
    : rows_(a.rows()),
      cols_(a.cols()),
      col_ptr_(a.col_ptr().begin(), a.col_ptr().end()),
      row_idx_(a.row_idx().begin(), a.row_idx().end()),
      lo_(a.values().begin(), a.values().end()),
      hi_(a.values().begin(), a.values().end()) {}

IntervalSparseMatrix::IntervalSparseMatrix(Index rows, Index cols, std::vector<Index> col_ptr,
                                           std::vector<Index> row_idx, std::vector<double> lo,
                                           std::vector<double> hi)
    : rows_(rows),
      cols_(cols),
      col_ptr_(std::move(col_ptr)),
      row_idx_(std::move(row_idx)),
      lo_(std::move(lo)),
      hi_(std::move(hi)) {
  if (lo_.size() != hi_.size()) throw InvalidArgument("IntervalSparseMatrix: endpoint arrays differ in length");
  for (std::size_t p = 0; p < lo_.size(); ++p) {
    if (std::isnan(lo_[p]) || std::isnan(hi_[p]) || lo_[p] > hi_[p]) {
      throw InvalidArgument("IntervalSparseMatrix: invalid entry");
    }
  }
  // Reuse the pattern validation of SparseMatrix.
  SparseMatrix(rows_, cols_, col_ptr_, row_idx_, lo_);
}

Interval IntervalSparseMatrix::coeff(Index i, Index j) const {
  if (i < 0 || i >= rows_ || j < 0 || j >= cols_) throw InvalidArgument("coeff: index out of range");
  const auto first = row_idx_.begin() + col_ptr_[j];
  const auto last = row_idx_.begin() + col_ptr_[j + 1];
  const auto it = std::lower_bound(first, last, i);
  if (it == last || *it != i) return Interval(0.0);
  return entry(it - row_idx_.begin());
}

SparseMatrix IntervalSparseMatrix::mid() const {
  std::vector<double> m(lo_.size());
  for (std::size_t p = 0; p < lo_.size(); ++p) m[p] = Interval(lo_[p], hi_[p]).mid();
  return SparseMatrix(rows_, cols_, col_ptr_, row_idx_, std::move(m));
}

SparseMatrix IntervalSparseMatrix::rad() const {
  std::vector<double> r(lo_.size());
  for (std::size_t p = 0; p < lo_.size(); ++p) r[p] = Interval(lo_[p], hi_[p]).rad();
  return SparseMatrix(rows_, cols_, col_ptr_, row_idx_, std::move(r));
}

SparseMatrix IntervalSparseMatrix::mag() const {
  std::vector<double> m(lo_.size());
  for (std::size_t p = 0; p < lo_.size(); ++p) m[p] = std::max(std::fabs(lo_[p]), std::fabs(hi_[p]));
  return SparseMatrix(rows_, cols_, col_ptr_, row_idx_, std::move(m));
}

IntervalSparseMatrix IntervalSparseMatrix::transpose() const {
  const SparseMatrix lo_t = SparseMatrix(rows_, cols_, col_ptr_, row_idx_, lo_).transpose();
  const SparseMatrix hi_t = SparseMatrix(rows_, cols_, col_ptr_, row_idx_, hi_).transpose();
  return IntervalSparseMatrix(cols_, rows_, {lo_t.col_ptr().begin(), lo_t.col_ptr().end()},
                              {lo_t.row_idx().begin(), lo_t.row_idx().end()},
                              {lo_t.values().begin(), lo_t.values().end()},
                              {hi_t.values().begin(), hi_t.values().end()});
}

namespace {

// Upper bound on gamma_m = m u / (1 - m u).
double gamma_up(double m) {
  const double mu = mul_up(m, kUnitRoundoff);
  if (mu >= 0.5) throw InvalidArgument("gamma_up: too many terms for a rounding error bound");
  return div_up(mu, sub_down(1.0, mu));
}

struct Column {
  std::vector<Index> rows;
  std::vector<double> lo;
  std::vector<double> hi;
};

}  // namespace

IntervalSparseMatrix spgemm_interval(const IntervalSparseMatrix& a, const IntervalSparseMatrix& b,
                                     Accuracy accuracy) {
  if (a.cols() != b.rows()) throw DimensionMismatch("spgemm_interval: inner dimensions differ");
  const Index m = a.rows();
  const Index n = b.cols();

  std::vector<Index> col_ptr(n + 1, 0);
  std::vector<Index> row_idx;
  std::vector<double> lo;
  std::vector<double> hi;

  std::vector<Index> mark(m, -1);
  std::vector<Index> touched;
  // sharp: interval accumulators. fast: midpoint, magnitude and radius sums.
  std::vector<double> acc0(m), acc1(m), acc2(m);
  std::vector<Index> count(m, 0);
  std::vector<char> exact(m, 0);

  // Midpoint and radius of a's entries, needed by the fast mode.
  std::vector<double> a_mid;
  std::vector<double> a_rad;
  if (accuracy == Accuracy::fast) {
    a_mid.resize(a.nnz());
    a_rad.resize(a.nnz());
    for (Index p = 0; p < a.nnz(); ++p) {
      const Interval e = a.entry(p);
      a_mid[p] = e.mid();
      a_rad[p] = e.rad();
    }
  }

  for (Index j = 0; j < n; ++j) {
    touched.clear();
    for (Index q = b.col_ptr()[j]; q < b.col_ptr()[j + 1]; ++q) {
      const Index k = b.row_idx()[q];
      const Interval bkj = b.entry(q);
      if (accuracy == Accuracy::sharp) {
        for (Index p = a.col_ptr()[k]; p < a.col_ptr()[k + 1]; ++p) {
          const Index i = a.row_idx()[p];
          const Interval prod = a.entry(p) * bkj;
          if (mark[i] != j) {
            mark[i] = j;
            touched.push_back(i);
            acc0[i] = prod.lo();
            acc1[i] = prod.hi();
          } else {
            acc0[i] = add_down(acc0[i], prod.lo());
            acc1[i] = add_up(acc1[i], prod.hi());
          }
        }
      } else {
        const double bm = bkj.mid();
        const double br = bkj.rad();
        const double bm_abs = std::fabs(bm);
        for (Index p = a.col_ptr()[k]; p < a.col_ptr()[k + 1]; ++p) {
          const Index i = a.row_idx()[p];
          const double am = a_mid[p];
          const double ar = a_rad[p];
          const double am_abs = std::fabs(am);
          if (mark[i] != j) {
            mark[i] = j;
            touched.push_back(i);
            acc0[i] = 0.0;
            acc1[i] = 0.0;
            acc2[i] = 0.0;
            count[i] = 0;
            exact[i] = 1;
          }
          const auto [prod, prod_err] = two_prod(am, bm);
          const auto [sum, sum_err] = two_sum(acc0[i], prod);
          // Exact point entries need no error term; products near the
          // underflow range are never treated as exact.
          if (ar != 0 || br != 0 || prod_err != 0 || sum_err != 0 ||
              (std::fabs(prod) < 0x1p-960 && am != 0 && bm != 0)) {
            exact[i] = 0;
          }
          acc0[i] = sum;
          acc1[i] += am_abs * bm_abs;
          acc2[i] += am_abs * br + ar * (bm_abs + br);
          ++count[i];
        }
      }
    }
    std::sort(touched.begin(), touched.end());
    for (const Index i : touched) {
      row_idx.push_back(i);
      if (accuracy == Accuracy::sharp) {
        lo.push_back(acc0[i]);
        hi.push_back(acc1[i]);
        continue;
      }
      if (exact[i]) {
        lo.push_back(acc0[i]);
        hi.push_back(acc0[i]);
        continue;
      }
      // Every sum above has at most 2k + 8 rounding errors per term chain.
      const double k = static_cast<double>(count[i]);
      const double mid_err = mul_up(gamma_up(2 * k + 2), acc1[i]);
      const double rad_sum = mul_up(acc2[i], add_up(1.0, gamma_up(2 * k + 8)));
      const double underflow = mul_up(6 * k + 6, kEta);
      const double r = add_up(add_up(mid_err, rad_sum), underflow);
      lo.push_back(sub_down(acc0[i], r));
      hi.push_back(add_up(acc0[i], r));
    }
    col_ptr[j + 1] = static_cast<Index>(row_idx.size());
  }
  return IntervalSparseMatrix(m, n, std::move(col_ptr), std::move(row_idx), std::move(lo), std::move(hi));
}

IntervalSparseMatrix subtract(const IntervalSparseMatrix& a, const IntervalSparseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionMismatch("subtract: shapes differ");
  std::vector<Index> col_ptr(a.cols() + 1, 0);
  std::vector<Index> row_idx;
  std::vector<double> lo;
  std::vector<double> hi;
  row_idx.reserve(a.nnz() + b.nnz());
  lo.reserve(a.nnz() + b.nnz());
  hi.reserve(a.nnz() + b.nnz());
  for (Index j = 0; j < a.cols(); ++j) {
    Index p = a.col_ptr()[j];
    Index q = b.col_ptr()[j];
    const Index pe = a.col_ptr()[j + 1];
    const Index qe = b.col_ptr()[j + 1];
    while (p < pe || q < qe) {
      const Index ia = p < pe ? a.row_idx()[p] : a.rows();
      const Index ib = q < qe ? b.row_idx()[q] : b.rows();
      if (ia < ib) {
        row_idx.push_back(ia);
        lo.push_back(a.lo()[p]);
        hi.push_back(a.hi()[p]);
        ++p;
      } else if (ib < ia) {
        row_idx.push_back(ib);
        lo.push_back(-b.hi()[q]);
        hi.push_back(-b.lo()[q]);
        ++q;
      } else {
        row_idx.push_back(ia);
        lo.push_back(sub_down(a.lo()[p], b.hi()[q]));
        hi.push_back(sub_up(a.hi()[p], b.lo()[q]));
        ++p;
        ++q;
      }
    }
    col_ptr[j + 1] = static_cast<Index>(row_idx.size());
  }
  return IntervalSparseMatrix(a.rows(), a.cols(), std::move(col_ptr), std::move(row_idx), std::move(lo),
                              std::move(hi));
}

double norm_bound_1_inf(const IntervalSparseMatrix& m, Norm which) {
  if (which == Norm::one) {
    double best = 0.0;
    for (Index j = 0; j < m.cols(); ++j) {
      double s = 0.0;
      for (Index p = m.col_ptr()[j]; p < m.col_ptr()[j + 1]; ++p) {
        s = add_up(s, std::max(std::fabs(m.lo()[p]), std::fabs(m.hi()[p])));
      }
      best = std::max(best, s);
    }
    return best;
  }
  std::vector<double> row_sum(m.rows(), 0.0);
  for (Index p = 0; p < m.nnz(); ++p) {
    const Index i = m.row_idx()[p];
    row_sum[i] = add_up(row_sum[i], std::max(std::fabs(m.lo()[p]), std::fabs(m.hi()[p])));
  }
  return row_sum.empty() ? 0.0 : *std::max_element(row_sum.begin(), row_sum.end());
}

double spectral_norm_bound(const IntervalSparseMatrix& m) {
  return sqrt_up(mul_up(norm_bound_1_inf(m, Norm::one), norm_bound_1_inf(m, Norm::inf)));
}

}  // namespace verisparse
