#include "verisparse/equilibrate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>

#include "verisparse/eft.hpp"
#include "verisparse/error.hpp"
#include "verisparse/rounding.hpp"

namespace verisparse {

double Equilibration::max_row_scale() const {
  double m = 0.0;
  for (const double r : row_scale) m = std::max(m, std::fabs(r));
  return m;
}

double Equilibration::max_col_scale() const {
  double m = 0.0;
  for (const double c : col_scale) m = std::max(m, std::fabs(c));
  return m;
}

double pow2_round(double s) {
  if (s == 0 || !std::isfinite(s)) throw InvalidArgument("pow2_round: argument must be finite and nonzero");
  int e = 0;
  const double m = std::frexp(std::fabs(s), &e);  // |s| = m 2^e, m in [0.5, 1)
  // log2|s| rounds to e iff log2(m) >= -1/2 iff m^2 >= 1/2, decided exactly.
  const auto [p, err] = two_prod(m, m);
  int z;
  if (p > 0.5 || (p == 0.5 && err > 0)) {
    z = e;
  } else if (p < 0.5 || err < 0) {
    z = e - 1;
  } else {
    z = (e % 2 == 0) ? e : e - 1;  // exact half: round half to even
  }
  const double r = std::ldexp(1.0, z);
  if (!std::isfinite(r) || r == 0) throw InvalidArgument("pow2_round: result out of range");
  return std::copysign(r, s);
}

bool is_power_of_two(double x) {
  if (x == 0 || !std::isfinite(x)) return false;
  int e = 0;
  return std::frexp(std::fabs(x), &e) == 0.5;
}

namespace {

// x * scale for a power-of-two scale, or nullopt-like NaN when inexact.
bool exact_scale(double x, double scale, double& out) {
  out = x * scale;
  if (!std::isfinite(out)) return false;
  if (x == 0) return true;
  if (out == 0) return false;
  return out / scale == x && std::fabs(out) >= std::numeric_limits<double>::min();
}

// Exactness when the result is subnormal: undo the scaling and compare.
bool exact_scale_any(double x, double scale, double& out) {
  if (exact_scale(x, scale, out)) return true;
  if (!std::isfinite(out) || (out == 0 && x != 0)) return false;
  return std::ldexp(out, -std::ilogb(scale)) == x;
}

}  // namespace

std::pair<Equilibration, SparseMatrix> equilibrate(const SparseMatrix& a) {
  if (!a.is_square()) throw InvalidArgument("equilibrate: matrix is not square");
  const Index n = a.rows();
  const auto cp = a.col_ptr();
  const auto ri = a.row_idx();
  const auto av = a.values();

  // cost(i, j) = log2 max_k |a_kj| - log2 |a_ij| >= 0; zeros are not edges.
  std::vector<double> log_colmax(n, 0.0);
  std::vector<double> cost(a.nnz(), kInf);
  for (Index j = 0; j < n; ++j) {
    double m = 0.0;
    for (Index p = cp[j]; p < cp[j + 1]; ++p) {
      if (!std::isfinite(av[p])) throw InvalidArgument("equilibrate: non-finite entry");
      m = std::max(m, std::fabs(av[p]));
    }
    if (m == 0) throw StructurallySingular("equilibrate: empty column");
    log_colmax[j] = std::log2(m);
    for (Index p = cp[j]; p < cp[j + 1]; ++p) {
      if (av[p] != 0) cost[p] = log_colmax[j] - std::log2(std::fabs(av[p]));
    }
  }

  // Minimum-cost perfect matching by shortest augmenting paths, keeping
  // reduced costs cost - u_row - v_col nonnegative and zero on the matching.
  std::vector<double> u(n, 0.0);
  std::vector<double> v(n, 0.0);
  std::vector<Index> row_match(n, -1);
  std::vector<Index> col_match(n, -1);
  for (Index j = 0; j < n; ++j) {
    for (Index p = cp[j]; p < cp[j + 1]; ++p) {
      if (cost[p] == 0 && row_match[ri[p]] == -1) {
        row_match[ri[p]] = j;
        col_match[j] = ri[p];
        break;
      }
    }
  }

  std::vector<double> dist(n, kInf);
  std::vector<double> col_dist(n, kInf);
  std::vector<Index> parent(n, -1);
  std::vector<char> done(n, 0);
  std::vector<Index> finalized;
  std::vector<Index> reached_cols;
  using Item = std::pair<double, Index>;
  for (Index j0 = 0; j0 < n; ++j0) {
    if (col_match[j0] != -1) continue;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    std::vector<Index> touched_rows;
    const auto relax = [&](Index j, double d) {
      for (Index p = cp[j]; p < cp[j + 1]; ++p) {
        if (cost[p] == kInf) continue;
        const Index i = ri[p];
        if (done[i]) continue;
        const double nd = d + std::max(0.0, cost[p] - u[i] - v[j]);
        if (nd < dist[i]) {
          if (dist[i] == kInf) touched_rows.push_back(i);
          dist[i] = nd;
          parent[i] = j;
          heap.emplace(nd, i);
        }
      }
    };
    finalized.clear();
    reached_cols.assign(1, j0);
    col_dist[j0] = 0.0;
    relax(j0, 0.0);
    Index free_row = -1;
    double dmin = 0.0;
    while (!heap.empty()) {
      const auto [d, i] = heap.top();
      heap.pop();
      if (done[i] || d != dist[i]) continue;
      done[i] = 1;
      finalized.push_back(i);
      if (row_match[i] == -1) {
        free_row = i;
        dmin = d;
        break;
      }
      const Index j = row_match[i];
      col_dist[j] = d;
      reached_cols.push_back(j);
      relax(j, d);
    }
    if (free_row == -1) throw StructurallySingular("equilibrate: no perfect matching exists");
    for (const Index i : finalized) u[i] -= dmin - dist[i];
    for (const Index j : reached_cols) v[j] += dmin - col_dist[j];
    for (Index i = free_row;;) {
      const Index j = parent[i];
      const Index next = col_match[j];
      row_match[i] = j;
      col_match[j] = i;
      if (j == j0) break;
      i = next;
    }
    for (const Index i : touched_rows) {
      dist[i] = kInf;
      done[i] = 0;
    }
    for (const Index j : reached_cols) col_dist[j] = kInf;
  }

  // Row scalings from the duals; column scalings normalize each column's
  // largest scaled magnitude to one.
  std::vector<double> r(n);
  for (Index i = 0; i < n; ++i) {
    r[i] = std::exp2(u[i]);
    if (r[i] == 0 || !std::isfinite(r[i])) throw InvalidArgument("equilibrate: row scaling out of range");
  }
  Equilibration eq;
  eq.row_perm.assign(col_match.begin(), col_match.end());
  eq.row_scale.resize(n);
  eq.col_scale.resize(n);
  for (Index j = 0; j < n; ++j) {
    double m = 0.0;
    for (Index p = cp[j]; p < cp[j + 1]; ++p) m = std::max(m, std::fabs(av[p]) * r[ri[p]]);
    const double c = 1.0 / m;
    if (!std::isfinite(c) || c == 0) throw InvalidArgument("equilibrate: column scaling out of range");
    eq.col_scale[j] = pow2_round(c);
  }
  for (Index k = 0; k < n; ++k) eq.row_scale[k] = pow2_round(r[eq.row_perm[k]]);
  SparseMatrix scaled = apply_equilibration(eq, a);
  return {std::move(eq), std::move(scaled)};
}

SparseMatrix apply_equilibration(const Equilibration& eq, const SparseMatrix& a) {
  const Index n = a.rows();
  if (!a.is_square() || eq.size() != n || static_cast<Index>(eq.row_scale.size()) != n ||
      static_cast<Index>(eq.col_scale.size()) != n || !is_permutation(eq.row_perm, n)) {
    throw InvalidArgument("apply_equilibration: transformation does not fit the matrix");
  }
  for (Index k = 0; k < n; ++k) {
    if (!is_power_of_two(eq.row_scale[k]) || !is_power_of_two(eq.col_scale[k])) {
      throw InvalidArgument("apply_equilibration: scaling is not a power of two");
    }
  }
  std::vector<Index> identity(n);
  for (Index k = 0; k < n; ++k) identity[k] = k;
  const SparseMatrix pa = a.permute(eq.row_perm, identity);
  std::vector<double> values(pa.values().begin(), pa.values().end());
  for (Index j = 0; j < n; ++j) {
    for (Index p = pa.col_ptr()[j]; p < pa.col_ptr()[j + 1]; ++p) {
      double t = 0.0;
      double out = 0.0;
      if (!exact_scale_any(values[p], eq.row_scale[pa.row_idx()[p]], t) ||
          !exact_scale_any(t, eq.col_scale[j], out)) {
        throw InvalidArgument("apply_equilibration: scaled entry is not exactly representable");
      }
      values[p] = out;
    }
  }
  return SparseMatrix(n, n, {pa.col_ptr().begin(), pa.col_ptr().end()}, {pa.row_idx().begin(), pa.row_idx().end()},
                      std::move(values));
}

double sigma_back_propagate(double delta_scaled, const Equilibration& eq) {
  if (!(delta_scaled >= 0)) throw InvalidArgument("sigma_back_propagate: negative bound");
  const double denom = mul_up(eq.max_row_scale(), eq.max_col_scale());
  return div_down(delta_scaled, denom);
}

std::vector<double> scale_rhs(const Equilibration& eq, std::span<const double> b) {
  if (static_cast<Index>(b.size()) != eq.size()) throw DimensionMismatch("scale_rhs: length mismatch");
  std::vector<double> out(b.size());
  for (Index k = 0; k < eq.size(); ++k) {
    if (!exact_scale_any(b[eq.row_perm[k]], eq.row_scale[k], out[k])) {
      throw InvalidArgument("scale_rhs: scaled entry is not exactly representable");
    }
  }
  return out;
}

}  // namespace verisparse
