#include "verisparse/lu.hpp"

#include <cmath>
#include <utility>

#include "verisparse/error.hpp"
#include "verisparse/ordering.hpp"

namespace verisparse {

namespace {

using Column = std::vector<std::pair<Index, double>>;

// Rows reachable from the pattern of column `col` of a through the graph of
// the partial L (row i -> rows of L column pinv[i]), in topological order.
void reach(const SparseMatrix& a, Index col, const std::vector<Column>& lcols, const std::vector<Index>& pinv,
           std::vector<Index>& mark, Index stamp, std::vector<Index>& out) {
  out.clear();
  std::vector<std::pair<Index, std::size_t>> stack;
  std::vector<Index> post;
  for (Index p = a.col_ptr()[col]; p < a.col_ptr()[col + 1]; ++p) {
    const Index start = a.row_idx()[p];
    if (mark[start] == stamp) continue;
    mark[start] = stamp;
    stack.emplace_back(start, 0);
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      const Index j = pinv[node];
      bool descended = false;
      if (j >= 0) {
        const Column& lc = lcols[j];
        while (next < lc.size()) {
          const Index child = lc[next++].first;
          if (mark[child] != stamp) {
            mark[child] = stamp;
            stack.emplace_back(child, 0);
            descended = true;
            break;
          }
        }
      }
      if (!descended) {
        post.push_back(stack.back().first);
        stack.pop_back();
      }
    }
  }
  out.assign(post.rbegin(), post.rend());
}

}  // namespace

LuFactors lu(const SparseMatrix& a, std::span<const Index> col_order) {
  if (!a.is_square()) throw InvalidArgument("lu: matrix is not square");
  const Index n = a.rows();
  std::vector<Index> q;
  if (col_order.empty()) {
    q = fill_reducing_order(a);
  } else {
    if (!is_permutation(col_order, n)) throw InvalidArgument("lu: column order is not a permutation");
    q.assign(col_order.begin(), col_order.end());
  }

  std::vector<Column> lcols(n);  // original row numbering, pivot row first
  std::vector<Column> ucols(n);  // step numbering, diagonal last
  std::vector<Index> pinv(n, -1);
  std::vector<Index> mark(n, -1);
  std::vector<double> x(n, 0.0);
  std::vector<Index> topo;
  for (Index k = 0; k < n; ++k) {
    const Index col = q[k];
    reach(a, col, lcols, pinv, mark, k, topo);
    for (const Index i : topo) x[i] = 0.0;
    for (Index p = a.col_ptr()[col]; p < a.col_ptr()[col + 1]; ++p) {
      if (!std::isfinite(a.values()[p])) throw InvalidArgument("lu: non-finite entry");
      x[a.row_idx()[p]] = a.values()[p];
    }
    for (const Index i : topo) {
      const Index j = pinv[i];
      if (j < 0) continue;
      const double xi = x[i];
      const Column& lc = lcols[j];
      for (std::size_t t = 1; t < lc.size(); ++t) x[lc[t].first] -= lc[t].second * xi;
    }
    Index ipiv = -1;
    double best = -1.0;
    for (const Index i : topo) {
      if (pinv[i] >= 0) {
        if (x[i] != 0) ucols[k].emplace_back(pinv[i], x[i]);
        continue;
      }
      const double m = std::fabs(x[i]);
      if (m > best || (m == best && i < ipiv)) {
        best = m;
        ipiv = i;
      }
    }
    if (ipiv == -1 || best == 0 || !std::isfinite(best)) throw FactorizationBreakdown("lu: no usable pivot");
    const double pivot = x[ipiv];
    ucols[k].emplace_back(k, pivot);
    pinv[ipiv] = k;
    lcols[k].emplace_back(ipiv, 1.0);
    for (const Index i : topo) {
      if (pinv[i] >= 0 || x[i] == 0) continue;
      const double l = x[i] / pivot;
      if (!std::isfinite(l)) throw FactorizationBreakdown("lu: factor entry is not finite");
      lcols[k].emplace_back(i, l);
    }
  }

  LuFactors f;
  f.col_perm = std::move(q);
  f.row_perm.assign(n, -1);
  for (Index i = 0; i < n; ++i) f.row_perm[pinv[i]] = i;
  std::vector<Triplet> lt;
  std::vector<Triplet> ut;
  for (Index k = 0; k < n; ++k) {
    for (const auto& [i, v] : lcols[k]) lt.push_back({pinv[i], k, v});
    for (const auto& [i, v] : ucols[k]) ut.push_back({i, k, v});
  }
  f.lower = SparseMatrix::from_triplets(n, n, lt);
  f.upper = SparseMatrix::from_triplets(n, n, ut);
  return f;
}

namespace {

// In-place L y = y (unit lower) and U y = y, column oriented.
void lower_solve(const SparseMatrix& l, std::vector<double>& y) {
  for (Index j = 0; j < l.cols(); ++j) {
    for (Index p = l.col_ptr()[j] + 1; p < l.col_ptr()[j + 1]; ++p) y[l.row_idx()[p]] -= l.values()[p] * y[j];
  }
}

void upper_solve(const SparseMatrix& u, std::vector<double>& y) {
  for (Index j = u.cols() - 1; j >= 0; --j) {
    const Index last = u.col_ptr()[j + 1] - 1;
    y[j] /= u.values()[last];
    for (Index p = u.col_ptr()[j]; p < last; ++p) y[u.row_idx()[p]] -= u.values()[p] * y[j];
  }
}

// U^T y = y and L^T y = y.
void upper_transpose_solve(const SparseMatrix& u, std::vector<double>& y) {
  for (Index j = 0; j < u.cols(); ++j) {
    const Index last = u.col_ptr()[j + 1] - 1;
    double s = y[j];
    for (Index p = u.col_ptr()[j]; p < last; ++p) s -= u.values()[p] * y[u.row_idx()[p]];
    y[j] = s / u.values()[last];
  }
}

void lower_transpose_solve(const SparseMatrix& l, std::vector<double>& y) {
  for (Index j = l.cols() - 1; j >= 0; --j) {
    double s = y[j];
    for (Index p = l.col_ptr()[j] + 1; p < l.col_ptr()[j + 1]; ++p) s -= l.values()[p] * y[l.row_idx()[p]];
    y[j] = s;
  }
}

}  // namespace

std::vector<double> lu_solve(const LuFactors& f, std::span<const double> b) {
  const Index n = f.dim();
  if (static_cast<Index>(b.size()) != n) throw DimensionMismatch("lu_solve: length mismatch");
  std::vector<double> y(n);
  for (Index i = 0; i < n; ++i) y[i] = b[f.row_perm[i]];
  lower_solve(f.lower, y);
  upper_solve(f.upper, y);
  std::vector<double> x(n);
  for (Index j = 0; j < n; ++j) x[f.col_perm[j]] = y[j];
  return x;
}

std::vector<double> lu_solve_transpose(const LuFactors& f, std::span<const double> b) {
  const Index n = f.dim();
  if (static_cast<Index>(b.size()) != n) throw DimensionMismatch("lu_solve_transpose: length mismatch");
  std::vector<double> y(n);
  for (Index j = 0; j < n; ++j) y[j] = b[f.col_perm[j]];
  upper_transpose_solve(f.upper, y);
  lower_transpose_solve(f.lower, y);
  std::vector<double> x(n);
  for (Index i = 0; i < n; ++i) x[f.row_perm[i]] = y[i];
  return x;
}

}  // namespace verisparse
