#include "verisparse/ldlt.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <utility>

#include "verisparse/eft.hpp"
#include "verisparse/error.hpp"
#include "verisparse/ordering.hpp"

namespace verisparse {

Index BlockDiag::dim() const {
  Index n = 0;
  for (const auto& b : blocks) n += b.size;
  return n;
}

bool BlockDiag::valid() const {
  Index next = 0;
  for (const auto& b : blocks) {
    if (b.first != next || (b.size != 1 && b.size != 2)) return false;
    next += b.size;
  }
  return true;
}

SparseMatrix BlockDiag::to_sparse() const {
  std::vector<Triplet> t;
  for (const auto& b : blocks) {
    t.push_back({b.first, b.first, b.a});
    if (b.size == 2) {
      t.push_back({b.first + 1, b.first, b.b});
      t.push_back({b.first, b.first + 1, b.b});
      t.push_back({b.first + 1, b.first + 1, b.c});
    }
  }
  const Index n = dim();
  return SparseMatrix::from_triplets(n, n, t);
}

Inertia block_inertia(const DiagBlock& block) {
  const auto sign_of = [](double x) { return (x > 0) - (x < 0); };
  Inertia in;
  const auto count = [&](int s) {
    if (s > 0) ++in.positive;
    else if (s < 0) ++in.negative;
    else ++in.zero;
  };
  if (block.size == 1) {
    count(sign_of(block.a));
    return in;
  }
  const int det = det2_sign(block.a, block.b, block.c);
  if (det < 0) {
    count(1);
    count(-1);
  } else if (det > 0) {
    // a and c are nonzero and share a sign.
    count(sign_of(block.a));
    count(sign_of(block.a));
  } else {
    // One zero eigenvalue; the other equals the trace a + c, whose sign is
    // that of a (or of c when a = 0, since then b = 0 too).
    count(0);
    count(block.a != 0 ? sign_of(block.a) : sign_of(block.c));
  }
  return in;
}

Inertia inertia(const BlockDiag& d) {
  Inertia total;
  for (const auto& b : d.blocks) {
    const Inertia in = block_inertia(b);
    total.positive += in.positive;
    total.negative += in.negative;
    total.zero += in.zero;
  }
  return total;
}

namespace {

constexpr double kBunchKaufmanAlpha = 0.6403882032022076;  // (1 + sqrt(17)) / 8

struct PivotChoice {
  Index first;
  Index second;  // -1 for a 1x1 pivot
};

// diag(v) gives a_vv; colmax(v) gives {max_{i != v} |a_iv|, argmax}.
template <class Diag, class ColMax>
PivotChoice choose_pivot(Index p, Pivoting pivoting, const Diag& diag, const ColMax& colmax) {
  const double app = std::fabs(diag(p));
  if (pivoting == Pivoting::none) {
    if (app == 0) throw FactorizationBreakdown("ldlt: zero pivot without pivoting");
    return {p, -1};
  }
  const auto [lambda, r] = colmax(p);
  if (lambda == 0) {
    if (app == 0) throw FactorizationBreakdown("ldlt: exactly zero column");
    return {p, -1};
  }
  if (app >= kBunchKaufmanAlpha * lambda) return {p, -1};
  const double sigma = colmax(r).first;
  if (app * sigma >= kBunchKaufmanAlpha * lambda * lambda) return {p, -1};
  if (std::fabs(diag(r)) >= kBunchKaufmanAlpha * sigma) return {r, -1};
  return {p, r};
}

void require_finite(double x) {
  if (!std::isfinite(x)) throw FactorizationBreakdown("ldlt: factor entry is not finite");
}

// Multipliers of a 2x2 pivot [[a, b], [b, c]] for the row (wp, wr).
std::pair<double, double> pair_multipliers(double a, double b, double c, double det, double wp, double wr) {
  const double lp = (wp * c - wr * b) / det;
  const double lr = (wr * a - wp * b) / det;
  require_finite(lp);
  require_finite(lr);
  return {lp, lr};
}

double checked_det(double a, double b, double c) {
  const double det = det2_value(a, b, c);
  if (det == 0 || det2_sign(a, b, c) == 0) throw FactorizationBreakdown("ldlt: singular 2x2 pivot");
  require_finite(det);
  return det;
}

class Factorizer {
 public:
  Factorizer(const SparseMatrix& s, std::span<const Index> order, Pivoting pivoting)
      : n_(s.rows()), order_(order.begin(), order.end()), pivoting_(pivoting),
        diag_(n_, 0.0), adj_(n_), active_(n_, 1), lcols_(n_) {
    for (Index j = 0; j < n_; ++j) {
      for (Index p = s.col_ptr()[j]; p < s.col_ptr()[j + 1]; ++p) {
        const Index i = s.row_idx()[p];
        const double v = s.values()[p];
        if (!std::isfinite(v)) throw InvalidArgument("ldlt: non-finite entry");
        if (i == j) {
          diag_[j] = v;
        } else {
          adj_[j].emplace(i, v);
        }
      }
    }
    for (const auto& a : adj_) offdiag_ += static_cast<Index>(a.size());
    remaining_ = n_;
  }

  LdltFactors run() {
    while (remaining_ > 0) {
      if (2 * (offdiag_ + remaining_) > remaining_ * remaining_) {
        run_dense();
        break;
      }
      const Index p = next_candidate();
      const auto colmax = [&](Index v) {
        double best = 0.0;
        Index arg = -1;
        for (const auto& [i, x] : adj_[v]) {
          const double m = std::fabs(x);
          if (m > best || (m == best && arg != -1 && i < arg)) {
            best = m;
            arg = i;
          }
        }
        return std::pair{best, arg};
      };
      const auto diag = [&](Index v) { return diag_[v]; };
      const PivotChoice pc = choose_pivot(p, pivoting_, diag, colmax);
      if (pc.second == -1) {
        eliminate_sparse_1(pc.first);
      } else {
        eliminate_sparse_2(pc.first, pc.second);
      }
    }
    return assemble();
  }

 private:
  Index next_candidate() {
    while (!active_[order_[cursor_]]) ++cursor_;
    return order_[cursor_];
  }

  void retire(Index v) {
    active_[v] = 0;
    elim_order_.push_back(v);
    --remaining_;
  }

  // Detaches v from the graph and returns its off-diagonal column sorted by
  // vertex.
  std::vector<std::pair<Index, double>> detach(Index v) {
    std::vector<std::pair<Index, double>> col(adj_[v].begin(), adj_[v].end());
    std::sort(col.begin(), col.end());
    for (const auto& [i, x] : col) {
      adj_[i].erase(v);
      offdiag_ -= 2;
    }
    adj_[v].clear();
    return col;
  }

  // a_ij -= update, for i < j, keeping both stored copies identical.
  void update_pair(Index i, Index j, double update) {
    auto [it, inserted] = adj_[i].try_emplace(j, 0.0);
    it->second -= update;
    adj_[j][i] = it->second;
    if (inserted) offdiag_ += 2;
  }

  void eliminate_sparse_1(Index k) {
    const double d = diag_[k];
    const auto col = detach(k);
    retire(k);
    blocks_.push_back({k, -1, d, 0.0, 0.0});
    std::vector<double> l(col.size());
    for (std::size_t a = 0; a < col.size(); ++a) {
      l[a] = col[a].second / d;
      require_finite(l[a]);
      lcols_[k].emplace_back(col[a].first, l[a]);
    }
    for (std::size_t a = 0; a < col.size(); ++a) {
      const Index i = col[a].first;
      diag_[i] -= l[a] * col[a].second;
      for (std::size_t b = a + 1; b < col.size(); ++b) update_pair(i, col[b].first, l[a] * col[b].second);
    }
  }

  void eliminate_sparse_2(Index p, Index r) {
    const double a = diag_[p];
    const double b = adj_[p].at(r);
    const double c = diag_[r];
    const double det = checked_det(a, b, c);
    adj_[p].erase(r);
    adj_[r].erase(p);
    offdiag_ -= 2;
    const auto colp = detach(p);
    const auto colr = detach(r);
    retire(p);
    retire(r);
    blocks_.push_back({p, r, a, b, c});
    // Merge both columns into rows (i, a_ip, a_ir).
    struct Row {
      Index i;
      double wp, wr, lp, lr;
    };
    std::vector<Row> rows;
    std::size_t x = 0, y = 0;
    while (x < colp.size() || y < colr.size()) {
      if (y == colr.size() || (x < colp.size() && colp[x].first < colr[y].first)) {
        rows.push_back({colp[x].first, colp[x].second, 0.0, 0.0, 0.0});
        ++x;
      } else if (x == colp.size() || colr[y].first < colp[x].first) {
        rows.push_back({colr[y].first, 0.0, colr[y].second, 0.0, 0.0});
        ++y;
      } else {
        rows.push_back({colp[x].first, colp[x].second, colr[y].second, 0.0, 0.0});
        ++x;
        ++y;
      }
    }
    for (auto& row : rows) {
      std::tie(row.lp, row.lr) = pair_multipliers(a, b, c, det, row.wp, row.wr);
      if (row.lp != 0) lcols_[p].emplace_back(row.i, row.lp);
      if (row.lr != 0) lcols_[r].emplace_back(row.i, row.lr);
    }
    for (std::size_t s = 0; s < rows.size(); ++s) {
      const Row& ri = rows[s];
      diag_[ri.i] -= ri.lp * ri.wp + ri.lr * ri.wr;
      for (std::size_t t = s + 1; t < rows.size(); ++t) {
        update_pair(ri.i, rows[t].i, ri.lp * rows[t].wp + ri.lr * rows[t].wr);
      }
    }
  }

  // Dense continuation over the remaining vertices in their preferred order.
  void run_dense() {
    std::vector<Index> local;
    for (Index q = cursor_; q < n_; ++q) {
      if (active_[order_[q]]) local.push_back(order_[q]);
    }
    const auto m = static_cast<Index>(local.size());
    std::vector<Index> to_local(n_, -1);
    for (Index q = 0; q < m; ++q) to_local[local[q]] = q;
    std::vector<double> a(static_cast<std::size_t>(m * m), 0.0);
    const auto at = [&](Index i, Index j) -> double& { return a[static_cast<std::size_t>(i * m + j)]; };
    for (Index q = 0; q < m; ++q) {
      const Index v = local[q];
      at(q, q) = diag_[v];
      for (const auto& [i, x] : adj_[v]) at(q, to_local[i]) = x;
      adj_[v].clear();
    }
    offdiag_ = 0;
    std::vector<char> live(m, 1);
    Index cursor = 0;
    const auto diag = [&](Index q) { return at(q, q); };
    const auto colmax = [&](Index q) {
      double best = 0.0;
      Index arg = -1;
      for (Index i = 0; i < m; ++i) {
        if (i == q || !live[i]) continue;
        const double v = std::fabs(at(i, q));
        if (v > best) {
          best = v;
          arg = i;
        }
      }
      return std::pair{best, arg};
    };
    std::vector<Index> nz;
    std::vector<double> l1, l2;
    for (Index left = m; left > 0;) {
      while (!live[cursor]) ++cursor;
      const PivotChoice pc = choose_pivot(cursor, pivoting_, diag, colmax);
      if (pc.second == -1) {
        const Index k = pc.first;
        const double d = at(k, k);
        live[k] = 0;
        retire(local[k]);
        --left;
        blocks_.push_back({local[k], -1, d, 0.0, 0.0});
        nz.clear();
        l1.clear();
        for (Index i = 0; i < m; ++i) {
          if (live[i] && at(i, k) != 0) {
            nz.push_back(i);
            l1.push_back(at(i, k) / d);
            require_finite(l1.back());
            lcols_[local[k]].emplace_back(local[i], l1.back());
          }
        }
        for (std::size_t s = 0; s < nz.size(); ++s) {
          const Index i = nz[s];
          at(i, i) -= l1[s] * at(i, k);
          for (std::size_t t = s + 1; t < nz.size(); ++t) {
            const Index j = nz[t];
            at(i, j) -= l1[s] * at(j, k);
            at(j, i) = at(i, j);
          }
        }
      } else {
        const Index p = pc.first;
        const Index r = pc.second;
        const double pa = at(p, p), pb = at(r, p), pcc = at(r, r);
        const double det = checked_det(pa, pb, pcc);
        live[p] = 0;
        live[r] = 0;
        retire(local[p]);
        retire(local[r]);
        left -= 2;
        blocks_.push_back({local[p], local[r], pa, pb, pcc});
        nz.clear();
        l1.clear();
        l2.clear();
        for (Index i = 0; i < m; ++i) {
          if (!live[i] || (at(i, p) == 0 && at(i, r) == 0)) continue;
          const auto [lp, lr] = pair_multipliers(pa, pb, pcc, det, at(i, p), at(i, r));
          nz.push_back(i);
          l1.push_back(lp);
          l2.push_back(lr);
          if (lp != 0) lcols_[local[p]].emplace_back(local[i], lp);
          if (lr != 0) lcols_[local[r]].emplace_back(local[i], lr);
        }
        for (std::size_t s = 0; s < nz.size(); ++s) {
          const Index i = nz[s];
          at(i, i) -= l1[s] * at(i, p) + l2[s] * at(i, r);
          for (std::size_t t = s + 1; t < nz.size(); ++t) {
            const Index j = nz[t];
            at(i, j) -= l1[s] * at(j, p) + l2[s] * at(j, r);
            at(j, i) = at(i, j);
          }
        }
      }
    }
  }

  LdltFactors assemble() {
    LdltFactors f;
    f.perm = elim_order_;
    const auto pos = invert_permutation(f.perm);
    std::vector<Triplet> t;
    for (Index v = 0; v < n_; ++v) {
      t.push_back({pos[v], pos[v], 1.0});
      for (const auto& [i, x] : lcols_[v]) t.push_back({pos[i], pos[v], x});
    }
    f.lower = SparseMatrix::from_triplets(n_, n_, t);
    for (const auto& b : blocks_) {
      if (b.second == -1) {
        f.d.blocks.push_back(DiagBlock::scalar(pos[b.first], b.a));
      } else {
        f.d.blocks.push_back(DiagBlock::pair(pos[b.first], b.a, b.b, b.c));
      }
    }
    return f;
  }

  struct PendingBlock {
    Index first;
    Index second;
    double a, b, c;
  };

  Index n_;
  std::vector<Index> order_;
  Pivoting pivoting_;
  std::vector<double> diag_;
  std::vector<std::unordered_map<Index, double>> adj_;
  std::vector<char> active_;
  std::vector<std::vector<std::pair<Index, double>>> lcols_;
  std::vector<PendingBlock> blocks_;
  std::vector<Index> elim_order_;
  Index cursor_ = 0;
  Index remaining_ = 0;
  Index offdiag_ = 0;
};

}  // namespace

LdltFactors ldlt(const SparseMatrix& s, std::span<const Index> order, Pivoting pivoting) {
  if (!s.is_square() || !s.is_symmetric()) throw InvalidArgument("ldlt: matrix is not symmetric");
  std::vector<Index> computed;
  if (order.empty()) {
    computed = fill_reducing_order(s);
    order = computed;
  }
  if (!is_permutation(order, s.rows())) throw InvalidArgument("ldlt: order is not a permutation");
  Factorizer f(s, order, pivoting);
  return f.run();
}

std::vector<double> solve_ldlt(const LdltFactors& f, std::span<const double> rhs) {
  const Index n = f.dim();
  if (static_cast<Index>(rhs.size()) != n) throw DimensionMismatch("solve_ldlt: length mismatch");
  const auto cp = f.lower.col_ptr();
  const auto ri = f.lower.row_idx();
  const auto lv = f.lower.values();
  std::vector<double> x(n);
  for (Index i = 0; i < n; ++i) x[i] = rhs[f.perm[i]];
  // L y = P rhs, column oriented; the diagonal entry is the first in each
  // column and equals one.
  for (Index j = 0; j < n; ++j) {
    for (Index p = cp[j] + 1; p < cp[j + 1]; ++p) x[ri[p]] -= lv[p] * x[j];
  }
  for (const auto& b : f.d.blocks) {
    if (b.size == 1) {
      if (b.a == 0) throw DivisionByZero("solve_ldlt: zero pivot");
      x[b.first] /= b.a;
    } else {
      if (det2_sign(b.a, b.b, b.c) == 0) throw DivisionByZero("solve_ldlt: singular 2x2 pivot");
      const double det = det2_value(b.a, b.b, b.c);
      const double r1 = x[b.first];
      const double r2 = x[b.first + 1];
      x[b.first] = (b.c * r1 - b.b * r2) / det;
      x[b.first + 1] = (b.a * r2 - b.b * r1) / det;
    }
  }
  for (Index j = n - 1; j >= 0; --j) {
    double s = x[j];
    for (Index p = cp[j] + 1; p < cp[j + 1]; ++p) s -= lv[p] * x[ri[p]];
    x[j] = s;
  }
  std::vector<double> out(n);
  for (Index i = 0; i < n; ++i) out[f.perm[i]] = x[i];
  return out;
}

}  // namespace verisparse
