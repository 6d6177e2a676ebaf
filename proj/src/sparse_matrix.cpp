#include "verisparse/sparse_matrix.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "verisparse/error.hpp"

namespace verisparse {

SparseMatrix::SparseMatrix(Index rows, Index cols) : rows_(rows), cols_(cols), col_ptr_(cols + 1, 0) {
  if (rows < 0 || cols < 0) throw InvalidArgument("SparseMatrix: negative dimension");
}

SparseMatrix::SparseMatrix(Index rows, Index cols, std::vector<Index> col_ptr, std::vector<Index> row_idx,
                           std::vector<double> values)
    : rows_(rows), cols_(cols), col_ptr_(std::move(col_ptr)), row_idx_(std::move(row_idx)), values_(std::move(values)) {
  if (rows < 0 || cols < 0) throw InvalidArgument("SparseMatrix: negative dimension");
  if (static_cast<Index>(col_ptr_.size()) != cols + 1 || col_ptr_.front() != 0) {
    throw InvalidArgument("SparseMatrix: bad column pointer array");
  }
  if (row_idx_.size() != values_.size() || col_ptr_.back() != static_cast<Index>(row_idx_.size())) {
    throw InvalidArgument("SparseMatrix: pattern and value arrays disagree");
  }
  for (Index j = 0; j < cols; ++j) {
    if (col_ptr_[j] > col_ptr_[j + 1]) throw InvalidArgument("SparseMatrix: column pointers decrease");
    for (Index p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p) {
      if (row_idx_[p] < 0 || row_idx_[p] >= rows) throw InvalidArgument("SparseMatrix: row index out of range");
      if (p > col_ptr_[j] && row_idx_[p] <= row_idx_[p - 1]) {
        throw InvalidArgument("SparseMatrix: row indices not strictly increasing");
      }
    }
  }
}

SparseMatrix SparseMatrix::from_triplets(Index rows, Index cols, std::span<const Triplet> triplets) {
  if (rows < 0 || cols < 0) throw InvalidArgument("from_triplets: negative dimension");
  std::vector<Index> count(cols + 1, 0);
  for (const auto& t : triplets) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
      throw InvalidArgument("from_triplets: index out of range");
    }
    ++count[t.col + 1];
  }
  std::partial_sum(count.begin(), count.end(), count.begin());
  std::vector<Index> next(count.begin(), count.end() - 1);
  std::vector<Index> rows_tmp(triplets.size());
  std::vector<double> vals_tmp(triplets.size());
  for (const auto& t : triplets) {
    const Index p = next[t.col]++;
    rows_tmp[p] = t.row;
    vals_tmp[p] = t.value;
  }
  // Sort each column by row (stable, so duplicates are summed in input order).
  std::vector<Index> col_ptr(cols + 1, 0);
  std::vector<Index> row_idx;
  std::vector<double> values;
  row_idx.reserve(triplets.size());
  values.reserve(triplets.size());
  std::vector<Index> order;
  for (Index j = 0; j < cols; ++j) {
    order.resize(count[j + 1] - count[j]);
    std::iota(order.begin(), order.end(), count[j]);
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return rows_tmp[a] < rows_tmp[b]; });
    for (const Index p : order) {
      if (static_cast<Index>(row_idx.size()) > col_ptr[j] && row_idx.back() == rows_tmp[p]) {
        values.back() += vals_tmp[p];
      } else {
        row_idx.push_back(rows_tmp[p]);
        values.push_back(vals_tmp[p]);
      }
    }
    col_ptr[j + 1] = static_cast<Index>(row_idx.size());
  }
  return SparseMatrix(rows, cols, std::move(col_ptr), std::move(row_idx), std::move(values));
}

SparseMatrix SparseMatrix::identity(Index n) {
  std::vector<double> ones(n, 1.0);
  return diagonal(ones);
}

SparseMatrix SparseMatrix::diagonal(std::span<const double> d) {
  const auto n = static_cast<Index>(d.size());
  std::vector<Index> col_ptr(n + 1);
  std::iota(col_ptr.begin(), col_ptr.end(), Index{0});
  std::vector<Index> row_idx(n);
  std::iota(row_idx.begin(), row_idx.end(), Index{0});
  return SparseMatrix(n, n, std::move(col_ptr), std::move(row_idx), std::vector<double>(d.begin(), d.end()));
}

SparseMatrix SparseMatrix::from_dense(Index rows, Index cols, std::span<const double> col_major, bool keep_zeros) {
  if (static_cast<Index>(col_major.size()) != rows * cols) throw DimensionMismatch("from_dense: size mismatch");
  std::vector<Index> col_ptr(cols + 1, 0);
  std::vector<Index> row_idx;
  std::vector<double> values;
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      const double v = col_major[j * rows + i];
      if (v != 0 || keep_zeros) {
        row_idx.push_back(i);
        values.push_back(v);
      }
    }
    col_ptr[j + 1] = static_cast<Index>(row_idx.size());
  }
  return SparseMatrix(rows, cols, std::move(col_ptr), std::move(row_idx), std::move(values));
}

Index SparseMatrix::find(Index i, Index j) const {
  if (i < 0 || i >= rows_ || j < 0 || j >= cols_) return -1;
  const auto first = row_idx_.begin() + col_ptr_[j];
  const auto last = row_idx_.begin() + col_ptr_[j + 1];
  const auto it = std::lower_bound(first, last, i);
  return (it != last && *it == i) ? static_cast<Index>(it - row_idx_.begin()) : -1;
}

double SparseMatrix::coeff(Index i, Index j) const {
  const Index p = find(i, j);
  return p < 0 ? 0.0 : values_[p];
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<Index> col_ptr(rows_ + 1, 0);
  for (const Index i : row_idx_) ++col_ptr[i + 1];
  std::partial_sum(col_ptr.begin(), col_ptr.end(), col_ptr.begin());
  std::vector<Index> next(col_ptr.begin(), col_ptr.end() - 1);
  std::vector<Index> row_idx(row_idx_.size());
  std::vector<double> values(values_.size());
  for (Index j = 0; j < cols_; ++j) {
    for (Index p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p) {
      const Index q = next[row_idx_[p]]++;
      row_idx[q] = j;
      values[q] = values_[p];
    }
  }
  return SparseMatrix(cols_, rows_, std::move(col_ptr), std::move(row_idx), std::move(values));
}

SparseMatrix SparseMatrix::permute(std::span<const Index> row_perm, std::span<const Index> col_perm) const {
  if (!is_permutation(row_perm, rows_) || !is_permutation(col_perm, cols_)) {
    throw InvalidArgument("permute: not a permutation");
  }
  const auto row_inv = invert_permutation(row_perm);
  std::vector<Index> col_ptr(cols_ + 1, 0);
  std::vector<Index> row_idx;
  std::vector<double> values;
  row_idx.reserve(row_idx_.size());
  values.reserve(values_.size());
  std::vector<std::pair<Index, double>> column;
  for (Index j = 0; j < cols_; ++j) {
    const Index src = col_perm[j];
    column.clear();
    for (Index p = col_ptr_[src]; p < col_ptr_[src + 1]; ++p) column.emplace_back(row_inv[row_idx_[p]], values_[p]);
    std::sort(column.begin(), column.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [i, v] : column) {
      row_idx.push_back(i);
      values.push_back(v);
    }
    col_ptr[j + 1] = static_cast<Index>(row_idx.size());
  }
  return SparseMatrix(rows_, cols_, std::move(col_ptr), std::move(row_idx), std::move(values));
}

bool SparseMatrix::is_symmetric() const {
  if (!is_square()) return false;
  const SparseMatrix t = transpose();
  if (t.col_ptr_ != col_ptr_ || t.row_idx_ != row_idx_) return false;
  for (std::size_t p = 0; p < values_.size(); ++p) {
    if (std::bit_cast<std::uint64_t>(values_[p]) != std::bit_cast<std::uint64_t>(t.values_[p])) return false;
  }
  return true;
}

std::vector<double> SparseMatrix::to_dense() const {
  std::vector<double> dense(static_cast<std::size_t>(rows_ * cols_), 0.0);
  for (Index j = 0; j < cols_; ++j) {
    for (Index p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p) dense[j * rows_ + row_idx_[p]] = values_[p];
  }
  return dense;
}

SparseMatrix augment(const SparseMatrix& a) {
  if (!a.is_square()) throw InvalidArgument("augment: matrix is not square");
  const Index n = a.rows();
  const SparseMatrix at = a.transpose();
  // Column j < n holds A(:, j) in rows n..2n-1; column n + j holds A^T(:, j).
  std::vector<Index> col_ptr(2 * n + 1, 0);
  std::vector<Index> row_idx;
  std::vector<double> values;
  row_idx.reserve(2 * a.nnz());
  values.reserve(2 * a.nnz());
  const auto append = [&](const SparseMatrix& m, Index j, Index offset) {
    for (Index p = m.col_ptr()[j]; p < m.col_ptr()[j + 1]; ++p) {
      row_idx.push_back(m.row_idx()[p] + offset);
      values.push_back(m.values()[p]);
    }
  };
  for (Index j = 0; j < n; ++j) {
    append(a, j, n);
    col_ptr[j + 1] = static_cast<Index>(row_idx.size());
  }
  for (Index j = 0; j < n; ++j) {
    append(at, j, 0);
    col_ptr[n + j + 1] = static_cast<Index>(row_idx.size());
  }
  return SparseMatrix(2 * n, 2 * n, std::move(col_ptr), std::move(row_idx), std::move(values));
}

SparseMatrix add_diagonal(const SparseMatrix& s, double shift) {
  if (!s.is_square()) throw InvalidArgument("add_diagonal: matrix is not square");
  const Index n = s.rows();
  std::vector<Index> col_ptr(n + 1, 0);
  std::vector<Index> row_idx;
  std::vector<double> values;
  row_idx.reserve(s.nnz() + n);
  values.reserve(s.nnz() + n);
  for (Index j = 0; j < n; ++j) {
    bool placed = false;
    for (Index p = s.col_ptr()[j]; p < s.col_ptr()[j + 1]; ++p) {
      const Index i = s.row_idx()[p];
      if (!placed && i >= j) {
        if (i == j) {
          row_idx.push_back(j);
          values.push_back(s.values()[p] + shift);
          placed = true;
          continue;
        }
        row_idx.push_back(j);
        values.push_back(shift);
        placed = true;
      }
      row_idx.push_back(i);
      values.push_back(s.values()[p]);
    }
    if (!placed) {
      row_idx.push_back(j);
      values.push_back(shift);
    }
    col_ptr[j + 1] = static_cast<Index>(row_idx.size());
  }
  return SparseMatrix(n, n, std::move(col_ptr), std::move(row_idx), std::move(values));
}

std::vector<double> spmv(const SparseMatrix& a, std::span<const double> x) {
  if (static_cast<Index>(x.size()) != a.cols()) throw DimensionMismatch("spmv: dimension mismatch");
  // Row-wise accumulation in column-index order.
  const SparseMatrix at = a.transpose();
  std::vector<double> y(a.rows(), 0.0);
  for (Index i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (Index p = at.col_ptr()[i]; p < at.col_ptr()[i + 1]; ++p) s += at.values()[p] * x[at.row_idx()[p]];
    y[i] = s;
  }
  return y;
}

std::vector<double> spmv_transpose(const SparseMatrix& a, std::span<const double> x) {
  if (static_cast<Index>(x.size()) != a.rows()) throw DimensionMismatch("spmv_transpose: dimension mismatch");
  std::vector<double> y(a.cols(), 0.0);
  for (Index j = 0; j < a.cols(); ++j) {
    double s = 0.0;
    for (Index p = a.col_ptr()[j]; p < a.col_ptr()[j + 1]; ++p) s += a.values()[p] * x[a.row_idx()[p]];
    y[j] = s;
  }
  return y;
}

std::vector<Index> invert_permutation(std::span<const Index> perm) {
  std::vector<Index> inv(perm.size());
  for (std::size_t k = 0; k < perm.size(); ++k) inv[perm[k]] = static_cast<Index>(k);
  return inv;
}

bool is_permutation(std::span<const Index> perm, Index n) {
  if (static_cast<Index>(perm.size()) != n) return false;
  std::vector<char> seen(n, 0);
  for (const Index k : perm) {
    if (k < 0 || k >= n || seen[k]) return false;
    seen[k] = 1;
  }
  return true;
}

std::uint64_t content_hash(const SparseMatrix& a) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto mix = [&h](std::uint64_t word) {
    for (int b = 0; b < 8; ++b) {
      h ^= (word >> (8 * b)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  mix(static_cast<std::uint64_t>(a.rows()));
  mix(static_cast<std::uint64_t>(a.cols()));
  for (const Index p : a.col_ptr()) mix(static_cast<std::uint64_t>(p));
  for (const Index i : a.row_idx()) mix(static_cast<std::uint64_t>(i));
  for (const double v : a.values()) mix(std::bit_cast<std::uint64_t>(v));
  return h;
}

}  // namespace verisparse
