#include "verisparse/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace verisparse {

namespace {

using Kind = MatrixMarketError::Kind;

enum class Symmetry { general, symmetric, skew };

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool next_data_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '%') continue;
    return true;
  }
  return false;
}

double parse_value(const std::string& token) {
  // strtod handles the full decimal/hex grammar including inf/nan spellings.
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0') throw MatrixMarketError(Kind::malformed_entry, "bad value: " + token);
  return v;
}

Index parse_index(const std::string& token) {
  Index v = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw MatrixMarketError(Kind::malformed_entry, "bad index: " + token);
  }
  return v;
}

}  // namespace

SparseMatrix mm_read(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw MatrixMarketError(Kind::malformed_header, "empty input");
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket" || symmetry.empty()) {
    throw MatrixMarketError(Kind::malformed_header, "missing %%MatrixMarket banner");
  }
  object = lower(object);
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (object != "matrix") throw MatrixMarketError(Kind::malformed_header, "object must be 'matrix'");
  if (format != "coordinate" && format != "array") {
    throw MatrixMarketError(Kind::malformed_header, "format must be coordinate or array");
  }
  if (field == "pattern") throw MatrixMarketError(Kind::pattern_field, "pattern matrices carry no values");
  if (field != "real" && field != "integer" && field != "double") {
    throw MatrixMarketError(Kind::unsupported_format, "unsupported field: " + field);
  }
  Symmetry sym;
  if (symmetry == "general") {
    sym = Symmetry::general;
  } else if (symmetry == "symmetric") {
    sym = Symmetry::symmetric;
  } else if (symmetry == "skew-symmetric") {
    sym = Symmetry::skew;
  } else {
    throw MatrixMarketError(Kind::unsupported_format, "unsupported symmetry: " + symmetry);
  }

  if (!next_data_line(in, line)) throw MatrixMarketError(Kind::malformed_header, "missing size line");
  std::istringstream size_line(line);
  std::string t_rows, t_cols, t_nnz;
  size_line >> t_rows >> t_cols;
  if (t_cols.empty()) throw MatrixMarketError(Kind::malformed_header, "bad size line");
  const Index rows = parse_index(t_rows);
  const Index cols = parse_index(t_cols);
  if (rows < 0 || cols < 0) throw MatrixMarketError(Kind::malformed_header, "negative dimension");
  if (sym != Symmetry::general && rows != cols) {
    throw MatrixMarketError(Kind::malformed_header, "symmetric storage requires a square matrix");
  }

  std::vector<Triplet> triplets;
  const auto push = [&](Index i, Index j, double v) {
    triplets.push_back({i, j, v});
    if (i != j && sym == Symmetry::symmetric) triplets.push_back({j, i, v});
    if (i != j && sym == Symmetry::skew) triplets.push_back({j, i, -v});
  };

  if (format == "coordinate") {
    size_line >> t_nnz;
    if (t_nnz.empty()) throw MatrixMarketError(Kind::malformed_header, "coordinate size line needs nnz");
    const Index entries = parse_index(t_nnz);
    if (entries < 0) throw MatrixMarketError(Kind::malformed_header, "negative entry count");
    triplets.reserve(sym == Symmetry::general ? entries : 2 * entries);
    for (Index k = 0; k < entries; ++k) {
      if (!next_data_line(in, line)) throw MatrixMarketError(Kind::malformed_entry, "truncated entry list");
      std::istringstream entry(line);
      std::string ti, tj, tv;
      entry >> ti >> tj >> tv;
      if (tv.empty()) throw MatrixMarketError(Kind::malformed_entry, "entry needs row, column and value");
      const Index i = parse_index(ti) - 1;
      const Index j = parse_index(tj) - 1;
      if (i < 0 || i >= rows || j < 0 || j >= cols) {
        throw MatrixMarketError(Kind::index_out_of_bounds, "entry index out of bounds: " + line);
      }
      if (sym == Symmetry::skew && i == j) {
        throw MatrixMarketError(Kind::malformed_entry, "skew-symmetric storage cannot hold diagonal entries");
      }
      push(i, j, parse_value(tv));
    }
  } else {
    // Column-major values; symmetric kinds store the lower triangle only.
    for (Index j = 0; j < cols; ++j) {
      const Index first = sym == Symmetry::general ? 0 : (sym == Symmetry::symmetric ? j : j + 1);
      for (Index i = first; i < rows; ++i) {
        if (!next_data_line(in, line)) throw MatrixMarketError(Kind::malformed_entry, "truncated array data");
        std::istringstream entry(line);
        std::string tv;
        entry >> tv;
        const double v = parse_value(tv);
        if (v != 0) push(i, j, v);
      }
    }
  }
  return SparseMatrix::from_triplets(rows, cols, triplets);
}

SparseMatrix mm_read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MatrixMarketError(Kind::io, "cannot open " + path.string());
  return mm_read(in);
}

void mm_write(std::ostream& out, const SparseMatrix& a) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n';
  char buf[64];
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index p = a.col_ptr()[j]; p < a.col_ptr()[j + 1]; ++p) {
      std::snprintf(buf, sizeof buf, "%.17g", a.values()[p]);
      out << a.row_idx()[p] + 1 << ' ' << j + 1 << ' ' << buf << '\n';
    }
  }
}

void mm_write_file(const std::filesystem::path& path, const SparseMatrix& a) {
  std::ofstream out(path);
  if (!out) throw MatrixMarketError(Kind::io, "cannot write " + path.string());
  mm_write(out, a);
  if (!out) throw MatrixMarketError(Kind::io, "write failed for " + path.string());
}

std::vector<double> mm_read_vector(std::istream& in) {
  const SparseMatrix v = mm_read(in);
  if (v.cols() != 1 && v.rows() != 1) throw MatrixMarketError(Kind::malformed_header, "expected a vector");
  const auto dense = v.to_dense();
  return dense;
}

std::vector<double> mm_read_vector_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MatrixMarketError(Kind::io, "cannot open " + path.string());
  return mm_read_vector(in);
}

}  // namespace verisparse
