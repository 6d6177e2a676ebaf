#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "verisparse/error.hpp"
#include "verisparse/sparse_matrix.hpp"

namespace verisparse {

class MatrixMarketError : public Error {
 public:
  enum class Kind {
    malformed_header,
    unsupported_format,  // complex, hermitian, integer-overflow style headers
    pattern_field,       // pattern matrices carry no values
    malformed_entry,
    index_out_of_bounds,
    io,
  };

  MatrixMarketError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Reads a real (or integer) coordinate or array Matrix Market stream with
// general, symmetric or skew-symmetric storage. Symmetric storage is expanded
// to the full pattern; duplicate coordinates are summed.
SparseMatrix mm_read(std::istream& in);
SparseMatrix mm_read_file(const std::filesystem::path& path);

// Writes "matrix coordinate real general" with 17 significant digits, enough
// to round-trip every binary64 value.
void mm_write(std::ostream& out, const SparseMatrix& a);
void mm_write_file(const std::filesystem::path& path, const SparseMatrix& a);

// Reads a dense vector stored as an n x 1 array or coordinate file.
std::vector<double> mm_read_vector(std::istream& in);
std::vector<double> mm_read_vector_file(const std::filesystem::path& path);

}  // namespace verisparse
