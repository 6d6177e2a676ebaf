#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "verisparse/matrix_market.hpp"

using namespace verisparse;
using Kind = MatrixMarketError::Kind;

namespace {

SparseMatrix read(const std::string& text) {
  std::istringstream in(text);
  return mm_read(in);
}

Kind read_error(const std::string& text) {
  try {
    read(text);
  } catch (const MatrixMarketError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error for:\n" << text;
  return Kind::io;
}

}  // namespace

TEST(MatrixMarket, GeneralIdentity) {
  const SparseMatrix a = read("%%MatrixMarket matrix coordinate real general\n% comment\n2 2 2\n1 1 1\n2 2 1\n");
  EXPECT_EQ(a, SparseMatrix::identity(2));
}

TEST(MatrixMarket, SymmetricExpansion) {
  const SparseMatrix a = read("%%MatrixMarket matrix coordinate real symmetric\n2 2 3\n1 1 2\n2 1 1\n2 2 3\n");
  EXPECT_EQ(a.nnz(), 4);
  EXPECT_EQ(a.to_dense(), (std::vector<double>{2, 1, 1, 3}));
}

TEST(MatrixMarket, SkewAndArrayAndInteger) {
  const SparseMatrix s = read("%%MatrixMarket matrix coordinate real skew-symmetric\n2 2 1\n2 1 5\n");
  EXPECT_EQ(s.coeff(1, 0), 5.0);
  EXPECT_EQ(s.coeff(0, 1), -5.0);
  const SparseMatrix a = read("%%MatrixMarket matrix array real general\n2 2\n1\n0\n3\n4\n");
  EXPECT_EQ(a.coeff(0, 1), 3.0);
  EXPECT_EQ(a.coeff(1, 0), 0.0);
  const SparseMatrix i = read("%%MatrixMarket matrix coordinate integer general\n1 1 1\n1 1 -7\n");
  EXPECT_EQ(i.coeff(0, 0), -7.0);
}

TEST(MatrixMarket, DuplicatesSummedAndZerosKept) {
  const SparseMatrix a = read("%%MatrixMarket matrix coordinate real general\n2 2 3\n1 1 1\n1 1 2\n2 2 0\n");
  EXPECT_EQ(a.coeff(0, 0), 3.0);
  EXPECT_EQ(a.nnz(), 2);
  EXPECT_GE(a.find(1, 1), 0);
}

TEST(MatrixMarket, DistinctErrors) {
  EXPECT_EQ(read_error("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n"), Kind::index_out_of_bounds);
  EXPECT_EQ(read_error("%%MatrixMarket matrix coordinate pattern general\n2 2 1\n1 1\n"), Kind::pattern_field);
  EXPECT_EQ(read_error("hello\n"), Kind::malformed_header);
  EXPECT_EQ(read_error(""), Kind::malformed_header);
  EXPECT_EQ(read_error("%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n"), Kind::unsupported_format);
  EXPECT_EQ(read_error("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n"), Kind::malformed_entry);
  EXPECT_EQ(read_error("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 x\n"), Kind::malformed_entry);
  EXPECT_THROW(mm_read_file("/nonexistent/file.mtx"), MatrixMarketError);
}

TEST(MatrixMarket, WriteReadRoundTripIsBitExact) {
  std::mt19937_64 rng(73);
  for (int t = 0; t < 20; ++t) {
    SparseMatrix a = oracle::random_sparse(rng, 1 + t * 3, 0.2, false);
    std::vector<double> v(a.values().begin(), a.values().end());
    for (double& x : v) x = std::ldexp(x, std::uniform_int_distribution<int>(-1070, 1000)(rng));
    if (!v.empty()) v[0] = 0.0;  // explicit zero survives
    a = SparseMatrix(a.rows(), a.cols(), {a.col_ptr().begin(), a.col_ptr().end()},
                     {a.row_idx().begin(), a.row_idx().end()}, v);
    std::stringstream io;
    mm_write(io, a);
    EXPECT_EQ(mm_read(io), a);
  }
}

TEST(MatrixMarket, FilesAndVectors) {
  const auto dir = std::filesystem::temp_directory_path() / "verisparse_mm_test";
  std::filesystem::create_directories(dir);
  const SparseMatrix a = SparseMatrix::identity(3);
  mm_write_file(dir / "a.mtx", a);
  EXPECT_EQ(mm_read_file(dir / "a.mtx"), a);
  std::istringstream v("%%MatrixMarket matrix array real general\n3 1\n1\n2.5\n-3\n");
  EXPECT_EQ(mm_read_vector(v), (std::vector<double>{1, 2.5, -3}));
  std::istringstream bad("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n");
  EXPECT_THROW(mm_read_vector(bad), MatrixMarketError);
  std::filesystem::remove_all(dir);
}
