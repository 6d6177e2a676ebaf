#pragma once

// Comparison methods: normal-equation positive definiteness, and inverse-norm
// and componentwise bounds from approximate inverses of LU factors. These
// form dense n x n intermediates.

#include <optional>
#include <span>
#include <vector>

#include "verisparse/interval_matrix.hpp"
#include "verisparse/lu.hpp"
#include "verisparse/sparse_matrix.hpp"

namespace verisparse {

// True only if every symmetric member of s is positive definite. Runs a
// floating-point Cholesky factorization of mid(s) with its diagonal lowered
// by a bound on the radius plus the Cholesky rounding error; success proves
// definiteness. False for non-symmetric s.
bool verify_spd(const IntervalSparseMatrix& s);

// sqrt(alpha) rounded down if A^T A - alpha I is verified positive definite,
// otherwise nullopt. Throws InvalidArgument for non-square A or alpha < 0.
std::optional<double> sigmin_normal_eq(const SparseMatrix& a, double alpha);

enum class InverseNormMethod { lu, lu_modified };

struct InverseNormBound {
  Norm p = Norm::inf;
  double bound = 0.0;        // upper bound on ||A^-1||_p
  double contraction = 0.0;  // verified ||X_L A X_U - I||_p, or alpha + beta
  InverseNormMethod method = InverseNormMethod::lu;
  // nnz of the approximate inverse factors over nnz of the LU factors.
  double inverse_fill_ratio = 0.0;
};

// Approximate inverses X_L, X_U of the LU factors and
// ||A^-1|| <= ||X_U|| ||X_L|| / (1 - ||X_L P A Q X_U - I||). nullopt when the
// LU breaks down or the contraction is not below one.
std::optional<InverseNormBound> inv_norm_lu(const SparseMatrix& a, Norm p = Norm::inf);

// As inv_norm_lu, but bounds X_L A X_U - I by
// alpha + beta >= ||X_L A - U|| ||X_U|| + ||U X_U - I||. When alpha >= 1 or
// alpha + beta >= 1 the inv_norm_lu test is applied to the same factors and
// `method` reports lu.
std::optional<InverseNormBound> inv_norm_lu_modified(const SparseMatrix& a, Norm p = Norm::inf);

// Componentwise bound |(X_L P A Q X_U)^-1| <= D^-1 + v w^T from the comparison
// matrix H = D - E of X_L P A Q X_U, valid once u = H v > 0 is verified.
class ComponentwiseBound {
 public:
  // Upper bound on |A^-1 b - x| componentwise.
  std::vector<double> error_bound(const SparseMatrix& a, std::span<const double> b, std::span<const double> x) const;
  // Entrywise upper bound on |A^-1|, dense column-major.
  std::vector<double> inverse_abs_bound() const;

  std::span<const double> u() const { return u_; }
  std::span<const double> v() const { return v_; }
  std::span<const double> w() const { return w_; }
  // Upper bounds on 1 / D_ii.
  std::span<const double> diag_inverse() const { return dinv_; }

 private:
  friend std::optional<ComponentwiseBound> componentwise_inverse_bound(const SparseMatrix&,
                                                                        std::span<const double>);
  Index n_ = 0;
  LuFactors f_;
  std::vector<double> xl_;  // dense column-major X_L
  std::vector<double> xu_;  // dense column-major X_U
  std::vector<double> u_, v_, w_, dinv_;
};

// nullopt when the LU breaks down or u = H v > 0 cannot be verified. An
// empty v selects the approximate solution of H v = ones (or ones when that
// solution is not positive). Throws InvalidArgument for a v that is not
// positive or of the wrong length.
std::optional<ComponentwiseBound> componentwise_inverse_bound(const SparseMatrix& a, std::span<const double> v = {});

}  // namespace verisparse
