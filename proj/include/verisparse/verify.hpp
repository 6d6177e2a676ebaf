#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "verisparse/equilibrate.hpp"
#include "verisparse/interval_matrix.hpp"
#include "verisparse/ldlt.hpp"
#include "verisparse/shift.hpp"
#include "verisparse/sparse_matrix.hpp"

namespace verisparse {

inline constexpr const char* kVersion = "1.0.0";

enum class VerifyStatus { verified, failed_inertia, failed_residual, failed_breakdown };

const char* to_string(VerifyStatus s);

struct VerifyOptions {
  bool precond = false;  // equilibrate before augmenting
  bool acc = false;      // sharp interval products for the residual bound
  ShiftPolicy policy;
  Pivoting pivoting = Pivoting::bunch_kaufman;
  // Replaces the built-in estimate of the smallest singular value.
  std::optional<double> sigma_estimate;
};

// One tried shift. rho is NaN when the residual was not computed.
struct AttemptRecord {
  double theta = 0.0;
  double rho = 0.0;
  std::optional<Inertia> counts;
  VerifyStatus outcome = VerifyStatus::failed_breakdown;

  friend bool operator==(const AttemptRecord&, const AttemptRecord&);
};

struct MatrixFingerprint {
  Index n = 0;
  Index nnz = 0;
  std::uint64_t hash = 0;

  friend bool operator==(const MatrixFingerprint&, const MatrixFingerprint&) = default;
};

MatrixFingerprint fingerprint(const SparseMatrix& a);

// Outcome of verifying a lower bound on the smallest singular value.
//
// When status is verified: counts are (n, n, 0) for the 2n x 2n shifted
// augmented matrix, rho < theta, delta = theta - rho rounded down,
// inv_norm_bound = 1 / delta rounded up, and delta_original is the bound for
// the input matrix after undoing the equilibration (equal to delta without
// one). Otherwise delta and delta_original are 0 and the bounds are +inf.
struct Certificate {
  VerifyStatus status = VerifyStatus::failed_breakdown;
  double theta = 0.0;
  double rho = 0.0;
  Inertia counts;
  double delta = 0.0;
  double inv_norm_bound = 0.0;
  std::optional<Equilibration> equilibration;
  double delta_original = 0.0;
  double inv_norm_bound_original = 0.0;
  double sigma_estimate = 0.0;
  std::vector<AttemptRecord> attempts;
  std::vector<Index> ordering;  // elimination order of the augmented matrix
  bool precond = false;
  bool acc = false;
  Pivoting pivoting = Pivoting::bunch_kaufman;
  ShiftPolicy policy;
  MatrixFingerprint matrix;
  std::string version = kVersion;
  std::string message;

  bool verified() const { return status == VerifyStatus::verified; }
};

// Certificate plus what the solver reuses: the matrix that was verified
// (equilibrated or not) and the factors of its shifted augmented matrix.
struct Verification {
  Certificate certificate;
  SparseMatrix system;
  std::optional<LdltFactors> factors;
};

// Upper bound on ||P S P^T - L D L^T||_2 where S = shifted is the matrix that
// was factored and P the factor permutation, from an interval evaluation of
// L (D L^T).
double residual_norm_bound(const SparseMatrix& shifted, const LdltFactors& f, Accuracy accuracy = Accuracy::sharp);
// Same with S = [[0, A^T], [A, 0]] + theta I assembled from a_bar.
double residual_norm_bound(const SparseMatrix& a_bar, double theta, const LdltFactors& f,
                           Accuracy accuracy = Accuracy::sharp);

// Rigorous lower bound on sigma_min(A). Never throws for numerical reasons:
// singular, ill-conditioned or non-finite input yields a failed status.
// Throws InvalidArgument for a non-square or empty A or an invalid policy.
Certificate verify_sigmin(const SparseMatrix& a, const VerifyOptions& opts = {});
Verification verify_and_factor(const SparseMatrix& a, const VerifyOptions& opts = {});

// Re-derives the factorization at the recorded shift, ordering and options
// and confirms every inequality the certificate claims. False on any
// mismatch, including a certificate that is not verified.
bool check_certificate(const SparseMatrix& a, const Certificate& cert);

}  // namespace verisparse
