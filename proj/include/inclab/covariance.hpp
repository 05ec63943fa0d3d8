#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "inclab/types.hpp"

namespace inclab {

inline constexpr double kDefaultPsdTol = 1e-9;

/// Unit-diagonal covariance (correlation) matrix. Immutable after
/// construction; all invariants are enforced on entry:
///   - exactly symmetric,
///   - diagonal exactly one,
///   - off-diagonal entries in [-1, 1],
///   - smallest eigenvalue >= -psd_tol.
class CovMatrix {
 public:
  static CovMatrix from_entries(Eigen::MatrixXd entries, double psd_tol = kDefaultPsdTol);

  [[nodiscard]] int dim() const { return static_cast<int>(entries_.rows()); }
  [[nodiscard]] const Eigen::MatrixXd& matrix() const { return entries_; }
  [[nodiscard]] double operator()(int i, int j) const { return entries_(i, j); }
  [[nodiscard]] Eigen::VectorXd column(int j) const { return entries_.col(j); }
  [[nodiscard]] double min_eigenvalue() const { return min_eig_; }

  /// Submatrix indexed by rows/cols.
  [[nodiscard]] Eigen::MatrixXd block(const std::vector<int>& rows,
                                      const std::vector<int>& cols) const;
  /// Rows S of column j, i.e. Sigma_{Sj}.
  [[nodiscard]] Eigen::VectorXd sub_column(const std::vector<int>& rows, int j) const;

  [[nodiscard]] bool is_identity() const;

 private:
  CovMatrix(Eigen::MatrixXd entries, double min_eig)
      : entries_(std::move(entries)), min_eig_(min_eig) {}

  Eigen::MatrixXd entries_;
  double min_eig_;
};

CovMatrix identity_cov(int p);

/// Block-equicorrelated example: Sigma_SS is block diagonal with blocks
/// (1-mu) I + mu 11^T of the given sizes, every off-support column carries
/// eta on the coordinates of the aligned block (which must have maximal
/// size) and zero elsewhere, and Sigma_{S^c S^c} = I. Parameter combinations
/// that break positive semidefiniteness are rejected.
CovMatrix block_example_cov(int p, const Support& support, const std::vector<int>& block_sizes,
                            double mu, double eta, int aligned_block);

/// Random unit-diagonal covariance: A has i.i.d. N(0,1) entries with
/// ceil(p * concentration) columns; AA^T is rescaled to unit diagonal.
/// Larger concentration pulls the result toward the identity.
CovMatrix random_unit_diag_cov(int p, std::uint64_t seed, double concentration);

/// Headerless comma-separated matrix, one row per line, 17 significant
/// digits; round-trips doubles exactly.
CovMatrix read_matrix_csv(const std::string& path);
void write_matrix_csv(const CovMatrix& m, const std::string& path);

/// Raw CSV helpers shared by reports and the CLI (no CovMatrix validation).
Eigen::MatrixXd read_dense_csv(const std::string& path);
std::string format_matrix_csv(const Eigen::MatrixXd& m);

}  // namespace inclab
