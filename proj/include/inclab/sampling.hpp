#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "inclab/covariance.hpp"
#include "inclab/selectors.hpp"
#include "inclab/types.hpp"

namespace inclab {

struct SampleConfig {
  int n = 1;
  double sigma_noise = 0.0;
  std::uint64_t seed = 0;
  int replicates = 1;
};

struct DesignSample {
  Eigen::MatrixXd x;  // n x p, rows i.i.d. N(0, Sigma)
  Eigen::VectorXd y;  // X beta + noise
};

/// Gaussian design via the symmetric matrix square root (eigendecomposition
/// with negative eigenvalues clamped at zero, so semidefinite Sigma is
/// accepted). Deterministic given config.seed.
DesignSample sample_design(const CovMatrix& sigma, const Eigen::VectorXd& beta,
                           const SampleConfig& config);

/// Sample marginal regression: scores |X^T y / n|, top-s selection with the
/// smallest-index tie rule.
SelectionResult sample_mr_select(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, int s);

struct XiBound {
  double value = 0.0;
  double t = 0.0;
  std::string method = "operator_norm_bound";
};

/// ||Sigma_SS||^{1/2} min{t, sqrt(s) rho R} — an upper bound on
/// sup ||Sigma^{1/2} beta||_2 over the class intersected with ||beta|| <= t.
XiBound xi_bound(const CovMatrix& sigma, const ParamClass& cls, double t);

struct ConcentrationReport {
  int replicates = 0;
  double xi_value = 0.0;
  double ratio_q50 = 0.0;
  double ratio_q90 = 0.0;
  double ratio_q99 = 0.0;
  double median_error = 0.0;
};

/// Scales ||r_hat - Sigma beta||_inf by (xi + sigma) sqrt(log p / n) over
/// random class members and reports quantiles of the ratio.
ConcentrationReport concentration_experiment(const CovMatrix& sigma, const ParamClass& cls,
                                             double t, const SampleConfig& config);

/// One concentration draw for a fixed beta; exposed for direct checks of the
/// degenerate regimes.
double concentration_error(const CovMatrix& sigma, const Eigen::VectorXd& beta,
                           const SampleConfig& config);

/// Family of designs swept by the phase-transition experiment. The support
/// is the first s coordinates; block families tile size-r blocks over it.
struct GaussianFamily {
  std::string name = "identity";  // "identity" or "block"
  int p = 0;
  double rho = 1.0;
  Spread spread = Spread::finite(1.0);
  double slack = 0.0;  // class slack delta; mri_check is enforced at delta/rho
  double mu = 0.0;
  double eta = 0.0;
  int r = 2;

  [[nodiscard]] CovMatrix make(int s) const;
  [[nodiscard]] Support support(int s) const;
};

struct PhaseCell {
  int p = 0;
  int s = 0;
  int n = 0;
  double success_rate = 0.0;
  int replicates = 0;
  std::uint64_t seed = 0;
};

/// Empirical exact-support recovery probability per (s, n) cell. Replicates
/// run under counter-split sub-seeds, so thread count does not change the
/// table. Each family member must satisfy the incoherence precondition.
std::vector<PhaseCell> phase_transition_sweep(const GaussianFamily& family,
                                              const std::vector<int>& s_values,
                                              const std::vector<int>& n_grid,
                                              const SampleConfig& config);

std::string phase_table_csv(const std::vector<PhaseCell>& cells);

}  // namespace inclab
