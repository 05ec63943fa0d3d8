#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "inclab/covariance.hpp"
#include "inclab/types.hpp"

namespace inclab {

struct SelectionResult {
  std::vector<int> selected;  // in pick order
  Eigen::VectorXd scores;     // marginal scores, or residual scores at the last pick
  bool tie_flag = false;
};

/// Population marginal regression: scores |Sigma beta|, top-s selection.
/// Exact ties at the cut set tie_flag and resolve to the smallest index.
SelectionResult population_mr_select(const CovMatrix& sigma, const CoefVector& beta, int s);

/// min_{j in S} |<Sigma_*j, beta>| - max_{k off S} |<Sigma_*k, beta>| - delta.
/// Positive iff MR recovers this beta with slack delta.
double margin_of_beta(const CovMatrix& sigma, const Eigen::VectorXd& beta,
                      const Support& support, double slack);

struct LassoSolution {
  Eigen::VectorXd beta_hat;
  Eigen::VectorXd dual_u;
  double lambda = 0.0;
  double kkt_residual = 0.0;
};

/// Population Lasso on 1/2 b' Sigma b - b' Sigma beta* + lambda ||b||_1.
/// Solved by cyclic coordinate descent; when the closed-form KKT
/// construction is strictly dual feasible the two routes are cross-checked
/// and the construction is returned.
LassoSolution population_lasso(const CovMatrix& sigma, const CoefVector& beta_star, double lambda);

/// A lambda small enough for sign consistency on this instance:
/// 1e-4 * min_j |beta*_j| * lambda_min(Sigma_SS).
double adaptive_small_lambda(const CovMatrix& sigma, const CoefVector& beta_star);

/// Population orthogonal matching pursuit: s greedy picks with exact refit
/// against the selected block.
SelectionResult population_omp(const CovMatrix& sigma, const CoefVector& beta, int s);

enum class TruthCondition { F1, F2, F3, F5 };

[[nodiscard]] std::string to_string(TruthCondition c);

/// Attempts to falsify the universally quantified score-ordering condition.
/// F2 (vertex enumeration) and F3 (operator-norm oracle) are exact; F1 is
/// exact for R >= 2 via dual-guided candidates and a search otherwise; F5 is
/// search only.
RecoveryVerdict truthfulness_search(const CovMatrix& sigma, const Support& support,
                                    TruthCondition condition, double rho, const Spread& spread,
                                    std::uint64_t budget, std::uint64_t seed);

/// Exact F2 statistic: min over all sign patterns v of
/// rho * (min_j |(Sigma v)_j| - max_k |(Sigma v)_k|). The condition holds
/// uniformly over Gamma_{S,rho,1} with slack delta iff this exceeds delta.
double f2_exact_margin(const CovMatrix& sigma, const Support& support, double rho);

struct Conjecture1Report {
  int instances = 0;
  int f2_pass = 0;
  int boundary = 0;  // skipped: within 1e-9 of either decision boundary
  int counterexamples = 0;
  std::vector<std::string> counterexample_csv;  // offending Sigma, embedded CSV
  std::vector<std::vector<int>> counterexample_supports;
};

/// Searches random instances for cases where F2 holds (exact vertex check)
/// but F3 fails (exact operator-norm check).
Conjecture1Report conjecture1_search(int instance_count, int p_max, int s_max,
                                     std::uint64_t seed);

}  // namespace inclab
