#pragma once

#include <Eigen/Core>
#include <vector>

#include "inclab/covariance.hpp"
#include "inclab/types.hpp"

namespace inclab {

/// Optimal signed partition of the support for a test functional phi:
/// value = sum_{j in s1} |phi_j| - sum_{j in s0} |phi_j| >= 0, with zero
/// coordinates of phi_S placed in s0.
struct PartitionWitness {
  std::vector<int> s1;
  std::vector<int> s0;
  double value = 0.0;
};

/// alpha(phi): exact minimum of |sum_{s1} |phi_j| - sum_{s0} |phi_j|| over
/// all partitions of S. Enumerates 2^s partitions; s <= 24.
PartitionWitness alpha(const Eigen::VectorXd& phi, const Support& support);

struct AlphaRResult {
  double value = 0.0;        // rho * min over the closed box (infimum of the open class)
  Eigen::VectorXd beta;      // a minimizing coefficient vector, scaled to sit
                             // strictly inside the class (magnitudes >= rho(1+1e-9))
};

/// alpha_R(phi) = min_{beta in Gamma_{S,rho,R}} |<phi, beta>| computed
/// exactly per sign pattern as the distance from zero to the range of the
/// linear form over the magnitude box [rho, R rho]^s. Requires finite R and
/// s <= 20.
AlphaRResult alpha_R(const Eigen::VectorXd& phi, const ParamClass& cls);

/// Gamma'_S: ||phi_S||_inf > delta/(rho(1+R)) + R/(1+R) ||phi_S||_1.
bool gamma_prime_member(const Eigen::VectorXd& phi, const ParamClass& cls, double slack);

/// Gamma''_S: ||phi_S||_inf < -delta/(rho(1+R)) + ||phi_S||_1 / (1+R).
bool gamma_doubleprime_member(const Eigen::VectorXd& phi, const ParamClass& cls, double slack);

/// Absolute-dual membership: alpha_R(phi) > delta (strict; the class is open
/// so alpha_R is an infimum and boundary cases are left to the caller).
bool dual_member(const Eigen::VectorXd& phi, const ParamClass& cls, double slack);

/// Exact-recovery characterization via the dual: pass iff
/// Sigma_{*j} + lambda Sigma_{*k} is a dual member for every j in S, k off S
/// and lambda on a uniform grid over [-1, 1] containing both endpoints.
/// On failure reports the violating (j, k, lambda) and a minimizing witness.
RecoveryVerdict recovery_by_lambda_sweep(const CovMatrix& sigma, const ParamClass& cls,
                                         double slack, int lambda_grid_size = 401);

/// Verifies alpha_R(phi) <= max{0, (2 - R) alpha(phi)} under the rho = 1
/// normalization. The caller is responsible for the qualifying-set
/// precondition (dual member, not a Gamma' member).
bool alpha_R_bound_check(const Eigen::VectorXd& phi, const ParamClass& cls);

}  // namespace inclab
