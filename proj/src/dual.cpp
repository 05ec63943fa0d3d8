#include "inclab/dual.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "inclab/selectors.hpp"

namespace inclab {

namespace {

constexpr double kClassBoundaryEps = 1e-9;

Eigen::VectorXd gather(const Eigen::VectorXd& phi, const std::vector<int>& idx) {
  Eigen::VectorXd out(idx.size());
  for (std::size_t a = 0; a < idx.size(); ++a) out[a] = phi[idx[a]];
  return out;
}

}  // namespace

PartitionWitness alpha(const Eigen::VectorXd& phi, const Support& support) {
  const int s = support.size();
  if (s > 24) throw BudgetError("alpha enumeration limited to s <= 24");
  if (phi.size() != support.dimension()) {
    throw ValidationError("phi length does not match support dimension");
  }
  const Eigen::VectorXd mags = gather(phi, support.indices()).cwiseAbs();
  const double total = mags.sum();

  // Gray-code walk over subsets; signed(mask) = sum_mask - sum_rest.
  double signed_sum = -total;
  std::uint32_t gray = 0;
  double best = std::abs(signed_sum);
  std::uint32_t best_gray = 0;
  const std::uint64_t count = 1ULL << s;
  for (std::uint64_t i = 1; i < count; ++i) {
    const int bit = __builtin_ctzll(i);
    const std::uint32_t flipped = 1u << bit;
    gray ^= flipped;
    signed_sum += (gray & flipped) ? 2.0 * mags[bit] : -2.0 * mags[bit];
    if (std::abs(signed_sum) < best) {
      best = std::abs(signed_sum);
      best_gray = gray;
    }
  }

  // Orient so s1 carries the larger sum, and keep zero coordinates in s0.
  double side = 0.0;
  for (int b = 0; b < s; ++b) {
    if (best_gray & (1u << b)) side += mags[b];
  }
  const bool flip = side < total - side;
  PartitionWitness witness;
  witness.value = best;
  for (int b = 0; b < s; ++b) {
    const bool in_s1 = (((best_gray >> b) & 1u) != 0) != flip;
    const int idx = support.indices()[b];
    if (in_s1 && mags[b] > 0.0) {
      witness.s1.push_back(idx);
    } else {
      witness.s0.push_back(idx);
    }
  }
  return witness;
}

AlphaRResult alpha_R(const Eigen::VectorXd& phi, const ParamClass& cls) {
  const Support& support = cls.support;
  const int s = support.size();
  if (s > 20) throw BudgetError("alpha_R enumeration limited to s <= 20");
  if (!cls.spread.is_finite()) {
    throw ValidationError("alpha_R requires finite R: the infimum over an unbounded "
                          "spread is not supported");
  }
  if (phi.size() != support.dimension()) {
    throw ValidationError("phi length does not match support dimension");
  }
  const double r_val = cls.spread.value();
  const Eigen::VectorXd phi_s = gather(phi, support.indices());

  // Per-coordinate contribution of sign eps_j over gamma in [1, R]:
  //   eps = +1 -> [min(x, Rx), max(x, Rx)] with x = phi_j,
  //   eps = -1 -> the reflected interval.
  Eigen::VectorXd lo(s), hi(s);
  double lo_sum = 0.0, hi_sum = 0.0;
  for (int j = 0; j < s; ++j) {
    const double x = phi_s[j];
    lo[j] = std::min(x, r_val * x);
    hi[j] = std::max(x, r_val * x);
    lo_sum += lo[j];
    hi_sum += hi[j];
  }

  auto interval_distance = [](double a, double b) {
    if (a > 0.0) return a;
    if (b < 0.0) return -b;
    return 0.0;
  };

  double best = interval_distance(lo_sum, hi_sum);
  std::uint32_t best_gray = 0;
  std::uint32_t gray = 0;
  const std::uint64_t count = 1ULL << s;
  for (std::uint64_t i = 1; i < count && best > 0.0; ++i) {
    const int bit = __builtin_ctzll(i);
    const std::uint32_t flipped = 1u << bit;
    gray ^= flipped;
    const double old_lo = ((gray & flipped) ? lo[bit] : -hi[bit]);
    const double old_hi = ((gray & flipped) ? hi[bit] : -lo[bit]);
    // Flipping bit replaces contribution (old_lo, old_hi) with (-old_hi, -old_lo).
    lo_sum += -old_hi - old_lo;
    hi_sum += -old_lo - old_hi;
    const double dist = interval_distance(lo_sum, hi_sum);
    if (dist < best) {
      best = dist;
      best_gray = gray;
      if (best == 0.0) break;
    }
  }

  // Reconstruct a minimizing magnitude profile for the best sign pattern.
  Eigen::VectorXd gamma = Eigen::VectorXd::Ones(s);
  std::vector<double> signs(s);
  double at_ones = 0.0;
  double lo_best = 0.0, hi_best = 0.0;
  for (int j = 0; j < s; ++j) {
    signs[j] = (best_gray & (1u << j)) ? -1.0 : 1.0;
    const double x = signs[j] * phi_s[j];
    at_ones += x;
    lo_best += std::min(x, r_val * x);
    hi_best += std::max(x, r_val * x);
  }
  if (lo_best > 0.0) {
    // Minimum at the lower endpoint: shrink every positive contribution.
    for (int j = 0; j < s; ++j) gamma[j] = (signs[j] * phi_s[j] >= 0.0) ? 1.0 : r_val;
  } else if (hi_best < 0.0) {
    for (int j = 0; j < s; ++j) gamma[j] = (signs[j] * phi_s[j] <= 0.0) ? 1.0 : r_val;
  } else {
    // Zero is attainable: walk gamma from all-ones toward the zero crossing.
    double value = at_ones;
    for (int j = 0; j < s && std::abs(value) > 0.0; ++j) {
      const double x = signs[j] * phi_s[j];
      if (value > 0.0 && x < 0.0) {
        const double take = std::min(r_val - 1.0, value / (-x));
        gamma[j] += take;
        value += take * x;
      } else if (value < 0.0 && x > 0.0) {
        const double take = std::min(r_val - 1.0, -value / x);
        gamma[j] += take;
        value += take * x;
      }
    }
  }

  AlphaRResult result;
  result.value = cls.rho * best;
  result.beta = Eigen::VectorXd::Zero(support.dimension());
  const double scale = cls.rho * (1.0 + kClassBoundaryEps);
  for (int j = 0; j < s; ++j) {
    result.beta[support.indices()[j]] = signs[j] * gamma[j] * scale;
  }
  return result;
}

bool gamma_prime_member(const Eigen::VectorXd& phi, const ParamClass& cls, double slack) {
  if (slack < 0.0) throw ValidationError("slack must be non-negative");
  const Eigen::VectorXd phi_s = gather(phi, cls.support.indices());
  const double inf_norm = phi_s.cwiseAbs().maxCoeff();
  const double l1_norm = phi_s.cwiseAbs().sum();
  if (!cls.spread.is_finite()) return false;  // limit: ||.||_inf > ||.||_1 is impossible
  const double r_val = cls.spread.value();
  return inf_norm > slack / (cls.rho * (1.0 + r_val)) + r_val / (1.0 + r_val) * l1_norm;
}

bool gamma_doubleprime_member(const Eigen::VectorXd& phi, const ParamClass& cls, double slack) {
  if (slack < 0.0) throw ValidationError("slack must be non-negative");
  const Eigen::VectorXd phi_s = gather(phi, cls.support.indices());
  const double inf_norm = phi_s.cwiseAbs().maxCoeff();
  const double l1_norm = phi_s.cwiseAbs().sum();
  if (!cls.spread.is_finite()) return false;
  const double r_val = cls.spread.value();
  return inf_norm < -slack / (cls.rho * (1.0 + r_val)) + l1_norm / (1.0 + r_val);
}

bool dual_member(const Eigen::VectorXd& phi, const ParamClass& cls, double slack) {
  if (slack < 0.0) throw ValidationError("slack must be non-negative");
  return alpha_R(phi, cls).value > slack;
}

RecoveryVerdict recovery_by_lambda_sweep(const CovMatrix& sigma, const ParamClass& cls,
                                         double slack, int lambda_grid_size) {
  if (lambda_grid_size < 2) throw ValidationError("lambda grid needs at least 2 points");
  if (cls.support.dimension() != sigma.dim()) {
    throw ValidationError("class dimension does not match matrix");
  }

  RecoveryVerdict verdict;
  verdict.method = RecoveryMethod::lambda_sweep;
  double worst_slack = std::numeric_limits<double>::infinity();
  int worst_j = -1, worst_k = -1;
  double worst_lambda = 0.0;

  const auto complement = cls.support.complement();
  for (int j : cls.support.indices()) {
    const Eigen::VectorXd col_j = sigma.column(j);
    for (int k : complement) {
      const Eigen::VectorXd col_k = sigma.column(k);
      for (int g = 0; g < lambda_grid_size; ++g) {
        const double lambda =
            (g == lambda_grid_size - 1) ? 1.0 : -1.0 + 2.0 * g / (lambda_grid_size - 1);
        const Eigen::VectorXd phi = col_j + lambda * col_k;
        const double dual_slack = alpha_R(phi, cls).value - slack;
        if (dual_slack < worst_slack) {
          worst_slack = dual_slack;
          worst_j = j;
          worst_k = k;
          worst_lambda = lambda;
        }
      }
    }
  }

  if (worst_slack > 0.0) {
    verdict.pass = true;
    verdict.margin = worst_slack;
    return verdict;
  }
  const Eigen::VectorXd phi = sigma.column(worst_j) + worst_lambda * sigma.column(worst_k);
  AlphaRResult minimizer = alpha_R(phi, cls);
  verdict.pass = false;
  verdict.violated_pair = {worst_j, worst_k};
  verdict.violated_lambda = worst_lambda;
  verdict.witness_beta = CoefVector(minimizer.beta, cls);
  verdict.margin = margin_of_beta(sigma, minimizer.beta, cls.support, slack);
  return verdict;
}

bool alpha_R_bound_check(const Eigen::VectorXd& phi, const ParamClass& cls) {
  if (!cls.spread.is_finite()) throw ValidationError("alpha_R_bound_check requires finite R");
  const ParamClass normalized(cls.support, 1.0, cls.spread);
  const double a_r = alpha_R(phi, normalized).value;
  const double a = alpha(phi, cls.support).value;
  const double bound = std::max(0.0, (2.0 - cls.spread.value()) * a);
  return a_r <= bound + 1e-12;
}

}  // namespace inclab
