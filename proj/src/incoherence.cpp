#include "inclab/incoherence.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace inclab {

namespace {

bool row_before(const MarginRow& a, const MarginRow& b) {
  if (a.slack != b.slack) return a.slack < b.slack;
  if (a.j != b.j) return a.j < b.j;
  if (a.k != b.k) return a.k < b.k;
  return a.sign > b.sign;  // '+' rows order before '-'
}

void finalize(IncoherenceReport& report) {
  report.binding.reset();
  for (const auto& row : report.margins) {
    if (!report.binding || row_before(row, *report.binding)) report.binding = row;
  }
  report.holds = report.binding ? report.binding->slack > 0.0 : true;
}

Eigen::MatrixXd support_block(const CovMatrix& sigma, const Support& support) {
  return sigma.block(support.indices(), support.indices());
}

void require_orthonormal_support(const CovMatrix& sigma, const Support& support) {
  const auto& idx = support.indices();
  for (std::size_t a = 0; a < idx.size(); ++a) {
    for (std::size_t b = a + 1; b < idx.size(); ++b) {
      if (sigma(idx[a], idx[b]) != 0.0) {
        throw ValidationError("Sigma_SS must equal the identity exactly");
      }
    }
  }
}

double condition_number(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  const double lo = solver.eigenvalues().minCoeff();
  const double hi = solver.eigenvalues().maxCoeff();
  if (lo <= 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

}  // namespace

double IncoherenceReport::min_slack() const {
  return binding ? binding->slack : std::numeric_limits<double>::infinity();
}

IncoherenceReport mri_check(const CovMatrix& sigma, const Support& support, const Spread& spread,
                            double slack) {
  if (support.dimension() != sigma.dim()) {
    throw ValidationError("support dimension does not match matrix");
  }
  if (slack < 0.0) throw ValidationError("slack must be non-negative");

  IncoherenceReport report;
  report.condition_name = "mri";
  report.slack_param = slack;

  const auto& s_idx = support.indices();
  const auto complement = support.complement();
  for (int j : s_idx) {
    const Eigen::VectorXd col_j = sigma.sub_column(s_idx, j);
    for (int k : complement) {
      const Eigen::VectorXd col_k = sigma.sub_column(s_idx, k);
      for (int sign : {+1, -1}) {
        MarginRow row;
        row.j = j;
        row.k = k;
        row.sign = sign;
        row.rhs = sigma(j, j) + sign * sigma(j, k);
        if (spread.is_finite()) {
          const double r_val = spread.value();
          const double l1 = (col_j + sign * col_k).cwiseAbs().sum();
          row.lhs = r_val / (1.0 + r_val) * l1 + slack / (1.0 + r_val);
          row.slack = row.rhs - row.lhs;
        } else {
          // Feasibility for every finite R forces the off-j l1 mass to zero,
          // leaving delta' < rhs.
          double off_mass = 0.0;
          for (Eigen::Index a = 0; a < col_j.size(); ++a) {
            if (s_idx[a] == j) continue;
            off_mass += std::abs(col_j[a] + sign * col_k[a]);
          }
          row.slack = off_mass > 0.0 ? -off_mass : row.rhs - slack;
          row.lhs = row.rhs - row.slack;
        }
        report.margins.push_back(row);
      }
    }
  }
  finalize(report);
  return report;
}

IncoherenceReport mri_check_orthonormal(const CovMatrix& sigma, const Support& support,
                                        const Spread& spread, double slack) {
  if (support.dimension() != sigma.dim()) {
    throw ValidationError("support dimension does not match matrix");
  }
  if (slack < 0.0) throw ValidationError("slack must be non-negative");
  require_orthonormal_support(sigma, support);

  IncoherenceReport report;
  report.condition_name = "mri_orthonormal";
  report.slack_param = slack;

  const auto& s_idx = support.indices();
  for (int k : support.complement()) {
    const Eigen::VectorXd col_k = sigma.sub_column(s_idx, k);
    const double l1 = col_k.cwiseAbs().sum();
    const double min_abs = col_k.cwiseAbs().minCoeff();
    int arg_min = s_idx[0];
    for (Eigen::Index a = 0; a < col_k.size(); ++a) {
      if (std::abs(col_k[a]) == min_abs) {
        arg_min = s_idx[a];
        break;
      }
    }
    MarginRow row;
    row.j = arg_min;
    row.k = k;
    row.sign = +1;
    if (spread.is_finite()) {
      const double r_val = spread.value();
      row.lhs = l1;
      row.rhs = (1.0 - slack) / r_val + (1.0 - 1.0 / r_val) * min_abs;
      row.slack = row.rhs - row.lhs;
    } else {
      // Limit over finite R: the l1 norm may not exceed the smallest entry
      // (possible only when they coincide), and then delta' < 1 - min.
      const double excess = l1 - min_abs;
      row.slack = excess > 0.0 ? -excess : (1.0 - min_abs) - slack;
      row.rhs = 1.0 - min_abs;
      row.lhs = row.rhs - row.slack;
    }
    report.margins.push_back(row);
  }
  finalize(report);
  return report;
}

bool mri_infinite_R_classification(const CovMatrix& sigma, const Support& support, double slack) {
  (void)support;
  return slack < 1.0 && sigma.is_identity();
}

double lasso_incoherence(const CovMatrix& sigma, const Support& support) {
  if (support.dimension() != sigma.dim()) {
    throw ValidationError("support dimension does not match matrix");
  }
  const Eigen::MatrixXd sigma_ss = support_block(sigma, support);
  if (condition_number(sigma_ss) > 1e12) {
    throw NumericalError("Sigma_SS is numerically singular (condition number above 1e12)");
  }
  const Eigen::LDLT<Eigen::MatrixXd> factor(sigma_ss);
  double worst = 0.0;
  for (int k : support.complement()) {
    const Eigen::VectorXd col = sigma.sub_column(support.indices(), k);
    worst = std::max(worst, factor.solve(col).cwiseAbs().sum());
  }
  return worst;
}

double pairwise_incoherence(const CovMatrix& sigma) {
  double worst = 0.0;
  const auto& m = sigma.matrix();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i; j < m.cols(); ++j) {
      worst = std::max(worst, std::abs(m(i, j) - (i == j ? 1.0 : 0.0)));
    }
  }
  return worst;
}

namespace {

std::uint64_t binomial_or_max(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (int i = 1; i <= k; ++i) {
    const std::uint64_t num = static_cast<std::uint64_t>(n - k + i);
    if (result > std::numeric_limits<std::uint64_t>::max() / num) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    result = result * num / static_cast<std::uint64_t>(i);
  }
  return result;
}

}  // namespace

double rip_constant(const CovMatrix& sigma, int order, std::uint64_t scan_budget) {
  const int p = sigma.dim();
  if (order < 1 || order > p) throw ValidationError("RIP order must lie in [1, p]");
  if (binomial_or_max(p, order) > scan_budget) {
    throw BudgetError("RIP subset scan exceeds budget: C(" + std::to_string(p) + ", " +
                      std::to_string(order) + ") subsets");
  }
  if (order == 1) return 0.0;  // unit diagonal

  // Spectral norms over principal submatrices are monotone in the subset, so
  // scanning size == order covers every smaller subset.
  std::vector<int> subset(order);
  for (int i = 0; i < order; ++i) subset[i] = i;
  double worst = 0.0;
  while (true) {
    Eigen::MatrixXd block = sigma.block(subset, subset);
    block.diagonal().array() -= 1.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(block, Eigen::EigenvaluesOnly);
    worst = std::max(worst, std::max(std::abs(solver.eigenvalues().minCoeff()),
                                     std::abs(solver.eigenvalues().maxCoeff())));
    int i = order - 1;
    while (i >= 0 && subset[i] == p - order + i) --i;
    if (i < 0) break;
    ++subset[i];
    for (int a = i + 1; a < order; ++a) subset[a] = subset[a - 1] + 1;
  }
  return worst;
}

bool pwi_implies_mri_bound(double pwi_value, int s, const Spread& spread, double slack) {
  if (s < 2) throw ValidationError("the PWI-to-MRI bound needs s >= 2");
  if (!spread.is_finite()) throw ValidationError("the PWI-to-MRI bound needs finite R");
  if (slack < 0.0) throw ValidationError("slack must be non-negative");
  const double threshold = (1.0 - slack) / (2.0 * spread.value() * (s - 1) + 1.0);
  return pwi_value < threshold;
}

double mri_implies_rip_bound(int s, const Spread& spread, double slack) {
  if (s < 2) throw ValidationError("the MRI-to-RIP bound needs s >= 2");
  if (!spread.is_finite()) throw ValidationError("the MRI-to-RIP bound needs finite R");
  if (slack < 0.0) throw ValidationError("slack must be non-negative");
  if (slack >= 1.0) return 0.0;
  return (1.0 - slack) / spread.value() * (2.0 * s - 1.0) / (s - 1.0);
}

bool small_eigen_obstruction(const CovMatrix& sigma, const Support& support, const Spread& spread,
                             double slack) {
  if (support.dimension() != sigma.dim()) {
    throw ValidationError("support dimension does not match matrix");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(support_block(sigma, support),
                                                        Eigen::EigenvaluesOnly);
  const double lambda_s = std::sqrt(std::max(solver.eigenvalues().minCoeff(), 0.0));
  const double s = static_cast<double>(support.size());
  const double threshold =
      spread.is_finite() ? slack / (std::sqrt(s) * (spread.value() + 1.0)) : 0.0;
  return threshold > 0.0 && lambda_s <= threshold;
}

bool example_region_closed_form(double mu, double eta, int r, const Spread& spread,
                                RegionCondition which) {
  if (r < 2) throw ValidationError("the example needs block size r >= 2");
  if (which == RegionCondition::lasso) {
    return mu > -1.0 / (r - 1) && mu < 1.0 && std::abs(eta) <= (1.0 - mu) / r;
  }
  if (!spread.is_finite()) return mu == 0.0 && eta == 0.0;
  const double zeta = 1.0 / (spread.value() * (r - 1));
  if (std::abs(mu) >= zeta) return false;
  const double second = (mu + zeta) / (1.0 + zeta);
  double bound = second;
  if (zeta < 1.0) bound = std::min((-mu + zeta) / (1.0 - zeta), second);
  return std::abs(eta) < bound;
}

bool example_region_closed_form_two_blocks(double mu, double eta, int r, const Spread& spread) {
  if (!example_region_closed_form(mu, eta, r, spread, RegionCondition::mri)) return false;
  if (!spread.is_finite()) return mu == 0.0 && eta == 0.0;
  return (r - 1) * std::abs(mu) + r * std::abs(eta) < 1.0 / spread.value();
}

}  // namespace inclab
