#include "inclab/selectors.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "inclab/dual.hpp"
#include "inclab/incoherence.hpp"
#include "inclab/rng.hpp"

namespace inclab {

namespace {

constexpr double kClassBoundaryEps = 1e-9;

std::vector<int> top_s_indices(const Eigen::VectorXd& scores, int s, bool* tie_flag) {
  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  if (tie_flag != nullptr) {
    *tie_flag = s < static_cast<int>(order.size()) && s > 0 &&
                scores[order[s - 1]] == scores[order[s]];
  }
  return std::vector<int>(order.begin(), order.begin() + s);
}

Eigen::MatrixXd support_block(const CovMatrix& sigma, const Support& support) {
  return sigma.block(support.indices(), support.indices());
}

double min_eig(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

void require_well_conditioned(const Eigen::MatrixXd& m, const char* what) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  const double lo = solver.eigenvalues().minCoeff();
  const double hi = solver.eigenvalues().maxCoeff();
  if (lo <= 0.0 || hi / lo > 1e12) {
    throw NumericalError(std::string(what) + " is numerically singular");
  }
}

}  // namespace

SelectionResult population_mr_select(const CovMatrix& sigma, const CoefVector& beta, int s) {
  if (beta.beta.size() != sigma.dim()) {
    throw ValidationError("beta length does not match matrix dimension");
  }
  if (s < 1 || s > sigma.dim()) throw ValidationError("selection size out of range");
  SelectionResult result;
  result.scores = (sigma.matrix() * beta.beta).cwiseAbs();
  result.selected = top_s_indices(result.scores, s, &result.tie_flag);
  return result;
}

double margin_of_beta(const CovMatrix& sigma, const Eigen::VectorXd& beta,
                      const Support& support, double slack) {
  if (beta.size() != sigma.dim()) {
    throw ValidationError("beta length does not match matrix dimension");
  }
  const Eigen::VectorXd scores = (sigma.matrix() * beta).cwiseAbs();
  double min_on = std::numeric_limits<double>::infinity();
  for (int j : support.indices()) min_on = std::min(min_on, scores[j]);
  double max_off = 0.0;
  for (int k : support.complement()) max_off = std::max(max_off, scores[k]);
  return min_on - max_off - slack;
}

LassoSolution population_lasso(const CovMatrix& sigma, const CoefVector& beta_star,
                               double lambda) {
  if (!(lambda > 0.0)) throw ValidationError("lambda must be strictly positive");
  const int p = sigma.dim();
  if (beta_star.beta.size() != p) {
    throw ValidationError("beta* length does not match matrix dimension");
  }

  std::vector<int> support_idx;
  for (int j = 0; j < p; ++j) {
    if (beta_star.beta[j] != 0.0) support_idx.push_back(j);
  }

  // Cyclic coordinate descent; the unit diagonal makes each coordinate
  // update an exact soft-threshold.
  const Eigen::MatrixXd& m = sigma.matrix();
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd grad = -(m * beta_star.beta);  // Sigma (beta - beta*)
  constexpr int kMaxCycles = 1'000'000;
  bool converged = false;
  for (int cycle = 0; cycle < kMaxCycles && !converged; ++cycle) {
    double max_change = 0.0;
    for (int j = 0; j < p; ++j) {
      const double b = beta[j] - grad[j];
      double next = 0.0;
      if (b > lambda) {
        next = b - lambda;
      } else if (b < -lambda) {
        next = b + lambda;
      }
      const double delta = next - beta[j];
      if (delta != 0.0) {
        beta[j] = next;
        grad += delta * m.col(j);
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    converged = max_change < 1e-12;
  }
  if (!converged) {
    throw NumericalError("coordinate descent did not converge within the cycle cap");
  }

  auto finish = [&](const Eigen::VectorXd& beta_hat) {
    LassoSolution sol;
    sol.beta_hat = beta_hat;
    sol.lambda = lambda;
    const Eigen::VectorXd g = m * (beta_hat - beta_star.beta);
    sol.dual_u = Eigen::VectorXd::Zero(p);
    double residual = 0.0;
    for (int j = 0; j < p; ++j) {
      if (beta_hat[j] != 0.0) {
        const double sgn = beta_hat[j] > 0.0 ? 1.0 : -1.0;
        sol.dual_u[j] = sgn;
        residual = std::max(residual, std::abs(g[j] + lambda * sgn));
      } else {
        sol.dual_u[j] = std::clamp(-g[j] / lambda, -1.0, 1.0);
        residual = std::max(residual, std::max(0.0, std::abs(g[j]) - lambda));
      }
    }
    sol.kkt_residual = residual;
    return sol;
  };

  if (!support_idx.empty()) {
    const Support support(support_idx, p);
    const Eigen::MatrixXd sigma_ss = support_block(sigma, support);
    require_well_conditioned(sigma_ss, "Sigma_SS");

    // Closed-form KKT construction: valid under strict dual feasibility and
    // unchanged signs; cross-checked against the descent solution.
    Eigen::VectorXd u_s(support_idx.size());
    Eigen::VectorXd beta_s(support_idx.size());
    for (std::size_t a = 0; a < support_idx.size(); ++a) {
      const double v = beta_star.beta[support_idx[a]];
      u_s[a] = v > 0.0 ? 1.0 : -1.0;
      beta_s[a] = v;
    }
    const Eigen::VectorXd correction = Eigen::LDLT<Eigen::MatrixXd>(sigma_ss).solve(u_s);
    const Eigen::VectorXd beta_hat_s = beta_s - lambda * correction;
    bool signs_ok = true;
    for (Eigen::Index a = 0; a < beta_hat_s.size(); ++a) {
      if (beta_hat_s[a] * u_s[a] <= 0.0) signs_ok = false;
    }
    double dual_inf = 0.0;
    for (int k : support.complement()) {
      const Eigen::VectorXd col = sigma.sub_column(support_idx, k);
      dual_inf = std::max(dual_inf, std::abs(col.dot(correction)));
    }
    if (signs_ok && dual_inf < 1.0) {
      Eigen::VectorXd constructed = Eigen::VectorXd::Zero(p);
      for (std::size_t a = 0; a < support_idx.size(); ++a) {
        constructed[support_idx[a]] = beta_hat_s[a];
      }
      if ((constructed - beta).cwiseAbs().maxCoeff() > 1e-7) {
        throw NumericalError("KKT construction and coordinate descent disagree beyond 1e-7");
      }
      return finish(constructed);
    }
  }
  return finish(beta);
}

double adaptive_small_lambda(const CovMatrix& sigma, const CoefVector& beta_star) {
  std::vector<int> support_idx;
  double min_mag = std::numeric_limits<double>::infinity();
  for (int j = 0; j < sigma.dim(); ++j) {
    if (beta_star.beta[j] != 0.0) {
      support_idx.push_back(j);
      min_mag = std::min(min_mag, std::abs(beta_star.beta[j]));
    }
  }
  if (support_idx.empty()) throw ValidationError("beta* must have a nonzero entry");
  const Support support(support_idx, sigma.dim());
  return 1e-4 * min_mag * std::max(min_eig(support_block(sigma, support)), 0.0);
}

SelectionResult population_omp(const CovMatrix& sigma, const CoefVector& beta, int s) {
  const int p = sigma.dim();
  if (beta.beta.size() != p) throw ValidationError("beta length does not match matrix");
  if (s < 1 || s > p) throw ValidationError("selection size out of range");

  const Eigen::VectorXd cov_xy = sigma.matrix() * beta.beta;
  SelectionResult result;
  Eigen::VectorXd gamma_bar = Eigen::VectorXd::Zero(p);
  std::vector<bool> picked(p, false);
  for (int step = 0; step < s; ++step) {
    result.scores = (cov_xy - sigma.matrix() * gamma_bar).cwiseAbs();
    int best = -1;
    for (int j = 0; j < p; ++j) {
      if (picked[j]) continue;
      if (best == -1 || result.scores[j] > result.scores[best]) best = j;
    }
    for (int j = best + 1; j < p; ++j) {
      if (!picked[j] && result.scores[j] == result.scores[best]) result.tie_flag = true;
    }
    picked[best] = true;
    result.selected.push_back(best);

    const Eigen::MatrixXd block = sigma.block(result.selected, result.selected);
    require_well_conditioned(block, "selected refit block");
    Eigen::VectorXd rhs(result.selected.size());
    for (std::size_t a = 0; a < result.selected.size(); ++a) rhs[a] = cov_xy[result.selected[a]];
    const Eigen::VectorXd gamma = Eigen::LDLT<Eigen::MatrixXd>(block).solve(rhs);
    gamma_bar.setZero();
    for (std::size_t a = 0; a < result.selected.size(); ++a) {
      gamma_bar[result.selected[a]] = gamma[a];
    }
  }
  return result;
}

std::string to_string(TruthCondition c) {
  switch (c) {
    case TruthCondition::F1: return "F1";
    case TruthCondition::F2: return "F2";
    case TruthCondition::F3: return "F3";
    case TruthCondition::F5: return "F5";
  }
  return "unknown";
}

namespace {

// max-min margin used by F1/F2; F5 swaps the off-support aggregate.
double selection_margin(const CovMatrix& sigma, const Support& support,
                        const Eigen::VectorXd& beta, bool off_support_min) {
  const Eigen::VectorXd scores = (sigma.matrix() * beta).cwiseAbs();
  double min_on = std::numeric_limits<double>::infinity();
  for (int j : support.indices()) min_on = std::min(min_on, scores[j]);
  double off = off_support_min ? std::numeric_limits<double>::infinity() : 0.0;
  for (int k : support.complement()) {
    off = off_support_min ? std::min(off, scores[k]) : std::max(off, scores[k]);
  }
  return min_on - off;
}

RecoveryVerdict f3_exact(const CovMatrix& sigma, const Support& support) {
  RecoveryVerdict verdict;
  verdict.method = RecoveryMethod::closed_form;
  verdict.exact = true;
  const double lai = lasso_incoherence(sigma, support);
  verdict.margin = 1.0 - lai;
  if (lai < 1.0) {
    verdict.pass = true;
    return verdict;
  }
  // Recover the witness from the operator-norm argument: beta_S chosen so
  // the on-support scores form the extremal sign pattern of the worst row.
  const Eigen::MatrixXd sigma_ss = support_block(sigma, support);
  const Eigen::LDLT<Eigen::MatrixXd> factor(sigma_ss);
  int worst_k = -1;
  double worst = -1.0;
  Eigen::VectorXd worst_solve;
  for (int k : support.complement()) {
    const Eigen::VectorXd col = sigma.sub_column(support.indices(), k);
    const Eigen::VectorXd solved = factor.solve(col);
    const double value = solved.cwiseAbs().sum();
    if (value > worst) {
      worst = value;
      worst_k = k;
      worst_solve = solved;
    }
  }
  Eigen::VectorXd z(worst_solve.size());
  for (Eigen::Index a = 0; a < z.size(); ++a) z[a] = worst_solve[a] >= 0.0 ? 1.0 : -1.0;
  const Eigen::VectorXd beta_s = factor.solve(z);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(sigma.dim());
  for (std::size_t a = 0; a < support.indices().size(); ++a) {
    beta[support.indices()[a]] = beta_s[a];
  }
  verdict.pass = false;
  verdict.witness_beta = CoefVector(beta);
  int arg_on = support.indices().front();
  const Eigen::VectorXd scores = (sigma.matrix() * beta).cwiseAbs();
  for (int j : support.indices()) {
    if (scores[j] > scores[arg_on]) arg_on = j;
  }
  verdict.violated_pair = {arg_on, worst_k};
  return verdict;
}

}  // namespace

double f2_exact_margin(const CovMatrix& sigma, const Support& support, double rho) {
  const int s = support.size();
  if (s > 20) throw BudgetError("F2 vertex enumeration limited to s <= 20");
  const double scale = rho * (1.0 + kClassBoundaryEps);
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(sigma.dim());
  for (std::uint64_t mask = 0; mask < (1ULL << s); ++mask) {
    for (int b = 0; b < s; ++b) {
      beta[support.indices()[b]] = (mask & (1ULL << b)) ? -scale : scale;
    }
    best = std::min(best, selection_margin(sigma, support, beta, false));
  }
  return best;
}

RecoveryVerdict truthfulness_search(const CovMatrix& sigma, const Support& support,
                                    TruthCondition condition, double rho, const Spread& spread,
                                    std::uint64_t budget, std::uint64_t seed) {
  if (condition == TruthCondition::F3) return f3_exact(sigma, support);
  if (!(rho > 0.0)) throw ValidationError("rho must be strictly positive");

  const int s = support.size();
  const bool f5 = condition == TruthCondition::F5;
  const bool r_is_one =
      condition == TruthCondition::F2 || (spread.is_finite() && spread.value() == 1.0);

  RecoveryVerdict verdict;
  verdict.method = RecoveryMethod::brute_force;
  verdict.exact = false;
  double best_margin = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_beta;

  auto consider = [&](const Eigen::VectorXd& beta) {
    const double margin = selection_margin(sigma, support, beta, f5);
    if (margin < best_margin) {
      best_margin = margin;
      best_beta = beta;
    }
  };

  // Sign-pattern vertices decide F1/F2 at R = 1 exactly (degree-1
  // homogeneity of the margin).
  std::uint64_t used = 0;
  if (s <= 20 && (1ULL << s) <= budget) {
    const double scale = rho * (1.0 + kClassBoundaryEps);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(sigma.dim());
    for (std::uint64_t mask = 0; mask < (1ULL << s); ++mask) {
      for (int b = 0; b < s; ++b) {
        beta[support.indices()[b]] = (mask & (1ULL << b)) ? -scale : scale;
      }
      consider(beta);
      ++used;
    }
    if (condition == TruthCondition::F2 || (condition == TruthCondition::F1 && r_is_one)) {
      verdict.exact = true;
    }
  } else if (condition == TruthCondition::F2) {
    throw BudgetError("F2 requires full vertex enumeration; raise the budget");
  }

  // Dual-guided candidates: the alpha_R minimizers of Sigma_*j + lambda
  // Sigma_*k at the endpoints and a coarse interior grid.
  if (condition == TruthCondition::F1 && spread.is_finite() && !r_is_one) {
    const ParamClass cls(support, rho, spread);
    for (int j : support.indices()) {
      for (int k : support.complement()) {
        for (int g = 0; g <= 20; ++g) {
          const double lambda = -1.0 + 0.1 * g;
          const Eigen::VectorXd phi = sigma.column(j) + lambda * sigma.column(k);
          consider(alpha_R(phi, cls).beta);
          ++used;
        }
      }
    }
  }

  // Random candidates fill the remaining budget.
  std::mt19937_64 engine = make_engine(seed, 0x732e61, static_cast<std::uint64_t>(condition));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double low = rho * (1.0 + kClassBoundaryEps);
  for (; used < budget; ++used) {
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(sigma.dim());
    for (int b = 0; b < s; ++b) {
      double mag;
      if (spread.is_finite()) {
        mag = low + (spread.value() * rho - low) * unit(engine);
        mag = std::max(mag, low);
      } else {
        // Unbounded spread: log-uniform magnitudes over three decades.
        mag = low * std::pow(10.0, 3.0 * unit(engine));
      }
      beta[support.indices()[b]] = (unit(engine) < 0.5 ? -1.0 : 1.0) * mag;
    }
    consider(beta);
  }

  verdict.margin = best_margin;
  if (best_margin <= 0.0) {
    verdict.pass = false;
    std::optional<ParamClass> cls;
    if (spread.is_finite()) cls = ParamClass(support, rho, spread);
    verdict.witness_beta = CoefVector(best_beta, cls);
  }
  // For R >= 2 the incoherence condition is the exact oracle for F1; the
  // verdict is exact when the search corroborates it (a failing condition
  // must come with a found counterexample).
  if (condition == TruthCondition::F1 && spread.is_finite() && spread.value() >= 2.0) {
    verdict.exact = mri_check(sigma, support, spread, 0.0).holds == verdict.pass;
  }
  return verdict;
}

Conjecture1Report conjecture1_search(int instance_count, int p_max, int s_max,
                                     std::uint64_t seed) {
  if (p_max < 3) throw ValidationError("p_max must be at least 3");
  Conjecture1Report report;
  report.instances = instance_count;
  for (int i = 0; i < instance_count; ++i) {
    std::mt19937_64 engine = make_engine(seed, 0xc1, static_cast<std::uint64_t>(i));
    std::uniform_int_distribution<int> p_dist(3, p_max);
    const int p = p_dist(engine);
    std::uniform_int_distribution<int> s_dist(2, std::max(2, std::min(s_max, p - 1)));
    const int s = s_dist(engine);
    std::uniform_real_distribution<double> conc(0.6, 4.0);
    const CovMatrix sigma = random_unit_diag_cov(p, derive_seed(seed, 0xc2, i), conc(engine));

    std::vector<int> all(p);
    std::iota(all.begin(), all.end(), 0);
    std::shuffle(all.begin(), all.end(), engine);
    std::vector<int> chosen(all.begin(), all.begin() + s);
    std::sort(chosen.begin(), chosen.end());
    const Support support(chosen, p);

    const double f2_margin = f2_exact_margin(sigma, support, 1.0);
    double lai;
    try {
      lai = lasso_incoherence(sigma, support);
    } catch (const NumericalError&) {
      ++report.boundary;
      continue;
    }
    if (std::abs(f2_margin) < 1e-9 || std::abs(lai - 1.0) < 1e-9) {
      ++report.boundary;
      continue;
    }
    if (f2_margin > 0.0) {
      ++report.f2_pass;
      if (lai >= 1.0) {
        ++report.counterexamples;
        report.counterexample_csv.push_back(format_matrix_csv(sigma.matrix()));
        report.counterexample_supports.push_back(chosen);
      }
    }
  }
  return report;
}

}  // namespace inclab
