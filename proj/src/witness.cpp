#include "inclab/witness.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "inclab/dual.hpp"
#include "inclab/incoherence.hpp"
#include "inclab/parallel.hpp"
#include "inclab/rng.hpp"
#include "inclab/selectors.hpp"

namespace inclab {

namespace {

constexpr double kClassBoundaryEps = 1e-9;

double sign_or_plus(double x) { return x < 0.0 ? -1.0 : 1.0; }

}  // namespace

RecoveryVerdict construct_counterexample_orthonormal(const CovMatrix& sigma,
                                                     const ParamClass& cls, double slack) {
  const Support& support = cls.support;
  if (support.dimension() != sigma.dim()) {
    throw ValidationError("class dimension does not match matrix");
  }
  const auto& s_idx = support.indices();
  for (std::size_t a = 0; a < s_idx.size(); ++a) {
    for (std::size_t b = a + 1; b < s_idx.size(); ++b) {
      if (sigma(s_idx[a], s_idx[b]) != 0.0) {
        throw ValidationError("Sigma_SS must equal the identity exactly");
      }
    }
  }

  const double delta_prime = slack / cls.rho;
  const bool finite = cls.spread.is_finite();

  // Most violated k under the per-k l1 condition (limit form at R = inf).
  int worst_k = -1;
  double worst_violation = -std::numeric_limits<double>::infinity();
  double pass_margin = std::numeric_limits<double>::infinity();
  for (int k : support.complement()) {
    const Eigen::VectorXd col = sigma.sub_column(s_idx, k);
    const double l1 = col.cwiseAbs().sum();
    const double min_abs = col.cwiseAbs().minCoeff();
    double violation;
    if (finite) {
      const double r_val = cls.spread.value();
      violation = l1 - ((1.0 - delta_prime) / r_val + (1.0 - 1.0 / r_val) * min_abs);
    } else {
      violation = l1 > min_abs ? l1 - min_abs : delta_prime - (1.0 - min_abs);
    }
    pass_margin = std::min(pass_margin, -violation);
    if (violation > worst_violation) {
      worst_violation = violation;
      worst_k = k;
    }
  }

  RecoveryVerdict verdict;
  verdict.method = RecoveryMethod::constructed;
  if (worst_violation < 0.0) {
    verdict.pass = true;
    verdict.margin = pass_margin;
    return verdict;
  }

  const Eigen::VectorXd col = sigma.sub_column(s_idx, worst_k);
  const double min_abs = col.cwiseAbs().minCoeff();
  int arg_min = 0;
  for (Eigen::Index a = 0; a < col.size(); ++a) {
    if (std::abs(col[a]) == min_abs) {
      arg_min = static_cast<int>(a);
      break;
    }
  }
  const double rho_strict = cls.rho * (1.0 + kClassBoundaryEps);
  double big = 0.0;
  if (finite) {
    big = cls.spread.value() * rho_strict;
  } else {
    // Unbounded spread: any magnitude large enough to overwhelm the on-support
    // score works; size it from the violated inequality.
    const double l1 = col.cwiseAbs().sum();
    big = l1 > min_abs ? rho_strict * (2.0 + delta_prime) / (l1 - min_abs) : rho_strict;
    big = std::max(big, rho_strict);
  }
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(sigma.dim());
  for (Eigen::Index a = 0; a < col.size(); ++a) {
    const double magnitude = (static_cast<int>(a) == arg_min) ? rho_strict : big;
    beta[s_idx[a]] = sign_or_plus(col[a]) * magnitude;
  }

  verdict.pass = false;
  verdict.witness_beta = CoefVector(beta, cls);
  verdict.violated_pair = {s_idx[arg_min], worst_k};
  verdict.margin = margin_of_beta(sigma, beta, support, slack);
  return verdict;
}

RecoveryVerdict brute_force_recovery(const CovMatrix& sigma, const ParamClass& cls, double slack,
                                     int grid_per_coord, int random_draws, std::uint64_t seed) {
  const Support& support = cls.support;
  if (support.dimension() != sigma.dim()) {
    throw ValidationError("class dimension does not match matrix");
  }
  if (!cls.spread.is_finite()) {
    throw ValidationError("brute-force recovery requires finite R");
  }
  const int s = support.size();
  if (grid_per_coord >= 1 && s > 4) {
    throw BudgetError("grid mode limited to s <= 4");
  }
  if (grid_per_coord < 1) throw ValidationError("grid_per_coord must be at least 1");

  const double low = cls.rho * (1.0 + kClassBoundaryEps);
  const double high = cls.spread.value() * cls.rho;
  std::vector<double> grid(grid_per_coord);
  for (int g = 0; g < grid_per_coord; ++g) {
    grid[g] = grid_per_coord == 1
                  ? low
                  : low + (std::max(high, low) - low) * g / (grid_per_coord - 1);
  }

  RecoveryVerdict verdict;
  verdict.method = RecoveryMethod::brute_force;
  double best_margin = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_beta;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(sigma.dim());

  auto consider = [&]() {
    const double margin = margin_of_beta(sigma, beta, support, slack);
    if (margin < best_margin) {
      best_margin = margin;
      best_beta = beta;
    }
  };

  // All sign patterns times the magnitude grid.
  std::uint64_t combos = 1;
  for (int b = 0; b < s; ++b) combos *= static_cast<std::uint64_t>(grid_per_coord);
  for (std::uint64_t mask = 0; mask < (1ULL << s); ++mask) {
    for (std::uint64_t combo = 0; combo < combos; ++combo) {
      std::uint64_t rest = combo;
      for (int b = 0; b < s; ++b) {
        const double magnitude = grid[rest % grid_per_coord];
        rest /= grid_per_coord;
        beta[support.indices()[b]] = ((mask >> b) & 1ULL ? -1.0 : 1.0) * magnitude;
      }
      consider();
    }
  }

  std::mt19937_64 engine = make_engine(seed, 0xb7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int d = 0; d < random_draws; ++d) {
    for (int b = 0; b < s; ++b) {
      const double magnitude = low + (std::max(high, low) - low) * unit(engine);
      beta[support.indices()[b]] = (unit(engine) < 0.5 ? -1.0 : 1.0) * magnitude;
    }
    consider();
  }

  verdict.margin = best_margin;
  if (best_margin <= 0.0) {
    verdict.pass = false;
    verdict.witness_beta = CoefVector(best_beta, cls);
  }
  return verdict;
}

namespace {

struct InstanceCheck {
  int consistent = 0;
  int violated = 0;
  int boundary = 0;
  std::vector<OffendingInstance> offenders;
};

void check_instance(const CovMatrix& sigma, const Support& support, double rho, double r_value,
                    double delta_prime, std::uint64_t seed, InstanceCheck& out) {
  const Spread spread = Spread::finite(r_value);
  const ParamClass cls(support, rho, spread);
  const double slack = rho * delta_prime;

  const IncoherenceReport mri = mri_check(sigma, support, spread, delta_prime);
  const RecoveryVerdict sweep = recovery_by_lambda_sweep(sigma, cls, slack);
  const RecoveryVerdict brute =
      brute_force_recovery(sigma, cls, slack, support.size() <= 4 ? 5 : 1, 2000, seed);

  const double closeness = std::min({std::abs(mri.min_slack()), std::abs(sweep.margin),
                                     std::abs(brute.margin)});
  if (closeness < kBoundaryBand) {
    ++out.boundary;
    return;
  }

  auto offend = [&](const std::string& what) {
    ++out.violated;
    OffendingInstance inst;
    inst.sigma_csv = format_matrix_csv(sigma.matrix());
    inst.support = support.indices();
    inst.rho = rho;
    inst.spread = r_value;
    inst.slack = slack;
    inst.what = what;
    out.offenders.push_back(std::move(inst));
  };

  bool bad = false;
  if (mri.holds && (!sweep.pass || !brute.pass)) {
    offend("incoherence holds but a recovery oracle fails (sufficiency)");
    bad = true;
  }
  if (r_value >= 2.0 && !mri.holds && (sweep.pass || brute.pass)) {
    offend("recovery holds but incoherence fails at R >= 2 (necessity)");
    bad = true;
  }
  if (sweep.pass != brute.pass) {
    offend("lambda sweep and brute force disagree");
    bad = true;
  }
  if (!bad) ++out.consistent;

  // Failing verdicts must come with an in-class witness of non-positive margin.
  for (const RecoveryVerdict* v : {&sweep, &brute}) {
    if (!v->pass && v->witness_beta) {
      const double margin = margin_of_beta(sigma, v->witness_beta->beta, support, slack);
      if (margin > kBoundaryBand || !v->witness_beta->in_claimed_class()) {
        offend("failing verdict carries an invalid witness");
      }
    }
  }
}

}  // namespace

Theorem1Summary verify_theorem1(int instances, int p_max, int s_max,
                                const std::vector<double>& r_values, std::uint64_t seed) {
  if (p_max < 3) throw ValidationError("p_max must be at least 3");
  if (s_max < 1) throw ValidationError("s_max must be at least 1");

  std::vector<InstanceCheck> results(instances);
  parallel_for(instances, [&](int i) {
    std::mt19937_64 engine = make_engine(seed, 0x7431, static_cast<std::uint64_t>(i));
    std::uniform_int_distribution<int> p_dist(3, p_max);
    const int p = p_dist(engine);
    std::uniform_int_distribution<int> s_dist(1, std::min(s_max, p - 1));
    const int s = std::max(s_dist(engine), s_dist(engine));  // bias toward larger supports
    std::uniform_real_distribution<double> conc(0.7, 6.0);
    std::uniform_real_distribution<double> delta_dist(0.05, 0.3);

    CovMatrix sigma = random_unit_diag_cov(p, derive_seed(seed, 0x7432, i), conc(engine));
    // Every third instance is planted with an orthonormal on-support block so
    // the Sigma_SS = I necessity route is exercised.
    const bool planted = (i % 3) == 0;

    std::vector<int> all(p);
    std::iota(all.begin(), all.end(), 0);
    std::shuffle(all.begin(), all.end(), engine);
    std::vector<int> chosen(all.begin(), all.begin() + s);
    std::sort(chosen.begin(), chosen.end());
    Support support(chosen, p);

    if (planted) {
      Eigen::MatrixXd m = sigma.matrix();
      for (std::size_t a = 0; a < chosen.size(); ++a) {
        for (std::size_t b = a + 1; b < chosen.size(); ++b) {
          m(chosen[a], chosen[b]) = 0.0;
          m(chosen[b], chosen[a]) = 0.0;
        }
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
      if (solver.eigenvalues().minCoeff() < 0.0) {
        // Shrink the off-support couplings until the planted matrix is PSD.
        for (double shrink : {0.8, 0.6, 0.4, 0.2, 0.1, 0.0}) {
          Eigen::MatrixXd candidate = m;
          for (int j : chosen) {
            for (int k = 0; k < p; ++k) {
              if (!support.contains(k)) {
                candidate(j, k) *= shrink;
                candidate(k, j) = candidate(j, k);
              }
            }
          }
          Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> again(candidate,
                                                               Eigen::EigenvaluesOnly);
          if (again.eigenvalues().minCoeff() >= 0.0) {
            m = candidate;
            break;
          }
        }
      }
      sigma = CovMatrix::from_entries(std::move(m));
    }

    const double delta_prime = delta_dist(engine);
    for (std::size_t ri = 0; ri < r_values.size(); ++ri) {
      check_instance(sigma, support, 1.0, r_values[ri], delta_prime,
                     derive_seed(seed, 0x7433, i, ri), results[i]);
      if (planted) {
        // Necessity via the constructive witness when Sigma_SS = I.
        const Spread spread = Spread::finite(r_values[ri]);
        const ParamClass cls(support, 1.0, spread);
        const IncoherenceReport mri = mri_check(sigma, support, spread, delta_prime);
        const RecoveryVerdict constructed =
            construct_counterexample_orthonormal(sigma, cls, delta_prime);
        if (std::abs(mri.min_slack()) >= kBoundaryBand &&
            std::abs(constructed.margin) >= kBoundaryBand) {
          if (mri.holds == constructed.pass) {
            ++results[i].consistent;
          } else {
            ++results[i].violated;
            OffendingInstance inst;
            inst.sigma_csv = format_matrix_csv(sigma.matrix());
            inst.support = support.indices();
            inst.rho = 1.0;
            inst.spread = r_values[ri];
            inst.slack = delta_prime;
            inst.what = "orthonormal construction disagrees with incoherence";
            results[i].offenders.push_back(std::move(inst));
          }
        } else {
          ++results[i].boundary;
        }
      }
    }
  });

  Theorem1Summary summary;
  summary.instances = instances;
  for (const auto& r : results) {
    summary.checks += r.consistent + r.violated + r.boundary;
    summary.consistent += r.consistent;
    summary.violated += r.violated;
    summary.boundary += r.boundary;
    for (const auto& off : r.offenders) summary.offenders.push_back(off);
  }
  return summary;
}

}  // namespace inclab
