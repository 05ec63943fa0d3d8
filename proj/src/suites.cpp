#include "inclab/suites.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>

#include "inclab/covariance.hpp"
#include "inclab/dual.hpp"
#include "inclab/incoherence.hpp"
#include "inclab/parallel.hpp"
#include "inclab/rng.hpp"
#include "inclab/selectors.hpp"
#include "inclab/witness.hpp"

namespace inclab {

namespace {

/// Random unit-diagonal matrix whose on-support block is exactly the
/// identity; cross couplings are shrunk until the whole matrix is PSD.
CovMatrix orthonormal_support_instance(int p, const Support& support, std::uint64_t seed,
                                       double concentration) {
  CovMatrix base = random_unit_diag_cov(p, seed, concentration);
  Eigen::MatrixXd m = base.matrix();
  const auto& idx = support.indices();
  for (std::size_t a = 0; a < idx.size(); ++a) {
    for (std::size_t b = a + 1; b < idx.size(); ++b) {
      m(idx[a], idx[b]) = 0.0;
      m(idx[b], idx[a]) = 0.0;
    }
  }
  for (double shrink : {1.0, 0.8, 0.6, 0.4, 0.25, 0.1, 0.0}) {
    Eigen::MatrixXd candidate = m;
    if (shrink != 1.0) {
      for (int j : idx) {
        for (int k = 0; k < p; ++k) {
          if (!support.contains(k)) {
            candidate(j, k) *= shrink;
            candidate(k, j) = candidate(j, k);
          }
        }
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(candidate, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() >= 0.0) {
      return CovMatrix::from_entries(std::move(candidate));
    }
  }
  return identity_cov(p);
}

Support random_support(int p, int s, std::mt19937_64& engine) {
  std::vector<int> all(p);
  std::iota(all.begin(), all.end(), 0);
  std::shuffle(all.begin(), all.end(), engine);
  std::vector<int> chosen(all.begin(), all.begin() + s);
  std::sort(chosen.begin(), chosen.end());
  return Support(chosen, p);
}

}  // namespace

Json to_json(const SuiteResult& result) {
  Json j;
  j["suite"] = result.name;
  j["checks"] = result.checks;
  j["violations"] = result.violations;
  j["boundary"] = result.boundary;
  j["findings"] = result.findings;
  j["ok"] = result.ok();
  j["details"] = result.details;
  return j;
}

SuiteResult run_theorem1_suite(int instances, std::uint64_t seed) {
  SuiteResult result;
  result.name = "theorem1";
  const Theorem1Summary summary = verify_theorem1(instances, 8, 3, {2.0, 3.0}, seed);
  result.checks = summary.checks;
  result.violations = summary.violated;
  result.boundary = summary.boundary;
  result.details = to_json(summary);
  return result;
}

SuiteResult run_lemma_suite(std::uint64_t seed) {
  SuiteResult result;
  result.name = "lemmas";
  int orthonormal_mismatch = 0;
  int identity_mismatch = 0;
  int containment_violations = 0;
  int prime_empty_violations = 0;
  int infnorm_violations = 0;

  // Orthonormal-support form agrees with the general check.
  {
    const int count = 500;
    std::vector<int> bad(count, 0), near(count, 0);
    parallel_for(count, [&](int i) {
      std::mt19937_64 engine = make_engine(seed, 0x1e1, static_cast<std::uint64_t>(i));
      std::uniform_int_distribution<int> p_dist(4, 9);
      const int p = p_dist(engine);
      std::uniform_int_distribution<int> s_dist(1, std::min(4, p - 1));
      const int s = s_dist(engine);
      const Support support = random_support(p, s, engine);
      std::uniform_real_distribution<double> conc(0.7, 4.0);
      const CovMatrix sigma =
          orthonormal_support_instance(p, support, derive_seed(seed, 0x1e2, i), conc(engine));
      std::uniform_real_distribution<double> r_dist(1.0, 4.0);
      std::uniform_real_distribution<double> d_dist(0.0, 0.8);
      const Spread spread = Spread::finite(r_dist(engine));
      const double delta_prime = d_dist(engine);
      const IncoherenceReport general = mri_check(sigma, support, spread, delta_prime);
      const IncoherenceReport orth = mri_check_orthonormal(sigma, support, spread, delta_prime);
      if (std::abs(general.min_slack()) < kBoundaryBand ||
          std::abs(orth.min_slack()) < kBoundaryBand) {
        near[i] = 1;
      } else if (general.holds != orth.holds) {
        bad[i] = 1;
      }
    });
    result.checks += count;
    for (int i = 0; i < count; ++i) {
      orthonormal_mismatch += bad[i];
      result.boundary += near[i];
    }
  }

  // Scalar identity: min over a dense lambda grid of |a - lambda b| equals
  // (|a| - |b|)_+ to grid resolution.
  {
    const int count = 10'000;
    const int grid = 2001;
    std::mt19937_64 engine = make_engine(seed, 0xab);
    std::uniform_real_distribution<double> coef(-3.0, 3.0);
    for (int i = 0; i < count; ++i) {
      const double a = coef(engine);
      const double b = coef(engine);
      double grid_min = std::numeric_limits<double>::infinity();
      for (int g = 0; g < grid; ++g) {
        const double lambda = -1.0 + 2.0 * g / (grid - 1);
        grid_min = std::min(grid_min, std::abs(a - lambda * b));
      }
      const double exact = std::max(std::abs(a) - std::abs(b), 0.0);
      const double tol = std::abs(b) / (grid - 1) + 1e-12;
      if (std::abs(grid_min - exact) > tol) ++identity_mismatch;
    }
    result.checks += count;
  }

  // Dual-set containments and the collapse of the dual onto Gamma' at R = 2.
  {
    const int count = 100'000;
    std::vector<int> contain_bad(count, 0), prime_bad(count, 0), near(count, 0);
    parallel_for(count, [&](int i) {
      std::mt19937_64 engine = make_engine(seed, 0xd0a1, static_cast<std::uint64_t>(i));
      std::uniform_int_distribution<int> s_dist(1, 6);
      const int s = s_dist(engine);
      const int p = s + 2;
      std::vector<int> idx(s);
      std::iota(idx.begin(), idx.end(), 0);
      const Support support(idx, p);
      std::uniform_real_distribution<double> rho_dist(0.5, 2.0);
      std::uniform_real_distribution<double> r_dist(1.0, 3.0);
      std::uniform_real_distribution<double> d_dist(0.0, 0.5);
      std::normal_distribution<double> gauss(0.0, 1.0);

      const double rho = rho_dist(engine);
      const double delta = d_dist(engine) * rho;
      Eigen::VectorXd phi(p);
      for (int a = 0; a < p; ++a) phi[a] = gauss(engine);

      // Containments at the drawn R.
      {
        const ParamClass cls(support, rho, Spread::finite(r_dist(engine)));
        const double r_val = cls.spread.value();
        Eigen::VectorXd phi_s(s);
        for (int a = 0; a < s; ++a) phi_s[a] = phi[idx[a]];
        const double inf_norm = phi_s.cwiseAbs().maxCoeff();
        const double l1_norm = phi_s.cwiseAbs().sum();
        const double prime_margin =
            inf_norm - delta / (rho * (1.0 + r_val)) - r_val / (1.0 + r_val) * l1_norm;
        const double second_margin =
            -delta / (rho * (1.0 + r_val)) + l1_norm / (1.0 + r_val) - inf_norm;
        const double alpha_val = alpha_R(phi, cls).value;
        if (std::abs(prime_margin) < kBoundaryBand || std::abs(second_margin) < kBoundaryBand ||
            std::abs(alpha_val - delta) < kBoundaryBand) {
          near[i] = 1;
          return;
        }
        const bool in_prime = prime_margin > 0.0;
        const bool in_second = second_margin > 0.0;
        const bool in_dual = alpha_val > delta;
        if (in_prime && !in_dual) contain_bad[i] = 1;
        if (in_dual && !in_prime && !in_second) contain_bad[i] = 1;
      }

      // At R = 2 no dual member may escape Gamma'.
      {
        const ParamClass cls(support, rho, Spread::finite(2.0));
        const double alpha_val = alpha_R(phi, cls).value;
        Eigen::VectorXd phi_s(s);
        for (int a = 0; a < s; ++a) phi_s[a] = phi[idx[a]];
        const double inf_norm = phi_s.cwiseAbs().maxCoeff();
        const double l1_norm = phi_s.cwiseAbs().sum();
        const double prime_margin =
            inf_norm - delta / (rho * 3.0) - (2.0 / 3.0) * l1_norm;
        if (std::abs(alpha_val - delta) < kBoundaryBand ||
            std::abs(prime_margin) < kBoundaryBand) {
          near[i] = 1;
          return;
        }
        if (alpha_val > delta && !(prime_margin > 0.0)) prime_bad[i] = 1;
      }
    });
    result.checks += 2 * count;
    for (int i = 0; i < count; ++i) {
      containment_violations += contain_bad[i];
      prime_empty_violations += prime_bad[i];
      result.boundary += near[i];
    }
  }

  // Where the incoherence family of inequalities holds across the grid, the
  // on-support coordinate j attains the sup norm of Sigma_Sj + lambda Sigma_Sk.
  {
    const int count = 200;
    const int grid = 101;
    std::vector<int> bad(count, 0);
    parallel_for(count, [&](int i) {
      std::mt19937_64 engine = make_engine(seed, 0x1f7, static_cast<std::uint64_t>(i));
      std::uniform_int_distribution<int> p_dist(4, 8);
      const int p = p_dist(engine);
      std::uniform_int_distribution<int> s_dist(2, std::min(3, p - 1));
      const Support support = random_support(p, s_dist(engine), engine);
      std::uniform_real_distribution<double> conc(0.9, 5.0);
      const CovMatrix sigma =
          random_unit_diag_cov(p, derive_seed(seed, 0x1f8, i), conc(engine));
      std::uniform_real_distribution<double> r_dist(1.0, 3.0);
      std::uniform_real_distribution<double> d_dist(0.0, 0.4);
      const double r_val = r_dist(engine);
      const double delta_prime = d_dist(engine);
      const auto& s_idx = support.indices();
      for (int j : s_idx) {
        for (int k : support.complement()) {
          bool condition_all = true;
          for (int g = 0; g < grid && condition_all; ++g) {
            const double lambda = -1.0 + 2.0 * g / (grid - 1);
            const Eigen::VectorXd u =
                sigma.sub_column(s_idx, j) + lambda * sigma.sub_column(s_idx, k);
            const double lhs =
                r_val / (1.0 + r_val) * u.cwiseAbs().sum() + delta_prime / (1.0 + r_val);
            if (!(lhs < u.cwiseAbs().maxCoeff())) condition_all = false;
          }
          if (!condition_all) continue;
          for (int g = 0; g < grid; ++g) {
            const double lambda = -1.0 + 2.0 * g / (grid - 1);
            const Eigen::VectorXd u =
                sigma.sub_column(s_idx, j) + lambda * sigma.sub_column(s_idx, k);
            double u_j = 0.0;
            for (std::size_t a = 0; a < s_idx.size(); ++a) {
              if (s_idx[a] == j) u_j = u[a];
            }
            if (u.cwiseAbs().maxCoeff() > u_j + 1e-12) {
              bad[i] = 1;
              break;
            }
          }
        }
      }
    });
    result.checks += count;
    for (int i = 0; i < count; ++i) infnorm_violations += bad[i];
  }

  result.violations = orthonormal_mismatch + identity_mismatch + containment_violations +
                      prime_empty_violations + infnorm_violations;
  result.details["orthonormal_form_mismatches"] = orthonormal_mismatch;
  result.details["lambda_identity_mismatches"] = identity_mismatch;
  result.details["dual_containment_violations"] = containment_violations;
  result.details["dual_not_prime_at_R2"] = prime_empty_violations;
  result.details["infnorm_equality_violations"] = infnorm_violations;
  return result;
}

SuiteResult run_prop_suite(int instances, std::uint64_t seed) {
  SuiteResult result;
  result.name = "props";
  std::vector<int> bad_pw(instances, 0), bad_rip(instances, 0), bad_eig(instances, 0);
  std::vector<int> near(instances, 0);
  std::vector<int> nonvacuous_pw(instances, 0), nonvacuous_rip(instances, 0),
      nonvacuous_eig(instances, 0);

  parallel_for(instances, [&](int i) {
    std::mt19937_64 engine = make_engine(seed, 0x9a0, static_cast<std::uint64_t>(i));
    std::uniform_int_distribution<int> p_dist(4, 10);
    const int p = p_dist(engine);
    std::uniform_int_distribution<int> s_dist(2, std::min(4, p - 1));
    const int s = s_dist(engine);
    std::uniform_real_distribution<double> r_dist(1.0, 3.0);
    std::uniform_real_distribution<double> d_dist(0.0, 0.5);
    const Spread spread = Spread::finite(r_dist(engine));
    const double delta_prime = d_dist(engine);

    // Mix concentrated instances (the implications fire) with loose ones and
    // occasionally a near-singular planted block.
    std::uniform_real_distribution<double> conc(1.0, 30.0);
    CovMatrix sigma = random_unit_diag_cov(p, derive_seed(seed, 0x9a1, i), conc(engine));
    Support support = random_support(p, s, engine);
    if (i % 5 == 0) {
      std::uniform_real_distribution<double> mu_dist(0.95, 0.9999);
      std::vector<int> idx(s);
      std::iota(idx.begin(), idx.end(), 0);
      support = Support(idx, p);
      sigma = block_example_cov(p, support, {s}, mu_dist(engine), 0.0, 0);
    }

    // Proposition: small PWI forces the incoherence condition over all
    // supports of size <= s.
    {
      const double pwi = pairwise_incoherence(sigma);
      const double threshold =
          (1.0 - delta_prime) / (2.0 * spread.value() * (s - 1) + 1.0);
      if (std::abs(pwi - threshold) < kBoundaryBand) {
        near[i] = 1;
      } else if (pwi_implies_mri_bound(pwi, s, spread, delta_prime)) {
        nonvacuous_pw[i] = 1;
        std::vector<int> subset;
        bool all_hold = true;
        double closest = std::numeric_limits<double>::infinity();
        for (int size = 1; size <= s && all_hold; ++size) {
          std::vector<int> pick(size);
          std::iota(pick.begin(), pick.end(), 0);
          while (true) {
            const Support sub(pick, p);
            const IncoherenceReport rep = mri_check(sigma, sub, spread, delta_prime);
            closest = std::min(closest, std::abs(rep.min_slack()));
            if (!rep.holds) {
              all_hold = false;
              break;
            }
            int a = size - 1;
            while (a >= 0 && pick[a] == p - size + a) --a;
            if (a < 0) break;
            ++pick[a];
            for (int b = a + 1; b < size; ++b) pick[b] = pick[b - 1] + 1;
          }
        }
        if (!all_hold) {
          if (closest < kBoundaryBand) {
            near[i] = 1;
          } else {
            bad_pw[i] = 1;
          }
        }
      }
    }

    // Proposition: the incoherence condition over all size-s supports bounds
    // the RIP constant of order 2s.
    if (2 * s <= p) {
      bool all_hold = true;
      double closest = std::numeric_limits<double>::infinity();
      std::vector<int> pick(s);
      std::iota(pick.begin(), pick.end(), 0);
      while (true) {
        const Support sub(pick, p);
        const IncoherenceReport rep = mri_check(sigma, sub, spread, delta_prime);
        closest = std::min(closest, std::abs(rep.min_slack()));
        if (!rep.holds) {
          all_hold = false;
          break;
        }
        int a = s - 1;
        while (a >= 0 && pick[a] == p - s + a) --a;
        if (a < 0) break;
        ++pick[a];
        for (int b = a + 1; b < s; ++b) pick[b] = pick[b - 1] + 1;
      }
      if (all_hold) {
        if (closest < kBoundaryBand) {
          near[i] = 1;
        } else {
          nonvacuous_rip[i] = 1;
          const double bound = mri_implies_rip_bound(s, spread, delta_prime);
          const double rip = rip_constant(sigma, 2 * s);
          if (!(rip < bound) && std::abs(rip - bound) >= kBoundaryBand) bad_rip[i] = 1;
          if (std::abs(rip - bound) < kBoundaryBand) near[i] = 1;
        }
      }
    }

    // Proposition: the small-eigenvalue obstruction forces failure.
    {
      if (small_eigen_obstruction(sigma, support, spread, delta_prime)) {
        nonvacuous_eig[i] = 1;
        const IncoherenceReport rep = mri_check(sigma, support, spread, delta_prime);
        if (rep.holds) {
          if (std::abs(rep.min_slack()) < kBoundaryBand) {
            near[i] = 1;
          } else {
            bad_eig[i] = 1;
          }
        }
      }
    }
  });

  result.checks = 3 * instances;
  int pw = 0, rip = 0, eig = 0, npw = 0, nrip = 0, neig = 0;
  for (int i = 0; i < instances; ++i) {
    pw += bad_pw[i];
    rip += bad_rip[i];
    eig += bad_eig[i];
    npw += nonvacuous_pw[i];
    nrip += nonvacuous_rip[i];
    neig += nonvacuous_eig[i];
    result.boundary += near[i];
  }
  result.violations = pw + rip + eig;
  result.details["pwi_to_mri_violations"] = pw;
  result.details["mri_to_rip_violations"] = rip;
  result.details["small_eigen_violations"] = eig;
  result.details["pwi_to_mri_nonvacuous"] = npw;
  result.details["mri_to_rip_nonvacuous"] = nrip;
  result.details["small_eigen_nonvacuous"] = neig;
  return result;
}

SuiteResult run_conjecture1_suite(int instances, std::uint64_t seed) {
  SuiteResult result;
  result.name = "conjecture1";
  const Conjecture1Report report = conjecture1_search(instances, 8, 4, seed);
  result.checks = report.instances;
  result.boundary = report.boundary;
  result.findings = report.counterexamples;
  result.details = to_json(report);
  return result;
}

std::vector<RegionRow> region_sweep(int r, const Spread& spread, int grid) {
  if (grid < 2) throw ValidationError("region grid must be at least 2x2");
  if (r < 2) throw ValidationError("region sweep needs r >= 2");
  const int s = 2 * r;
  const int p = s + 1;
  std::vector<int> idx(s);
  std::iota(idx.begin(), idx.end(), 0);
  const Support support(idx, p);

  std::vector<RegionRow> rows(static_cast<std::size_t>(grid) * grid);
  parallel_for(grid * grid, [&](int cell) {
    const int i = cell / grid;
    const int j = cell % grid;
    RegionRow row;
    row.mu = -1.0 + (2.0 * i + 1.0) / grid;
    row.eta = -1.0 + (2.0 * j + 1.0) / grid;
    row.lasso_ok = example_region_closed_form(row.mu, row.eta, r, spread,
                                              RegionCondition::lasso);
    row.mri_closed = example_region_closed_form_two_blocks(row.mu, row.eta, r, spread);
    row.pwi_ok = std::max(std::abs(row.mu), std::abs(row.eta)) <= 1.0 / (3.0 * s);
    try {
      const CovMatrix sigma = block_example_cov(p, support, {r, r}, row.mu, row.eta, 0);
      row.psd_ok = true;
      const IncoherenceReport report = mri_check(sigma, support, spread, 0.0);
      row.mri_direct = report.holds;
      row.mri_slack = report.min_slack();
    } catch (const ValidationError&) {
      row.psd_ok = false;
      row.mri_direct = false;
      row.mri_slack = 0.0;
    }
    rows[cell] = row;
  });
  return rows;
}

std::string region_csv(const std::vector<RegionRow>& rows) {
  std::string out = "mu,eta,lasso_ok,mri_closed,mri_direct,pwi_ok,psd_ok,mri_slack\n";
  char buf[192];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%d,%d,%d,%d,%d,%.10g\n", row.mu, row.eta,
                  row.lasso_ok ? 1 : 0, row.mri_closed ? 1 : 0, row.mri_direct ? 1 : 0,
                  row.pwi_ok ? 1 : 0, row.psd_ok ? 1 : 0, row.mri_slack);
    out += buf;
  }
  return out;
}

}  // namespace inclab
