#include <doctest.h>

#include <Eigen/Dense>

#include "inclab/covariance.hpp"
#include "inclab/incoherence.hpp"
#include "inclab/rng.hpp"
#include "oracles.hpp"

using namespace inclab;

TEST_SUITE_BEGIN("incoherence");

TEST_CASE("identity margins are forced by the algebra") {
  const CovMatrix sigma = identity_cov(5);
  const Support support({1, 3}, 5);

  const IncoherenceReport at_half = mri_check(sigma, support, Spread::finite(2.0), 0.5);
  CHECK(at_half.holds);
  for (const auto& row : at_half.margins) {
    CHECK(row.slack == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    CHECK(row.lhs == doctest::Approx(2.0 / 3.0 + 0.5 / 3.0).epsilon(1e-12));
    CHECK(row.rhs == 1.0);
  }
  CHECK(at_half.margins.size() == 2 * 3 * 2);
  REQUIRE(at_half.binding.has_value());
  CHECK(at_half.binding->j == 1);
  CHECK(at_half.binding->k == 0);

  // slack exactly zero is not strict: the condition fails
  for (double r : {1.0, 2.0, 7.5}) {
    const IncoherenceReport at_one = mri_check(sigma, support, Spread::finite(r), 1.0);
    CHECK(!at_one.holds);
    CHECK(at_one.min_slack() == doctest::Approx(0.0));
  }
}

TEST_CASE("single strong cross correlation, hand-evaluated") {
  // Identity except Sigma_{jk} = 0.9 with j = 0 in S, k = 2 off S.
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(4, 4);
  m(0, 2) = m(2, 0) = 0.9;
  const CovMatrix sigma = CovMatrix::from_entries(m);
  const Support support({0, 1}, 4);
  const IncoherenceReport report = mri_check(sigma, support, Spread::finite(1.0), 0.0);
  CHECK(report.holds);
  for (const auto& row : report.margins) {
    if (row.j == 0 && row.k == 2 && row.sign > 0) {
      CHECK(row.lhs == doctest::Approx(0.95).epsilon(1e-12));
      CHECK(row.rhs == doctest::Approx(1.9).epsilon(1e-12));
    }
    if (row.j == 0 && row.k == 2 && row.sign < 0) {
      CHECK(row.lhs == doctest::Approx(0.05).epsilon(1e-12));
      CHECK(row.rhs == doctest::Approx(0.1).epsilon(1e-12));
    }
  }
  // Cross-check against the independent recovery oracle.
  const ParamClass cls(support, 1.0, Spread::finite(1.0));
  CHECK(oracle::min_recovery_margin(sigma, cls, 0.0, 4000, 11) > 0.0);
}

TEST_CASE("orthonormal-form check and its agreement with the general form") {
  const CovMatrix id = identity_cov(4);
  const Support support({0, 1}, 4);
  CHECK(mri_check_orthonormal(id, support, Spread::finite(1.0), 0.0).holds);

  {
    Eigen::MatrixXd cross(2, 2);
    cross << 0.4, 0.0, 0.4, 0.0;
    const CovMatrix sigma = oracle::orthonormal_instance(4, support, cross);
    const auto orth = mri_check_orthonormal(sigma, support, Spread::finite(1.0), 0.0);
    CHECK(orth.holds);  // ||Sigma_Sk||_1 = 0.8 < 1
    CHECK(mri_check(sigma, support, Spread::finite(1.0), 0.0).holds == orth.holds);
  }
  {
    Eigen::MatrixXd cross(2, 2);
    cross << 0.6, 0.0, 0.6, 0.0;
    const CovMatrix sigma = oracle::orthonormal_instance(4, support, cross);
    const auto orth = mri_check_orthonormal(sigma, support, Spread::finite(2.0), 0.0);
    CHECK(!orth.holds);  // 1.2 vs 0.5 + 0.5 * 0.6 = 0.8
    REQUIRE(orth.binding.has_value());
    CHECK(orth.binding->lhs == doctest::Approx(1.2).epsilon(1e-12));
    CHECK(orth.binding->rhs == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(mri_check(sigma, support, Spread::finite(2.0), 0.0).holds == orth.holds);
  }

  // Precondition Sigma_SS = I is an error, not a fallback.
  const CovMatrix corr = block_example_cov(4, support, {2}, 0.3, 0.0, 0);
  CHECK_THROWS_AS(mri_check_orthonormal(corr, support, Spread::finite(1.0), 0.0),
                  ValidationError);
}

TEST_CASE("infinite spread collapses to the identity classification") {
  const CovMatrix id = identity_cov(5);
  const Support support({0, 1}, 5);
  CHECK(mri_infinite_R_classification(id, support, 0.5));
  CHECK(!mri_infinite_R_classification(id, support, 1.0));

  CHECK(mri_check(id, support, Spread::infinite(), 0.5).holds);
  CHECK(!mri_check(id, support, Spread::infinite(), 1.0).holds);
  CHECK(mri_check_orthonormal(id, support, Spread::infinite(), 0.5).holds);

  // Any generic non-identity matrix fails both routes (s >= 2).
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const CovMatrix sigma = random_unit_diag_cov(5, seed, 1.0 + (seed % 5));
    if (sigma.is_identity()) continue;
    CHECK(!mri_infinite_R_classification(sigma, support, 0.2));
    CHECK(!mri_check(sigma, support, Spread::infinite(), 0.2).holds);
  }
}

TEST_CASE("lasso incoherence values") {
  CHECK(lasso_incoherence(identity_cov(4), Support({0, 1}, 4)) == doctest::Approx(0.0));

  // Aligned block column: Sigma_SS^{-1} Sigma_Sk = eta/(1 - mu + r mu) 1_r,
  // so the norm is r eta / (1 + (r-1) mu) and reaches 1 exactly at
  // eta = (1 + (r-1) mu)/r.
  const double mu = 0.3;
  const double eta = 0.35;
  const Support support({0, 1}, 3);
  const CovMatrix sigma = block_example_cov(3, support, {2}, mu, eta, 0);
  const double value = lasso_incoherence(sigma, support);
  CHECK(value == doctest::Approx(2 * eta / (1 + mu)).epsilon(1e-12));
  const CovMatrix at_boundary = block_example_cov(3, support, {2}, mu, (1 + mu) / 2, 0);
  CHECK(lasso_incoherence(at_boundary, support) == doctest::Approx(1.0).epsilon(1e-12));

  // Alternative operator-norm route on random instances.
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const CovMatrix random = random_unit_diag_cov(6, seed, 1.2);
    const Support s2({0, 2, 4}, 6);
    const Eigen::MatrixXd ss = random.block(s2.indices(), s2.indices());
    const Eigen::MatrixXd inv = ss.inverse();
    double oracle_value = 0.0;
    for (int k : s2.complement()) {
      oracle_value = std::max(oracle_value,
                              (inv * random.sub_column(s2.indices(), k)).cwiseAbs().sum());
    }
    CHECK(lasso_incoherence(random, s2) == doctest::Approx(oracle_value).epsilon(1e-9));
  }

  // Singular on-support block is a deterministic failure.
  const CovMatrix singular = block_example_cov(3, support, {2}, 1.0, 0.0, 0);
  CHECK_THROWS_AS(lasso_incoherence(singular, support), NumericalError);
}

TEST_CASE("pairwise incoherence") {
  CHECK(pairwise_incoherence(identity_cov(6)) == 0.0);
  const Support support({0, 1, 2}, 4);
  Eigen::MatrixXd equi = Eigen::MatrixXd::Identity(4, 4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (i != j) equi(i, j) = 0.2;
    }
  }
  CHECK(pairwise_incoherence(CovMatrix::from_entries(equi)) == doctest::Approx(0.2));

  const CovMatrix block = block_example_cov(4, Support({0, 1}, 4), {2}, 0.3, 0.1, 0);
  double scan = 0.0;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      scan = std::max(scan, std::abs(block(i, j) - (i == j ? 1.0 : 0.0)));
    }
  }
  CHECK(pairwise_incoherence(block) == doctest::Approx(scan));
  CHECK(pairwise_incoherence(block) == doctest::Approx(0.3));
}

TEST_CASE("rip constant") {
  CHECK(rip_constant(identity_cov(6), 3) == 0.0);
  CHECK(rip_constant(random_unit_diag_cov(7, 5, 1.0), 1) == 0.0);

  Eigen::MatrixXd equi = Eigen::MatrixXd::Identity(4, 4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (i != j) equi(i, j) = 0.5;
    }
  }
  const CovMatrix m = CovMatrix::from_entries(equi);
  // order 2: 2x2 equicorrelated deviation eigenvalues are +-mu.
  CHECK(rip_constant(m, 2) == doctest::Approx(0.5).epsilon(1e-12));

  const CovMatrix random = random_unit_diag_cov(8, 17, 1.0);
  double prev = 0.0;
  for (int order = 1; order <= 5; ++order) {
    const double now = rip_constant(random, order);
    CHECK(now >= prev - 1e-12);
    prev = now;
  }
  CHECK_THROWS_AS(rip_constant(random_unit_diag_cov(40, 3, 2.0), 20, 2'000'000), BudgetError);
}

TEST_CASE("proposition bounds") {
  CHECK(pwi_implies_mri_bound(0.33, 2, Spread::finite(1.0), 0.0));
  CHECK(!pwi_implies_mri_bound(0.34, 2, Spread::finite(1.0), 0.0));
  CHECK(!pwi_implies_mri_bound(0.01, 3, Spread::finite(2.0), 1.0));  // threshold 0
  CHECK(pwi_implies_mri_bound(0.11, 3, Spread::finite(2.0), 0.0));
  CHECK(!pwi_implies_mri_bound(0.12, 3, Spread::finite(2.0), 0.0));  // threshold 1/9

  CHECK(mri_implies_rip_bound(2, Spread::finite(1.0), 0.0) == doctest::Approx(3.0));
  CHECK(mri_implies_rip_bound(4, Spread::finite(2.0), 1.0) == doctest::Approx(0.0));
  CHECK(mri_implies_rip_bound(3, Spread::finite(6.0), 0.0) ==
        doctest::Approx(5.0 / 12.0).epsilon(1e-12));
}

TEST_CASE("small eigenvalue obstruction") {
  const CovMatrix id = identity_cov(4);
  const Support support({0, 1}, 4);
  CHECK(!small_eigen_obstruction(id, support, Spread::finite(1.0), 0.5));

  // Equicorrelated s=2 with mu = 0.9999: lambda_s = 0.01.
  const CovMatrix near_singular = block_example_cov(3, Support({0, 1}, 3), {2}, 0.9999, 0.0, 0);
  const double critical = 0.01 * std::sqrt(2.0) * 2.0;  // R = 1
  CHECK(small_eigen_obstruction(near_singular, Support({0, 1}, 3), Spread::finite(1.0),
                                critical * 1.01));
  CHECK(!small_eigen_obstruction(near_singular, Support({0, 1}, 3), Spread::finite(1.0),
                                 critical * 0.99));
  CHECK(!small_eigen_obstruction(near_singular, Support({0, 1}, 3), Spread::finite(1.0), 0.0));
}

TEST_CASE("closed-form example regions") {
  // Degenerate zeta = 1 at r = 2, R = 1: only the second min term binds.
  const Spread one = Spread::finite(1.0);
  CHECK(example_region_closed_form(0.0, 0.49, 2, one, RegionCondition::mri));
  CHECK(!example_region_closed_form(0.0, 0.51, 2, one, RegionCondition::mri));
  CHECK(example_region_closed_form(0.0, 0.49, 2, one, RegionCondition::lasso));
  CHECK(example_region_closed_form(0.0, 0.5, 2, one, RegionCondition::lasso));  // closure
  CHECK(!example_region_closed_form(0.0, 0.51, 2, one, RegionCondition::lasso));
  CHECK(example_region_closed_form(0.8, 0.89, 2, one, RegionCondition::mri));

  // |mu| >= zeta kills the region: mu=0.6, r=2, R=2 has zeta = 0.5.
  CHECK(!example_region_closed_form(0.6, 0.01, 2, Spread::finite(2.0), RegionCondition::mri));
  // And the direct check on the assembled single-block matrix agrees.
  const CovMatrix direct = block_example_cov(3, Support({0, 1}, 3), {2}, 0.6, 0.01, 0);
  CHECK(!mri_check(direct, Support({0, 1}, 3), Spread::finite(2.0), 0.0).holds);
}

TEST_CASE("closed-form mri region agrees with the direct check on a grid") {
  for (int r : {2, 3}) {
    for (double r_val : {1.0, 2.0}) {
      const Spread spread = Spread::finite(r_val);
      const int p = r + 1;
      const Support support = oracle::first_support(r, p);
      int checked = 0;
      for (int i = 0; i < 50; ++i) {
        for (int j = 0; j < 50; ++j) {
          const double mu = -1.0 + (2.0 * i + 1.0) / 50.0;
          const double eta = -1.0 + (2.0 * j + 1.0) / 50.0;
          const bool closed = example_region_closed_form(mu, eta, r, spread,
                                                         RegionCondition::mri);
          try {
            const CovMatrix sigma = block_example_cov(p, support, {r}, mu, eta, 0);
            const IncoherenceReport report = mri_check(sigma, support, spread, 0.0);
            if (std::abs(report.min_slack()) < 1e-9) continue;  // boundary band
            CHECK(report.holds == closed);
            ++checked;
          } catch (const ValidationError&) {
            // PSD-infeasible cell: nothing to compare.
          }
        }
      }
      CHECK(checked > 1000);
    }
  }
}

TEST_CASE("mri is monotone in slack and spread") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const CovMatrix sigma = random_unit_diag_cov(6, seed, 1.0 + (seed % 4));
    const Support support({0, 3}, 6);
    bool prev = true;
    for (double delta : {0.0, 0.2, 0.4, 0.8, 1.2}) {
      const bool now = mri_check(sigma, support, Spread::finite(1.5), delta).holds;
      if (!prev) CHECK(!now);
      prev = now;
    }
    prev = true;
    for (double r : {1.0, 1.5, 2.0, 4.0, 16.0}) {
      const bool now = mri_check(sigma, support, Spread::finite(r), 0.1).holds;
      if (!prev) CHECK(!now);
      prev = now;
    }
    // R = infinity is the most restrictive point of the chain.
    if (!mri_check(sigma, support, Spread::infinite(), 0.1).holds) continue;
    CHECK(mri_check(sigma, support, Spread::finite(1e6), 0.1).holds);
  }
}

TEST_CASE("mri instances blend convexly") {
  int blended = 0;
  for (std::uint64_t seed = 0; seed < 60 && blended < 10; ++seed) {
    const CovMatrix a = random_unit_diag_cov(5, seed, 4.0);
    const CovMatrix b = random_unit_diag_cov(5, seed + 1000, 4.0);
    const Support support({1, 4}, 5);
    const Spread spread = Spread::finite(2.0);
    if (!mri_check(a, support, spread, 0.1).holds) continue;
    if (!mri_check(b, support, spread, 0.1).holds) continue;
    for (double t : {0.25, 0.5, 0.75}) {
      Eigen::MatrixXd mix = t * a.matrix() + (1.0 - t) * b.matrix();
      mix.diagonal().setOnes();
      const CovMatrix blend = CovMatrix::from_entries(mix);
      CHECK(mri_check(blend, support, spread, 0.1).holds);
    }
    ++blended;
  }
  CHECK(blended >= 5);
}

TEST_SUITE_END();
