#include <doctest.h>

#include <Eigen/Dense>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "inclab/covariance.hpp"
#include "inclab/rng.hpp"
#include "inclab/incoherence.hpp"
#include "inclab/json_io.hpp"
#include "oracles.hpp"

using namespace inclab;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_SUITE_BEGIN("covariance");

TEST_CASE("identity construction") {
  const CovMatrix m3 = identity_cov(3);
  CHECK(m3.dim() == 3);
  CHECK(m3.matrix() == Eigen::MatrixXd::Identity(3, 3));
  const CovMatrix m1 = identity_cov(1);
  CHECK(m1.matrix()(0, 0) == 1.0);
  CHECK(identity_cov(5).min_eigenvalue() == doctest::Approx(1.0));
  CHECK_THROWS_AS(identity_cov(0), ValidationError);
}

TEST_CASE("entry validation catches each invariant separately") {
  Eigen::MatrixXd bad_diag = Eigen::MatrixXd::Identity(3, 3);
  bad_diag(1, 1) = 0.9;
  CHECK_THROWS_WITH_AS(CovMatrix::from_entries(bad_diag), doctest::Contains("unit-diagonal"),
                       ValidationError);

  Eigen::MatrixXd asym = Eigen::MatrixXd::Identity(3, 3);
  asym(0, 1) = 0.2;
  CHECK_THROWS_WITH_AS(CovMatrix::from_entries(asym), doctest::Contains("symmetry"),
                       ValidationError);

  Eigen::MatrixXd big = Eigen::MatrixXd::Identity(2, 2);
  big(0, 1) = big(1, 0) = 1.5;
  CHECK_THROWS_WITH_AS(CovMatrix::from_entries(big), doctest::Contains("out of [-1, 1]"),
                       ValidationError);

  Eigen::MatrixXd npsd = Eigen::MatrixXd::Identity(3, 3);
  npsd(0, 1) = npsd(1, 0) = 0.9;
  npsd(1, 2) = npsd(2, 1) = 0.9;
  npsd(0, 2) = npsd(2, 0) = -0.9;
  CHECK_THROWS_WITH_AS(CovMatrix::from_entries(npsd), doctest::Contains("semidefinite"),
                       ValidationError);
}

TEST_CASE("block example matches the stated structure") {
  const Support support({0, 1}, 4);
  const CovMatrix m = block_example_cov(4, support, {2}, 0.3, 0.0, 0);
  CHECK(m(0, 1) == 0.3);
  CHECK(m(1, 0) == 0.3);
  for (int k : {2, 3}) {
    CHECK(m(0, k) == 0.0);
    CHECK(m(1, k) == 0.0);
  }
  CHECK(m(2, 3) == 0.0);
}

TEST_CASE("block example with zero parameters is the identity") {
  const Support support({0, 2}, 5);
  const CovMatrix m = block_example_cov(5, support, {1, 1}, 0.0, 0.0, 0);
  CHECK(m.matrix() == Eigen::MatrixXd::Identity(5, 5));
}

TEST_CASE("two-block example passes PSD and has the predicted block spectrum") {
  const Support support({0, 1, 2, 3}, 5);
  const CovMatrix m = block_example_cov(5, support, {2, 2}, 0.5, 0.2, 0);
  CHECK(m.min_eigenvalue() >= -kDefaultPsdTol);

  // Each on-support block is 2x2 equicorrelated: eigenvalues 1 +- mu.
  const auto eigs = oracle::equicorrelated_eigs(2, 0.5);
  Eigen::Matrix2d block = m.matrix().block(0, 0, 2, 2);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(block);
  CHECK(solver.eigenvalues()[0] == doctest::Approx(eigs[0]).epsilon(1e-12));
  CHECK(solver.eigenvalues()[1] == doctest::Approx(eigs[1]).epsilon(1e-12));
  CHECK(eigs[0] == doctest::Approx(0.5));
  CHECK(eigs[1] == doctest::Approx(1.5));
}

TEST_CASE("block example rejects PSD-breaking parameters") {
  const Support support({0, 1, 2, 3}, 6);
  CHECK_THROWS_AS(block_example_cov(6, support, {2, 2}, 0.99, 0.9, 0), ValidationError);
  CHECK_THROWS_AS(block_example_cov(6, support, {2, 2}, -1.5, 0.0, 0), ValidationError);
  // aligned_block must name a block of maximal size
  CHECK_THROWS_AS(block_example_cov(6, Support({0, 1, 2}, 6), {2, 1}, 0.2, 0.1, 1),
                  ValidationError);
  CHECK_NOTHROW(block_example_cov(6, support, {2, 2}, 0.2, 0.1, 0));
}

TEST_CASE("random covariance is deterministic per seed and always valid") {
  const CovMatrix a = random_unit_diag_cov(6, 42, 1.5);
  const CovMatrix b = random_unit_diag_cov(6, 42, 1.5);
  CHECK(a.matrix() == b.matrix());
  const CovMatrix c = random_unit_diag_cov(6, 43, 1.5);
  CHECK(a.matrix() != c.matrix());

  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const int p = 1 + static_cast<int>(seed % 9);
    const double conc = 0.5 + (seed % 7) * 0.8;
    CHECK_NOTHROW(random_unit_diag_cov(p, seed, conc));
  }
}

TEST_CASE("higher concentration pulls the random covariance toward identity") {
  double means[3] = {0.0, 0.0, 0.0};
  const double concentrations[3] = {1.0, 4.0, 16.0};
  for (int c = 0; c < 3; ++c) {
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const CovMatrix m = random_unit_diag_cov(6, seed, concentrations[c]);
      double max_off = 0.0;
      for (int i = 0; i < 6; ++i) {
        for (int j = i + 1; j < 6; ++j) max_off = std::max(max_off, std::abs(m(i, j)));
      }
      total += max_off;
    }
    means[c] = total / 100.0;
  }
  CHECK(means[1] < means[0]);
  CHECK(means[2] < means[1]);
}

TEST_CASE("csv round trip is exact") {
  const std::string path = temp_path("inclab_roundtrip.csv");
  const CovMatrix m = random_unit_diag_cov(7, 99, 1.0);
  write_matrix_csv(m, path);
  const CovMatrix back = read_matrix_csv(path);
  CHECK(back.matrix() == m.matrix());

  write_matrix_csv(identity_cov(3), path);
  CHECK(read_matrix_csv(path).matrix() == Eigen::MatrixXd::Identity(3, 3));
  std::filesystem::remove(path);
}

TEST_CASE("csv errors are reported distinctly") {
  const std::string path = temp_path("inclab_bad.csv");
  {
    std::ofstream out(path);
    out << "1,0,0\n0,1,0\n";
  }
  CHECK_THROWS_WITH_AS(read_matrix_csv(path), doctest::Contains("non-square"), ValidationError);
  {
    std::ofstream out(path);
    out << "0.9,0\n0,1\n";
  }
  CHECK_THROWS_WITH_AS(read_matrix_csv(path), doctest::Contains("unit-diagonal"),
                       ValidationError);
  {
    std::ofstream out(path);
    out << "1,zebra\n0,1\n";
  }
  CHECK_THROWS_AS(read_matrix_csv(path), ParseError);
  {
    std::ofstream out(path);
    out << "1,0\n0\n";
  }
  CHECK_THROWS_WITH_AS(read_matrix_csv(path), doctest::Contains("ragged"), ParseError);
  std::filesystem::remove(path);
}

TEST_CASE("support invariants") {
  CHECK_THROWS_AS(Support({}, 3), ValidationError);
  CHECK_THROWS_AS(Support({0, 1, 2}, 3), ValidationError);  // needs s < p
  CHECK_THROWS_AS(Support({1, 0}, 3), ValidationError);
  CHECK_THROWS_AS(Support({0, 3}, 3), ValidationError);
  const Support s({0, 2}, 4);
  CHECK(s.complement() == std::vector<int>{1, 3});
  CHECK(s.contains(2));
  CHECK(!s.contains(1));
}

TEST_CASE("class membership follows the three clauses exactly") {
  const Support support({0, 2}, 4);
  const ParamClass cls(support, 1.0, Spread::finite(2.0));

  Eigen::VectorXd good(4);
  good << 1.5, 0.0, -2.5, 0.0;
  CHECK(CoefVector(good, cls).in_claimed_class());

  Eigen::VectorXd off_support = good;
  off_support[1] = 0.1;
  CHECK(!CoefVector(off_support, cls).in_claimed_class());

  Eigen::VectorXd weak = good;
  weak[0] = 1.0;  // equals rho: strict inequality fails
  CHECK(!CoefVector(weak, cls).in_claimed_class());

  Eigen::VectorXd spread_violation = good;
  spread_violation[2] = -3.5;  // ratio 3.5/1.5 > 2
  CHECK(!CoefVector(spread_violation, cls).in_claimed_class());

  // Unbounded spread admits any ratio.
  const ParamClass loose(support, 1.0, Spread::infinite());
  CHECK(CoefVector(spread_violation, loose).in_claimed_class());
  CHECK_THROWS_AS(CoefVector(weak, cls).validate_membership(), ValidationError);
}

TEST_CASE("param class json round trip, infinity spelled as a string") {
  const ParamClass finite(Support({0, 2}, 5), 0.75, Spread::finite(2.5));
  const Json j = to_json(finite);
  CHECK(j.at("support") == std::vector<int>{0, 2});
  CHECK(j.at("rho") == 0.75);
  CHECK(j.at("spread") == 2.5);
  const ParamClass back = param_class_from_json(j, 5);
  CHECK(back.support == finite.support);
  CHECK(back.rho == finite.rho);
  CHECK(back.spread == finite.spread);

  const ParamClass unbounded(Support({1}, 3), 1.0, Spread::infinite());
  const Json ji = to_json(unbounded);
  CHECK(ji.at("spread") == "inf");
  CHECK(!param_class_from_json(ji, 3).spread.is_finite());
  Json bad = ji;
  bad["spread"] = "huge";
  CHECK_THROWS_AS(param_class_from_json(bad, 3), ParseError);
}

TEST_CASE("incoherence report json has a stable field order") {
  const IncoherenceReport report =
      mri_check(identity_cov(3), Support({0}, 3), Spread::finite(2.0), 0.1);
  const std::string dumped = to_json(report).dump();
  CHECK(dumped.rfind("{\"condition_name\":\"mri\",\"holds\":true,\"slack_param\":", 0) == 0);
  const std::string margin = to_json(report.margins.front()).dump();
  CHECK(margin.rfind("{\"j\":0,\"k\":1,\"sign\":\"+\",\"lhs\":", 0) == 0);
}

TEST_CASE("param class validation") {
  const Support support({0}, 2);
  CHECK_THROWS_AS(ParamClass(support, 0.0, Spread::finite(1.0)), ValidationError);
  CHECK_THROWS_AS(Spread::finite(0.5), ValidationError);
  CHECK(Spread::infinite() == Spread::infinite());
  CHECK_THROWS_AS(Spread::infinite().value(), ValidationError);
}

TEST_SUITE_END();
