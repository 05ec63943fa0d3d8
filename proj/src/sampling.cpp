#include "inclab/sampling.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include "inclab/incoherence.hpp"
#include "inclab/parallel.hpp"
#include "inclab/rng.hpp"

namespace inclab {

namespace {

constexpr double kClassBoundaryEps = 1e-9;

Eigen::MatrixXd symmetric_sqrt(const CovMatrix& sigma) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sigma.matrix());
  Eigen::VectorXd roots = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return solver.eigenvectors() * roots.asDiagonal() * solver.eigenvectors().transpose();
}

Eigen::VectorXd draw_class_member(const ParamClass& cls, double t, std::mt19937_64& engine) {
  if (!cls.spread.is_finite()) {
    throw ValidationError("sampling experiments require finite R");
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double low = cls.rho * (1.0 + kClassBoundaryEps);
  const double high = std::max(cls.spread.value() * cls.rho, low);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(cls.support.dimension());
  for (int attempt = 0; attempt < 1000; ++attempt) {
    for (int j : cls.support.indices()) {
      const double mag = low + (high - low) * unit(engine);
      beta[j] = (unit(engine) < 0.5 ? -1.0 : 1.0) * mag;
    }
    if (beta.norm() <= t) return beta;
  }
  throw ValidationError("cannot draw a class member with ||beta||_2 <= t; raise t");
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double pos = q * (values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - lo;
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

}  // namespace

DesignSample sample_design(const CovMatrix& sigma, const Eigen::VectorXd& beta,
                           const SampleConfig& config) {
  if (config.n < 1) throw ValidationError("sample size must be at least 1");
  if (config.sigma_noise < 0.0) throw ValidationError("noise level must be non-negative");
  if (beta.size() != sigma.dim()) {
    throw ValidationError("beta length does not match matrix dimension");
  }
  const int p = sigma.dim();
  const Eigen::MatrixXd root = symmetric_sqrt(sigma);

  std::mt19937_64 engine = make_engine(config.seed, 0xde5167);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd z(config.n, p);
  for (int i = 0; i < config.n; ++i) {
    for (int j = 0; j < p; ++j) z(i, j) = gauss(engine);
  }
  DesignSample out;
  out.x = z * root;
  out.y = out.x * beta;
  if (config.sigma_noise > 0.0) {
    for (int i = 0; i < config.n; ++i) out.y[i] += config.sigma_noise * gauss(engine);
  }
  return out;
}

SelectionResult sample_mr_select(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, int s) {
  if (x.rows() != y.size()) throw ValidationError("X and y row counts differ");
  if (s < 1 || s > x.cols()) throw ValidationError("selection size out of range");
  SelectionResult result;
  result.scores = (x.transpose() * y / static_cast<double>(x.rows())).cwiseAbs();

  std::vector<int> order(result.scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (result.scores[a] != result.scores[b]) return result.scores[a] > result.scores[b];
    return a < b;
  });
  result.tie_flag = s < static_cast<int>(order.size()) &&
                    result.scores[order[s - 1]] == result.scores[order[s]];
  result.selected.assign(order.begin(), order.begin() + s);
  return result;
}

XiBound xi_bound(const CovMatrix& sigma, const ParamClass& cls, double t) {
  if (!(t > 0.0)) throw ValidationError("norm cap t must be positive");
  const Eigen::MatrixXd block =
      sigma.block(cls.support.indices(), cls.support.indices());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(block, Eigen::EigenvaluesOnly);
  const double op_norm = std::max(solver.eigenvalues().maxCoeff(), 0.0);
  const double s = static_cast<double>(cls.support.size());
  const double class_cap =
      cls.spread.is_finite() ? std::sqrt(s) * cls.rho * cls.spread.value()
                             : std::numeric_limits<double>::infinity();
  XiBound bound;
  bound.t = t;
  bound.value = std::sqrt(op_norm) * std::min(t, class_cap);
  return bound;
}

double concentration_error(const CovMatrix& sigma, const Eigen::VectorXd& beta,
                           const SampleConfig& config) {
  const DesignSample sample = sample_design(sigma, beta, config);
  const Eigen::VectorXd r_hat =
      sample.x.transpose() * sample.y / static_cast<double>(config.n);
  const Eigen::VectorXd r = sigma.matrix() * beta;
  return (r_hat - r).cwiseAbs().maxCoeff();
}

ConcentrationReport concentration_experiment(const CovMatrix& sigma, const ParamClass& cls,
                                             double t, const SampleConfig& config) {
  const int p = sigma.dim();
  if (config.replicates < 1) throw ValidationError("replicates must be at least 1");
  if (std::log(static_cast<double>(p)) / config.n > 1.0) {
    throw ValidationError("concentration regime requires log p / n <= 1");
  }
  const double xi = xi_bound(sigma, cls, t).value;
  const double scale =
      (xi + config.sigma_noise) * std::sqrt(std::log(static_cast<double>(p)) / config.n);

  std::vector<double> ratios(config.replicates);
  std::vector<double> errors(config.replicates);
  parallel_for(config.replicates, [&](int rep) {
    std::mt19937_64 engine = make_engine(config.seed, 0xc0c, static_cast<std::uint64_t>(rep));
    const Eigen::VectorXd beta = draw_class_member(cls, t, engine);
    SampleConfig rep_config = config;
    rep_config.seed = derive_seed(config.seed, 0xc0d, rep);
    const double err = concentration_error(sigma, beta, rep_config);
    errors[rep] = err;
    ratios[rep] = scale > 0.0 ? err / scale : 0.0;
  });

  ConcentrationReport report;
  report.replicates = config.replicates;
  report.xi_value = xi;
  report.ratio_q50 = quantile(ratios, 0.5);
  report.ratio_q90 = quantile(ratios, 0.9);
  report.ratio_q99 = quantile(ratios, 0.99);
  report.median_error = quantile(errors, 0.5);
  return report;
}

CovMatrix GaussianFamily::make(int s) const {
  if (name == "identity") return identity_cov(p);
  if (name == "block") {
    if (s < r) throw ValidationError("block family needs s >= r");
    std::vector<int> sizes;
    int rest = s;
    while (rest >= r) {
      sizes.push_back(r);
      rest -= r;
    }
    if (rest > 0) sizes.push_back(rest);
    return block_example_cov(p, support(s), sizes, mu, eta, 0);
  }
  throw ValidationError("unknown family '" + name + "'");
}

Support GaussianFamily::support(int s) const {
  std::vector<int> idx(s);
  for (int i = 0; i < s; ++i) idx[i] = i;
  return Support(idx, p);
}

std::vector<PhaseCell> phase_transition_sweep(const GaussianFamily& family,
                                              const std::vector<int>& s_values,
                                              const std::vector<int>& n_grid,
                                              const SampleConfig& config) {
  if (!family.spread.is_finite()) throw ValidationError("phase sweep requires finite R");
  std::vector<PhaseCell> cells;
  for (std::size_t si = 0; si < s_values.size(); ++si) {
    const int s = s_values[si];
    const CovMatrix sigma = family.make(s);
    const Support support = family.support(s);
    if (!mri_check(sigma, support, family.spread, family.slack / family.rho).holds) {
      throw ValidationError("family member fails MR incoherence at its configured slack");
    }
    for (std::size_t ni = 0; ni < n_grid.size(); ++ni) {
      const int n = n_grid[ni];
      std::vector<int> successes(config.replicates, 0);
      parallel_for(config.replicates, [&](int rep) {
        std::mt19937_64 engine =
            make_engine(config.seed, 0xfa5e + si, static_cast<std::uint64_t>(ni), rep);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const double low = family.rho * (1.0 + kClassBoundaryEps);
        const double high = std::max(family.spread.value() * family.rho, low);
        Eigen::VectorXd beta = Eigen::VectorXd::Zero(family.p);
        for (int j = 0; j < s; ++j) {
          const double mag = low + (high - low) * unit(engine);
          beta[j] = (unit(engine) < 0.5 ? -1.0 : 1.0) * mag;
        }
        SampleConfig rep_config;
        rep_config.n = n;
        rep_config.sigma_noise = config.sigma_noise;
        rep_config.seed = derive_seed(config.seed, 0xfa5f + si, ni, rep);
        const DesignSample sample = sample_design(sigma, beta, rep_config);
        const SelectionResult pick = sample_mr_select(sample.x, sample.y, s);
        std::vector<int> sorted = pick.selected;
        std::sort(sorted.begin(), sorted.end());
        successes[rep] = (!pick.tie_flag && sorted == support.indices()) ? 1 : 0;
      });
      PhaseCell cell;
      cell.p = family.p;
      cell.s = s;
      cell.n = n;
      cell.replicates = config.replicates;
      cell.seed = config.seed;
      int hits = 0;
      for (int v : successes) hits += v;
      cell.success_rate = static_cast<double>(hits) / config.replicates;
      cells.push_back(cell);
    }
  }
  return cells;
}

std::string phase_table_csv(const std::vector<PhaseCell>& cells) {
  std::string out = "p,s,n,success_rate,replicates,seed\n";
  char buf[128];
  for (const auto& c : cells) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%d,%.17g,%d,%llu\n", c.p, c.s, c.n, c.success_rate,
                  c.replicates, static_cast<unsigned long long>(c.seed));
    out += buf;
  }
  return out;
}

}  // namespace inclab
