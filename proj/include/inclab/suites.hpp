#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "inclab/json_io.hpp"
#include "inclab/types.hpp"

namespace inclab {

struct SuiteResult {
  std::string name;
  int checks = 0;
  int violations = 0;
  int boundary = 0;
  int findings = 0;  // conjecture counterexamples: reported, not a failure
  Json details;

  [[nodiscard]] bool ok() const { return violations == 0; }
};

Json to_json(const SuiteResult& result);

/// Theorem-equivalence suite: incoherence vs lambda sweep vs brute force on
/// random and planted instances, R in {2, 3}.
SuiteResult run_theorem1_suite(int instances, std::uint64_t seed);

/// Lemma suite: orthonormal-form agreement, the scalar lambda identity, the
/// dual-set containments, and emptiness of the dual-minus-prime set at R = 2.
SuiteResult run_lemma_suite(std::uint64_t seed);

/// Proposition suite: PWI-to-MRI implication, MRI-to-RIP bound, and the
/// small-eigenvalue obstruction.
SuiteResult run_prop_suite(int instances, std::uint64_t seed);

/// Conjecture search: F2-but-not-F3 instances; any hit is a finding.
SuiteResult run_conjecture1_suite(int instances, std::uint64_t seed);

struct RegionRow {
  double mu = 0.0;
  double eta = 0.0;
  bool lasso_ok = false;
  bool mri_closed = false;
  bool mri_direct = false;
  bool pwi_ok = false;
  bool psd_ok = true;
  double mri_slack = 0.0;  // binding slack of the direct check; |slack| < 1e-9
                           // marks a boundary cell
};

/// Region sweep of the two-block example over a cell-centered (mu, eta) grid
/// on [-1, 1]^2. mri_closed evaluates the closed-form region of the same
/// two-block assembly that mri_direct checks numerically.
std::vector<RegionRow> region_sweep(int r, const Spread& spread, int grid);

std::string region_csv(const std::vector<RegionRow>& rows);

}  // namespace inclab
