#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "inclab/covariance.hpp"
#include "inclab/types.hpp"

namespace inclab {

/// One inequality of a condition check. For finite R the MR incoherence row
/// for (j, k, sign) is
///   lhs = R/(1+R) ||Sigma_Sj +- Sigma_Sk||_1 + delta'/(1+R),
///   rhs = Sigma_jj +- Sigma_jk,  slack = rhs - lhs.
/// For R = infinity the condition is the one that survives every finite R:
/// the off-j l1 mass must vanish and delta' < rhs; slack is reported as
/// -offmass when positive mass remains and rhs - delta' otherwise.
struct MarginRow {
  int j = -1;
  int k = -1;
  int sign = +1;  // +1 or -1
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
};

struct IncoherenceReport {
  std::string condition_name;
  bool holds = false;
  std::vector<MarginRow> margins;
  std::optional<MarginRow> binding;  // minimizes slack; ties by smallest (j, k, sign)
  double slack_param = 0.0;          // the delta' used

  [[nodiscard]] double min_slack() const;
};

/// MR incoherence check over all (j in S, k off S, both signs).
IncoherenceReport mri_check(const CovMatrix& sigma, const Support& support, const Spread& spread,
                            double slack);

/// Equivalent per-k form valid only when Sigma_SS = I exactly:
///   ||Sigma_Sk||_1 < (1 - delta')/R + (1 - 1/R) min_j |Sigma_jk|.
/// Throws if Sigma_SS differs from the identity.
IncoherenceReport mri_check_orthonormal(const CovMatrix& sigma, const Support& support,
                                        const Spread& spread, double slack);

/// Literal classification of the R = infinity regime: true iff delta' < 1
/// and Sigma is the identity.
bool mri_infinite_R_classification(const CovMatrix& sigma, const Support& support, double slack);

/// ||Sigma_{S^c S} Sigma_SS^{-1}||_inf. Throws NumericalError when Sigma_SS
/// has condition number above 1e12.
double lasso_incoherence(const CovMatrix& sigma, const Support& support);

/// max_{i <= j} |Sigma_ij - 1{i = j}|.
double pairwise_incoherence(const CovMatrix& sigma);

/// RIP constant of the given order: max over subsets T, |T| <= order, of
/// ||Sigma_TT - I||_2. Refuses scans beyond the subset budget.
double rip_constant(const CovMatrix& sigma, int order, std::uint64_t scan_budget = 2'000'000);

/// Sufficient PWI threshold for MR incoherence over all supports of size <= s:
/// true iff pwi_value < (1 - delta') / (2 R (s - 1) + 1).
bool pwi_implies_mri_bound(double pwi_value, int s, const Spread& spread, double slack);

/// Bound implied on delta_{2s} when MR incoherence holds over all size-s
/// supports: ((1 - delta')/R) (2s - 1)/(s - 1).
double mri_implies_rip_bound(int s, const Spread& spread, double slack);

/// Small-eigenvalue obstruction: with lambda_s^2 the smallest eigenvalue of
/// Sigma_SS, true iff lambda_s <= delta' / (sqrt(s) (R + 1)) with a strictly
/// positive threshold; implies MR incoherence fails.
bool small_eigen_obstruction(const CovMatrix& sigma, const Support& support, const Spread& spread,
                             double slack);

enum class RegionCondition { lasso, mri };

/// Closed-form regions of the block-equicorrelated example with a single
/// aligned block of size r (slack 0):
///   lasso: |eta| <= (1 - mu)/r for mu in (-1/(r-1), 1);
///   mri:   |mu| < zeta and |eta| < min{(-mu+zeta)/(1-zeta), (mu+zeta)/(1+zeta)},
///          zeta = 1/(R (r-1)); at zeta = 1 the first term is non-binding.
bool example_region_closed_form(double mu, double eta, int r, const Spread& spread,
                                RegionCondition which);

/// Additional closed-form constraint binding when the example carries a
/// second, non-aligned block of size r: (r-1)|mu| + r|eta| < 1/R.
bool example_region_closed_form_two_blocks(double mu, double eta, int r, const Spread& spread);

}  // namespace inclab
