#include "inclab/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace inclab {

Support::Support(std::vector<int> indices, int p) : indices_(std::move(indices)), p_(p) {
  if (p <= 0) throw ValidationError("support dimension must be positive");
  if (indices_.empty()) throw ValidationError("support must be non-empty");
  if (static_cast<int>(indices_.size()) >= p) {
    throw ValidationError("support must leave at least one off-support index (s < p)");
  }
  int prev = -1;
  for (int idx : indices_) {
    if (idx < 0 || idx >= p) {
      throw ValidationError("support index " + std::to_string(idx) + " out of range [0, " +
                            std::to_string(p) + ")");
    }
    if (idx <= prev) throw ValidationError("support indices must be strictly increasing");
    prev = idx;
  }
}

bool Support::contains(int j) const {
  return std::binary_search(indices_.begin(), indices_.end(), j);
}

std::vector<int> Support::complement() const {
  std::vector<int> out;
  out.reserve(p_ - indices_.size());
  std::size_t pos = 0;
  for (int i = 0; i < p_; ++i) {
    if (pos < indices_.size() && indices_[pos] == i) {
      ++pos;
    } else {
      out.push_back(i);
    }
  }
  return out;
}

ParamClass::ParamClass(Support support_in, double rho_in, Spread spread_in)
    : support(std::move(support_in)), rho(rho_in), spread(spread_in) {
  if (!(rho > 0.0)) throw ValidationError("rho must be strictly positive");
}

bool CoefVector::in_claimed_class() const {
  if (!class_of) return true;
  const auto& cls = *class_of;
  if (beta.size() != cls.support.dimension()) return false;
  for (int k : cls.support.complement()) {
    if (beta[k] != 0.0) return false;
  }
  double min_mag = std::numeric_limits<double>::infinity();
  double max_mag = 0.0;
  for (int j : cls.support.indices()) {
    min_mag = std::min(min_mag, std::abs(beta[j]));
    max_mag = std::max(max_mag, std::abs(beta[j]));
  }
  if (!(min_mag > cls.rho)) return false;
  if (cls.spread.is_finite() && !(max_mag <= cls.spread.value() * min_mag)) return false;
  return true;
}

void CoefVector::validate_membership() const {
  if (!class_of) return;
  const auto& cls = *class_of;
  if (beta.size() != cls.support.dimension()) {
    throw ValidationError("coefficient vector length does not match class dimension");
  }
  for (int k : cls.support.complement()) {
    if (beta[k] != 0.0) {
      throw ValidationError("coefficient nonzero off the claimed support at index " +
                            std::to_string(k));
    }
  }
  double min_mag = std::numeric_limits<double>::infinity();
  double max_mag = 0.0;
  for (int j : cls.support.indices()) {
    min_mag = std::min(min_mag, std::abs(beta[j]));
    max_mag = std::max(max_mag, std::abs(beta[j]));
  }
  if (!(min_mag > cls.rho)) {
    throw ValidationError("minimum on-support magnitude must exceed rho");
  }
  if (cls.spread.is_finite() && !(max_mag <= cls.spread.value() * min_mag)) {
    throw ValidationError("on-support spread exceeds R");
  }
}

std::string to_string(RecoveryMethod m) {
  switch (m) {
    case RecoveryMethod::closed_form: return "closed_form";
    case RecoveryMethod::lambda_sweep: return "lambda_sweep";
    case RecoveryMethod::brute_force: return "brute_force";
    case RecoveryMethod::constructed: return "constructed";
  }
  return "unknown";
}

}  // namespace inclab
