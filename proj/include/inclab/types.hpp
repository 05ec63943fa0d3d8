#pragma once

#include <Eigen/Core>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace inclab {

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

class BudgetError : public std::runtime_error {
 public:
  explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Coefficient spread bound R in [1, inf]. Infinity is an explicit state so
/// that limit semantics stay exact instead of relying on a large float.
class Spread {
 public:
  static Spread finite(double r) {
    if (!(r >= 1.0)) {
      throw ValidationError("spread R must satisfy R >= 1, got " + std::to_string(r));
    }
    return Spread(true, r);
  }
  static Spread infinite() { return Spread(false, 0.0); }

  [[nodiscard]] bool is_finite() const { return finite_; }
  [[nodiscard]] double value() const {
    if (!finite_) throw ValidationError("spread R is infinite");
    return r_;
  }

  friend bool operator==(const Spread& a, const Spread& b) {
    return a.finite_ == b.finite_ && (!a.finite_ || a.r_ == b.r_);
  }

 private:
  Spread(bool finite, double r) : finite_(finite), r_(r) {}
  bool finite_;
  double r_;
};

/// Ordered candidate support S: strictly increasing indices in [0, p),
/// non-empty and a proper subset so that off-support indices exist.
class Support {
 public:
  Support(std::vector<int> indices, int p);

  [[nodiscard]] int size() const { return static_cast<int>(indices_.size()); }
  [[nodiscard]] int dimension() const { return p_; }
  [[nodiscard]] const std::vector<int>& indices() const { return indices_; }
  [[nodiscard]] bool contains(int j) const;
  [[nodiscard]] std::vector<int> complement() const;

  friend bool operator==(const Support& a, const Support& b) {
    return a.p_ == b.p_ && a.indices_ == b.indices_;
  }

 private:
  std::vector<int> indices_;
  int p_;
};

/// Parameter class Gamma_{S,rho,R}: supported on S, min magnitude > rho,
/// max/min magnitude ratio <= R.
struct ParamClass {
  ParamClass(Support support, double rho, Spread spread);

  Support support;
  double rho;
  Spread spread;
};

/// A coefficient vector, optionally tagged with the class it is claimed to
/// belong to. Membership uses exact strict comparisons; boundary cases are
/// the caller's responsibility.
struct CoefVector {
  explicit CoefVector(Eigen::VectorXd beta_in, std::optional<ParamClass> cls = std::nullopt)
      : beta(std::move(beta_in)), class_of(std::move(cls)) {}

  Eigen::VectorXd beta;
  std::optional<ParamClass> class_of;

  [[nodiscard]] bool in_claimed_class() const;
  void validate_membership() const;  // throws ValidationError with the violated clause
};

enum class RecoveryMethod { closed_form, lambda_sweep, brute_force, constructed };

[[nodiscard]] std::string to_string(RecoveryMethod m);

/// Outcome of a uniform-recovery check. On failure the witness lies in the
/// queried class and its recovery margin is non-positive (up to the
/// documented boundary band).
struct RecoveryVerdict {
  bool pass = true;
  std::optional<CoefVector> witness_beta;
  std::optional<std::pair<int, int>> violated_pair;  // (j in S, k off S)
  std::optional<double> violated_lambda;
  double margin = 0.0;
  RecoveryMethod method = RecoveryMethod::brute_force;
  bool exact = true;  // false when the verdict is "no counterexample within budget"
};

}  // namespace inclab
