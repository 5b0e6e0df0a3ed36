#ifndef RONS_ERRORS_HPP
#define RONS_ERRORS_HPP

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace rons {

// Base class for all library errors. The category string is what the CLI
// writes into a failed run summary.
class Error : public std::runtime_error {
 public:
  Error(std::string category, const std::string& what)
      : std::runtime_error(what), category_(std::move(category)) {}
  const std::string& category() const { return category_; }

 private:
  std::string category_;
};

class AlignmentError : public Error {
 public:
  explicit AlignmentError(const std::string& what) : Error("alignment", what) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error("validation", what) {}
};

// Parameter vector outside the family's admissible set.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error("domain", what) {}
};

// Metric tensor failed Cholesky: the tangent fields are (numerically) dependent.
class ImmersionError : public Error {
 public:
  explicit ImmersionError(const std::string& what) : Error("immersion", what) {}
};

// Constraint matrix failed Cholesky: conserved-quantity gradients are dependent.
class DependentConstraintsError : public Error {
 public:
  explicit DependentConstraintsError(const std::string& what)
      : Error("dependent-constraints", what) {}
};

class FitError : public Error {
 public:
  FitError(const std::string& what, Eigen::VectorXd best, double residual)
      : Error("fit", what), best_(std::move(best)), residual_(residual) {}
  const Eigen::VectorXd& best_iterate() const { return best_; }
  double best_residual() const { return residual_; }

 private:
  Eigen::VectorXd best_;
  double residual_;
};

class BlowupError : public Error {
 public:
  explicit BlowupError(const std::string& what) : Error("blowup", what) {}
};

}  // namespace rons

#endif  // RONS_ERRORS_HPP
