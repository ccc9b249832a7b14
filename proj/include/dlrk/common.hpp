#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dlrk {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;

/// A caller broke a documented precondition (shape mismatch, rank out of range).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Invalid user-facing configuration (bad grid, CFL violation, unknown method).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside the mathematical domain of an operation (nonpositive density or temperature).
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A time step produced non-finite values.
class IntegrationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ContractViolation(message);
}

}  // namespace dlrk
