#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace spinline {

using Complex = std::complex<double>;
using AmplitudeVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr Complex kI{0.0, 1.0};

// Bad input: the CLI maps this to exit status 1.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Requested system exceeds the dense/sparse memory bounds.
class TooLarge : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

enum class NumericalErrorKind {
  kDegeneratePulse,
  kProtocolStalled,
  kNoSignal,
  kMappingViolation,
  kLocalityViolation,
  kResetFailure,
  kProtocolViolation,
};

const char* to_string(NumericalErrorKind kind);

// Numerical or protocol failure: the CLI maps this to exit status 2.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(NumericalErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  NumericalErrorKind kind() const noexcept { return kind_; }

 private:
  NumericalErrorKind kind_;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidArgument(message);
}

}  // namespace spinline
