#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace ptomech {

using Complex = std::complex<double>;

using Matrix6d  = Eigen::Matrix<double, 6, 6>;
using Matrix6cd = Eigen::Matrix<Complex, 6, 6>;
using Matrix4d  = Eigen::Matrix<double, 4, 4>;
using Matrix4cd = Eigen::Matrix<Complex, 4, 4>;
using Matrix2d  = Eigen::Matrix<double, 2, 2>;
using Vector6d  = Eigen::Matrix<double, 6, 1>;

inline constexpr Complex kImag{0.0, 1.0};

// Error taxonomy. DomainError and its children mean "the request was invalid";
// NumericalError and its children mean "a solver failed on a valid request".
// The CLI maps the former to exit code 1 and the latter to exit code 2.

class DomainError : public std::runtime_error {
public:
  DomainError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

class SpecError : public DomainError {
public:
  using DomainError::DomainError;
};

class UnknownPreset : public DomainError {
public:
  explicit UnknownPreset(const std::string& name)
      : DomainError("preset", "unknown figure preset '" + name + "'") {}
};

class TooShort : public DomainError {
public:
  using DomainError::DomainError;
};

class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class SingularDecoupling : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class NoConvergence : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class EigenFailure : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class NotHurwitz : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class IllConditioned : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class NonPhysical : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class StepSizeUnderflow : public NumericalError {
public:
  StepSizeUnderflow(double t_reached, const std::string& what)
      : NumericalError(what), t_reached_(t_reached) {}
  double t_reached() const noexcept { return t_reached_; }

private:
  double t_reached_;
};

}  // namespace ptomech
