#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace dmimo {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition violated by a caller (bad shape, odd grid size, non-finite input, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Configuration could not be parsed or failed validation.
///
/// `field_path` is the dotted path of the offending key (e.g. `schedule.k_prime`);
/// `line`/`column` are 1-based and zero when the error is semantic rather than syntactic.
class ConfigError : public Error {
 public:
  ConfigError(std::string message, std::string field_path, int line = 0, int column = 0)
      : Error(format(message, field_path, line, column)),
        field_path_(std::move(field_path)),
        line_(line),
        column_(column) {}

  const std::string& field_path() const { return field_path_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  static std::string format(const std::string& message, const std::string& path, int line,
                            int column) {
    std::string out;
    if (line > 0) out += "line " + std::to_string(line) + ", column " + std::to_string(column) + ": ";
    if (!path.empty()) out += path + ": ";
    return out + message;
  }

  std::string field_path_;
  int line_;
  int column_;
};

/// A file could not be read or written; `path` names it.
class IoError : public Error {
 public:
  IoError(const std::string& message, std::string path)
      : Error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Numerical infeasibility: ill-conditioned or singular matrices, unlocalizable geometry.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A symmetric matrix exceeded the conditioning limit of the inversion policy.
class ConditioningError : public NumericalError {
 public:
  ConditioningError(const std::string& what, double condition, Eigen::VectorXd null_direction)
      : NumericalError(what), condition_(condition), null_direction_(std::move(null_direction)) {}

  double condition() const { return condition_; }
  /// Unit eigenvector of the smallest eigenvalue.
  const Eigen::VectorXd& null_direction() const { return null_direction_; }

 private:
  double condition_;
  Eigen::VectorXd null_direction_;
};

/// Azimuth is unobservable when the elevation is within the pole tolerance of 0 or pi.
class SingularAzimuthError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace dmimo
