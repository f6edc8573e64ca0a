#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace refcalib {

// Coarse classification used by the command line to pick an exit code.
enum class ErrorCategory {
  kInput,             // malformed or inconsistent user input
  kInsufficientData,  // well-formed input that cannot support a solution
  kNumerical,         // solver breakdown
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what)
      : Error(ErrorCategory::kInput, what) {}
};

class NonPositiveDepth : public Error {
 public:
  explicit NonPositiveDepth(double z)
      : Error(ErrorCategory::kNumerical,
              "point has non-positive depth z=" + std::to_string(z)),
        depth_(z) {}
  double depth() const noexcept { return depth_; }

 private:
  double depth_;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t expected, std::size_t got)
      : Error(ErrorCategory::kInput,
              "dimension mismatch: expected " + std::to_string(expected) +
                  ", got " + std::to_string(got)) {}
};

class JointLimitViolation : public Error {
 public:
  JointLimitViolation(std::size_t joint, double value, double lo, double hi)
      : Error(ErrorCategory::kInput,
              "joint " + std::to_string(joint) + " value " +
                  std::to_string(value) + " outside [" + std::to_string(lo) +
                  ", " + std::to_string(hi) + "]"),
        joint_(joint),
        value_(value),
        lo_(lo),
        hi_(hi) {}
  std::size_t joint() const noexcept { return joint_; }
  double value() const noexcept { return value_; }
  double lower() const noexcept { return lo_; }
  double upper() const noexcept { return hi_; }

 private:
  std::size_t joint_;
  double value_, lo_, hi_;
};

class EmptyInput : public Error {
 public:
  explicit EmptyInput(const std::string& what)
      : Error(ErrorCategory::kInput, what) {}
};

class NumericalFailure : public Error {
 public:
  explicit NumericalFailure(const std::string& what)
      : Error(ErrorCategory::kNumerical, what) {}
};

class DivergedBehindCamera : public Error {
 public:
  explicit DivergedBehindCamera(const std::string& what)
      : Error(ErrorCategory::kNumerical, what) {}
};

class TooFewPairs : public Error {
 public:
  TooFewPairs(std::size_t found, std::size_t required)
      : Error(ErrorCategory::kInsufficientData,
              "too few usable frame pairs: " + std::to_string(found) +
                  " < " + std::to_string(required) +
                  " (record more synchronized motion)"),
        found_(found),
        required_(required) {}
  std::size_t found() const noexcept { return found_; }
  std::size_t required() const noexcept { return required_; }

 private:
  std::size_t found_, required_;
};

class InsufficientMotion : public Error {
 public:
  explicit InsufficientMotion(const std::string& what)
      : Error(ErrorCategory::kInsufficientData, what) {}
};

class UnreachableView : public Error {
 public:
  explicit UnreachableView(const std::string& what)
      : Error(ErrorCategory::kInsufficientData, what) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, std::size_t column,
             const std::string& what)
      : Error(ErrorCategory::kInput, source + ":" + std::to_string(line) +
                                         ":" + std::to_string(column) + ": " +
                                         what),
        line_(line),
        column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_, column_;
};

class NonMonotoneFrames : public Error {
 public:
  NonMonotoneFrames(const std::string& source, std::size_t line)
      : Error(ErrorCategory::kInput,
              source + ":" + std::to_string(line) +
                  ": frame index not strictly increasing"),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class SchemaMismatch : public Error {
 public:
  explicit SchemaMismatch(const std::string& what)
      : Error(ErrorCategory::kInput, what) {}
};

}  // namespace refcalib
