#pragma once

#include <stdexcept>
#include <string>

namespace scamdyn {

/// Broad failure classes. The CLI maps each one onto a stable exit code.
enum class ErrorCategory {
  InvalidArgument,
  Model,
  Simulation,
  Data,
  Inference,
  Config,
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
      : Error(ErrorCategory::InvalidArgument, what) {}
};

// model

class DegenerateDenominator : public Error {
 public:
  explicit DegenerateDenominator(const std::string& what)
      : Error(ErrorCategory::Model, what) {}
};

class SingularV : public Error {
 public:
  explicit SingularV(const std::string& what)
      : Error(ErrorCategory::Model, what) {}
};

class NonPositiveComponent : public Error {
 public:
  explicit NonPositiveComponent(const std::string& what)
      : Error(ErrorCategory::Model, what) {}
};

// integrators

class NonFiniteState : public Error {
 public:
  NonFiniteState(const std::string& what, double time)
      : Error(ErrorCategory::Simulation, what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

// inference / sensitivity

class EmptyChain : public Error {
 public:
  explicit EmptyChain(const std::string& what)
      : Error(ErrorCategory::Inference, what) {}
};

class InvalidRange : public Error {
 public:
  explicit InvalidRange(const std::string& what)
      : Error(ErrorCategory::InvalidArgument, what) {}
};

class HorizonExceedsTrajectory : public Error {
 public:
  explicit HorizonExceedsTrajectory(const std::string& what)
      : Error(ErrorCategory::Simulation, what) {}
};

class DegenerateDesign : public Error {
 public:
  explicit DegenerateDesign(const std::string& what)
      : Error(ErrorCategory::InvalidArgument, what) {}
};

// data

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& reason)
      : Error(ErrorCategory::Data,
              "line " + std::to_string(line) + ": " + reason),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class GapError : public Error {
 public:
  explicit GapError(const std::string& month)
      : Error(ErrorCategory::Data, "missing month " + month), month_(month) {}
  const std::string& month() const noexcept { return month_; }

 private:
  std::string month_;
};

class DuplicateError : public Error {
 public:
  DuplicateError(const std::string& month, const std::string& province)
      : Error(ErrorCategory::Data,
              "duplicate row for " + province + " in " + month),
        month_(month),
        province_(province) {}
  const std::string& month() const noexcept { return month_; }
  const std::string& province() const noexcept { return province_; }

 private:
  std::string month_;
  std::string province_;
};

class GridMismatch : public Error {
 public:
  explicit GridMismatch(const std::string& what)
      : Error(ErrorCategory::Data, what) {}
};

// cli

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorCategory::Config, what) {}
};

}  // namespace scamdyn
