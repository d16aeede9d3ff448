#pragma once

#include <stdexcept>
#include <string>

namespace lcc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shape mismatch or malformed structure (bad indices, dangling references).
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration or argument values.
class SpecError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// A wiring step made the approximation worse although the identity wiring
/// was admissible.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// The exhaustive search refused to start because its work estimate exceeds
/// the configured cap.
class BudgetError : public Error {
 public:
  BudgetError(double estimate, double cap, const std::string& context = {});

  double estimate() const noexcept { return estimate_; }
  double cap() const noexcept { return cap_; }

 private:
  double estimate_;
  double cap_;
};

}  // namespace lcc
