#pragma once

#include <stdexcept>
#include <string>

namespace fsm {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inconsistent or invalid inputs (mismatched bases, bad parameters, malformed files).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A resolvent (-Delta - lambda)^{-1} was requested at one of its poles.
class SingularResolventError : public Error {
 public:
  using Error::Error;
};

// lambda left the half-line on which the effective operators are defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Dense solve against a (near-)singular shifted operator.
class NearSingularError : public Error {
 public:
  NearSingularError(const std::string& what, double smallest_eigenvalue)
      : Error(what), smallest_eigenvalue_(smallest_eigenvalue) {}
  double smallest_eigenvalue() const noexcept { return smallest_eigenvalue_; }

 private:
  double smallest_eigenvalue_;
};

// A precondition on a numerical object does not hold (e.g. non-Hermitian input).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class AlignmentError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

}  // namespace fsm
