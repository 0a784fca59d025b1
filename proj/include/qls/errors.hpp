#pragma once

#include <stdexcept>
#include <string>

namespace qls {

/// Input outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Caller misuse (mismatched grids, invalid configuration objects).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Adaptive integration could not continue (step size underflow).
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double r, double v, double dv)
      : std::runtime_error(what), r_(r), v_(v), dv_(dv) {}
  double r() const { return r_; }
  double v() const { return v_; }
  double dv() const { return dv_; }

 private:
  double r_, v_, dv_;
};

/// Integration horizon too short to classify a trajectory.
class UndecidedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Amplitude scan found no Crossing / non-Crossing pair.
class BracketError : public std::runtime_error {
 public:
  BracketError(const std::string& what, double lo, double hi)
      : std::runtime_error(what), lo_(lo), hi_(hi) {}
  double scanned_min() const { return lo_; }
  double scanned_max() const { return hi_; }

 private:
  double lo_, hi_;
};

/// Penalization still active at a converged critical point.
class PenalizationActive : public std::runtime_error {
 public:
  PenalizationActive(const std::string& what, double q)
      : std::runtime_error(what), q_(q) {}
  double q_value() const { return q_; }

 private:
  double q_;
};

/// Invalid run configuration (schema, ranges, assumptions at load time).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qls
