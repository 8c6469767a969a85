#pragma once

#include <stdexcept>
#include <string>

namespace lagcarma {

// A user-supplied function returned a non-finite value at a quadrature node.
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(const std::string& what, double node)
      : std::runtime_error(what), node_(node) {}
  double node() const noexcept { return node_; }

 private:
  double node_;
};

// A derived object (discrete mixing, atom set) could not be built.
class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the convergence domain of a moment/cumulant generating function.
class DomainError : public std::domain_error {
 public:
  DomainError(const std::string& what, double value)
      : std::domain_error(what), value_(value) {}
  double value() const noexcept { return value_; }

 private:
  double value_;
};

// Exact enumeration would exceed the configured atom cap.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Internal invariant broken (e.g. EM likelihood decreased); indicates a bug.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Malformed input file; line() is 1-based, 0 when not tied to a line.
class DataError : public std::runtime_error {
 public:
  DataError(const std::string& what, long line) : std::runtime_error(what), line_(line) {}
  long line() const noexcept { return line_; }

 private:
  long line_;
};

}  // namespace lagcarma
