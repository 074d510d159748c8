#pragma once

#include <stdexcept>
#include <string>

namespace vharv {

/// Bad user input: parameter out of range, malformed config, dimension mismatch.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical algorithm failure: infeasible program, Riccati without stabilizing
/// solution, fixed point not found.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// A simulated state left the sanity envelope.
class NumericalBlowup : public std::runtime_error {
 public:
  explicit NumericalBlowup(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace vharv
