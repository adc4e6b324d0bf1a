#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hjb {

// Parameter outside the admissible set (p <= 1, a <= 0, ...).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// Caller violated a documented precondition (grid too small, horizon too short, ...).
class PreconditionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class MatrixError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Newton converged, but to a root that violates a sign constraint.
class BranchError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InsufficientDataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class SolverError : public std::runtime_error {
public:
  SolverError(const std::string& what, double last_residual, int iterations,
              std::vector<double> trace = {});

  double last_residual() const noexcept { return last_residual_; }
  int iterations() const noexcept { return iterations_; }
  const std::vector<double>& trace() const noexcept { return trace_; }

private:
  double last_residual_;
  int iterations_;
  std::vector<double> trace_;
};

// Gradient or iterate blew up; a finer mesh usually helps.
class StiffnessError : public SolverError {
public:
  using SolverError::SolverError;
};

} // namespace hjb
