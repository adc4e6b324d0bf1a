#include "hjb/core/errors.hpp"

#include <utility>

namespace hjb {

SolverError::SolverError(const std::string& what, double last_residual, int iterations,
                         std::vector<double> trace)
    : std::runtime_error(what),
      last_residual_(last_residual),
      iterations_(iterations),
      trace_(std::move(trace)) {}

} // namespace hjb
