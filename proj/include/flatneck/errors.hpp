#pragma once

#include <stdexcept>
#include <string>

namespace flatneck {

// Linear-solver failures (singular or ill-conditioned systems, residual
// above tolerance). Carries whatever conditioning diagnostic is available.
struct SolverError : std::runtime_error {
  explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace flatneck
