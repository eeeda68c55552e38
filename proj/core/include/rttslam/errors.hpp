#pragma once

#include <stdexcept>

namespace rttslam {

// Error categories mirror the CLI exit-status contract:
// ConfigError -> 2, InputError -> 3, SolverError -> 4.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace rttslam
