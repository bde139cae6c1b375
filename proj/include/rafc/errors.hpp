#pragma once

#include <stdexcept>
#include <string>

namespace rafc {

/// Invalid or unparsable experiment configuration.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure inside a solver (singular step matrix, blow-up, ...).
class SolverError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A run directory lacks a file a command depends on.
class ArtifactError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace rafc
