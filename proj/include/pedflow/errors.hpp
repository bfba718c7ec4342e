#pragma once

#include <stdexcept>
#include <string>

namespace pedflow {

/// Invalid scenario, parameters or grid/field shapes. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Geometric query outside the walkable set.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure during a run (blow-up, negative density). Maps to exit code 3.
class RuntimeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pedflow
