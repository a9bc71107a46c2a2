#pragma once

#include <stdexcept>
#include <string>

namespace blockdp {

// Invalid structural input: malformed queries, inconsistent dataset shapes,
// out-of-range windows. Thrown by constructors and validators.
struct SpecError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Invalid run configuration: bad JSON fields, incompatible mechanism/analyst
// combinations, parameter values outside their documented domains.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Raised when a closed-form population value does not exist for a query
// under the given population model. Callers fall back to Monte Carlo.
struct UnsupportedQueryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace blockdp
