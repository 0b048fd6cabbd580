#pragma once

#include <stdexcept>
#include <string>

namespace sccd {

/// Malformed input file (message carries the file and line number).
struct parse_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Incompatible shapes between matrices, graphs, or label vectors.
struct dimension_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid configuration value, unknown key, or unsupported option.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Violated API contract (e.g. backward() on a non-scalar).
struct contract_error : std::logic_error {
  using std::logic_error::logic_error;
};

/// Runtime failure during optimization (NaN gradients, diverged loss).
struct training_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Input that is structurally valid but unusable (e.g. single-class split).
struct degenerate_input_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace sccd
