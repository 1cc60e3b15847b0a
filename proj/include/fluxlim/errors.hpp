#pragma once

#include <stdexcept>
#include <string>

namespace fluxlim {

// Non-finite or otherwise malformed numeric input.
struct input_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Parameters violate a structural assumption; no admissible configuration exists.
struct infeasible_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A caller-side contract was not met (gates on validated parameters, admissible data, ...).
struct precondition_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad experiment configuration (unparseable file, out-of-range setting).
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace fluxlim
