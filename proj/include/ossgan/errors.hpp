#pragma once

#include <stdexcept>
#include <string>

namespace ossgan {

// Bad user-supplied values (flags, ratios, malformed vectors). CLI exit code 2.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Wiring problems: dimension mismatches, incompatible method/model combos. Exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Broken or inconsistent datasets, manifests, checkpoints. Exit code 3.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical aborts: NaN losses, degenerate covariances. Exit code 4.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace ossgan
