// Error taxonomy used across the library.
#pragma once

#include <stdexcept>
#include <string>

namespace fcsl {

// Bad user-facing configuration (grid sizes, unknown model names, config files).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Mismatched array/grid sizes between arguments.
struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Time-step constraint violated at step time.
struct StabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A path produced NaN or left the admissible range.
struct DivergenceError : std::runtime_error {
    DivergenceError(const std::string& what, long step) : std::runtime_error(what), step_index(step) {}
    long step_index;
};

// Self-refinement of a quadrature failed to converge.
struct AccuracyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InsufficientDataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A check was invoked on a model it does not apply to.
struct NotApplicableError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PreconditionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Snapshot file failed CRC validation or was truncated.
struct CorruptionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Snapshot carries an unrecognized format version.
struct VersionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace fcsl
