#pragma once

#include <stdexcept>
#include <string>

namespace tw {

// Module errors. All carry a human-readable message with the offending values.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoTurningPoints : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConvergenceFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct QuadratureFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoInteriorMinimum : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ResolutionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct OverflowGuard : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoRoot : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct LeakageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct PlacementError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct StabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotSeparated : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct GridMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InsufficientData : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// A pinned pass/fail contract failed; maps to exit code 3 in the driver.
struct AcceptanceFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace tw
