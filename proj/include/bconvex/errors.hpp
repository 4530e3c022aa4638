#pragma once

#include <stdexcept>
#include <string>

namespace bconvex {

/// Point outside the closed domain it is required to lie in.
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A momentum has no product preimage: the Newton inversion left the product
/// domain or failed to converge (inadmissible momentum, or a B1/B2 failure).
struct NoPreimage : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Problem rejected before solving (cost not uniformly b*-convex, bad density, ...).
struct AdmissibilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A claimed b-support exceeds the function somewhere on the check grid.
struct SupportViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Operation requires a specific benefit family.
struct FamilyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// kink_scan found no nonparticipation boundary (menu is null-only or null-free).
struct NoBoundary : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// trial_function requires a positive support gap.
struct HNonPositive : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad or unknown key in a problem config.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed arithmetic expression.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace bconvex
