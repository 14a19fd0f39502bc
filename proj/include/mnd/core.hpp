#pragma once

// Shared aliases, tolerances and error types used across the library.

#include <complex>
#include <stdexcept>
#include <string>
#include <cmath>

namespace mnd {

using cplx = std::complex<double>;

namespace defaults {
// Radius used to merge nearby roots into one cluster.  Chosen to sit well
// above polished-root noise (~1e-15 for simple roots, ~1e-8 for double roots)
// and well below geometric feature separation at unit scale.
inline constexpr double cluster_tol = 1e-7;
// Residual target for root finding, relative to the coefficient scale.
inline constexpr double root_tol = 1e-12;
// Newton corrector target while tracking, relative to coefficient scale.
inline constexpr double tracker_tol = 1e-11;
// Generic "is this value numerically zero" floor for validation residuals.
inline constexpr double residual_tol = 1e-9;
// Coefficients below this fraction of the largest one are dropped when a
// polynomial is normalized.
inline constexpr double coeff_floor = 1e-13;
// Tolerance for projective point equality (after normalization).
inline constexpr double point_eq_tol = 1e-9;
// Entry tolerance for the planar-point test on the second fundamental form.
inline constexpr double planar_tol = 1e-7;
}  // namespace defaults

// Contract violation: the caller handed us input the operation does not
// accept (wrong dimensions, point on the surface, degree too small, ...).
struct contract_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Numerical failure: the input was acceptable but iteration did not reach
// the requested tolerance (root finding stalled, tracking step underflow,
// interpolation residual too large, retry budget exhausted).
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline bool nearly_zero(double v, double scale, double tol) {
    return std::abs(v) <= tol * std::max(1.0, scale);
}

}  // namespace mnd
