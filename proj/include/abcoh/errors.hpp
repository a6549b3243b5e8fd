#pragma once

#include <stdexcept>
#include <string>

namespace abcoh {

// Base class for all domain errors raised by this library. The CLI maps
// subclasses below to exit code 2 (precondition violation); anything else
// (parse errors, I/O) exits 1.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Two objects attached to different group shapes were combined.
struct dimension_mismatch_error : error {
    using error::error;
};

// The measure is the Dirac mass at the trivial character (phi == 1),
// which every classifier excludes.
struct constant_function_error : error {
    using error::error;
};

// The trivial character touches the numerical support, so no smoothing
// measure with |1 - nu_hat| >= 1/2 on the support exists.
struct no_gap_error : error {
    using error::error;
};

// The support stays away from the trivial character; the shell construction
// does not apply (the coboundary solver does).
struct wrong_regime_error : error {
    using error::error;
};

// A requested group element falls outside a function's stored window.
struct window_too_small_error : error {
    using error::error;
};

// The grid cannot resolve as many dyadic shells as requested.
struct resolution_error : error {
    resolution_error(const std::string& what, int usable)
        : error(what), usable_shell_count(usable) {}
    int usable_shell_count;
};

// A stated operation precondition does not hold for the given input.
struct precondition_error : error {
    using error::error;
};

// Input claims to be positive definite / a measure but is numerically not.
struct inconsistent_input_error : error {
    using error::error;
};

}  // namespace abcoh
