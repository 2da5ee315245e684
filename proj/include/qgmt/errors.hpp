#pragma once

#include <stdexcept>
#include <string>

namespace qgmt {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input (dimension mismatch, unreadable file, ...).
struct input_error : error {
    using error::error;
};

/// A query that admits more than one answer at the requested tolerance.
struct ambiguity_error : error {
    using error::error;
};

/// A structural invariant of a value was found violated.
struct invariant_error : error {
    using error::error;
};

/// A chain or selection is not fine enough for the requested operation.
struct refinement_error : error {
    using error::error;
};

/// An iterative solver failed to converge.
struct solver_error : error {
    using error::error;
};

/// A smallness hypothesis required by a construction does not hold.
struct smallness_error : error {
    using error::error;
};

/// A fiber point escaped the tubular neighborhood.
struct thickness_error : error {
    using error::error;
};

} // namespace qgmt
