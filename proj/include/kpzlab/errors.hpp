#pragma once

#include <stdexcept>
#include <string>

namespace kpz {

// Argument outside the domain of a closed-form map (negative radicand,
// alpha <= 1/2, pole of a formula, ...).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Moment order below n* = -(1-c)/24.
struct MomentOutOfRange : DomainError {
    using DomainError::DomainError;
};

struct RangeError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

// A model selector that admits more than one universality class.
struct AmbiguityError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InsufficientDataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConvexityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Cluster touches the field edge; the sample should be discarded.
struct OpenClusterError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace kpz
