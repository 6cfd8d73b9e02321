#pragma once

#include <stdexcept>
#include <string>

namespace testinv {

// Base class of every error thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Structurally invalid input: bad dimensions, bad subgroups, malformed files.
struct ValidationError : Error {
    using Error::Error;
};

struct DimensionMismatch : ValidationError {
    using ValidationError::ValidationError;
};

struct NotSublattice : ValidationError {
    using ValidationError::ValidationError;
};

struct InvalidSubgroup : ValidationError {
    using ValidationError::ValidationError;
};

struct NotFundamental : ValidationError {
    using ValidationError::ValidationError;
};

struct SquareInput : ValidationError {
    using ValidationError::ValidationError;
};

struct NotAlternating : ValidationError {
    using ValidationError::ValidationError;
};

struct TrivialSubrepresentation : ValidationError {
    using ValidationError::ValidationError;
};

struct ParseError : ValidationError {
    using ValidationError::ValidationError;
};

// The requested computation falls outside the supported torus / character /
// class-number families.
struct Unsupported : Error {
    using Error::Error;
};

struct UnsupportedField : Unsupported {
    using Unsupported::Unsupported;
};

struct UnsupportedCharacter : Unsupported {
    using Unsupported::Unsupported;
};

// A stabilization loop ran past its precision cap without two consecutive
// precisions agreeing.
struct PrecisionNotStabilized : Error {
    using Error::Error;
};

} // namespace testinv
