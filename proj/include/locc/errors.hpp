#pragma once

#include <stdexcept>
#include <string>

namespace locc {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Tensor-product result would exceed the configured dimension cap.
struct DimensionLimitError : Error {
    using Error::Error;
};

// Shapes inconsistent with a dimension signature.
struct SignatureError : Error {
    using Error::Error;
};

// Zero vector (or similar) where a nonzero state is required.
struct DegenerateInputError : Error {
    using Error::Error;
};

// Index sets of a projective measurement do not partition the basis.
struct PartitionError : Error {
    using Error::Error;
};

// Measurement outcome eliminates every state of the set.
struct EmptyBranchError : Error {
    using Error::Error;
};

// Numerical search exhausted its budget without reaching the target.
struct SearchBudgetError : Error {
    using Error::Error;
};

// Unknown catalog or registry identifier.
struct NotFoundError : Error {
    using Error::Error;
};

// Caller violated a documented precondition.
struct PreconditionError : Error {
    using Error::Error;
};

}  // namespace locc
