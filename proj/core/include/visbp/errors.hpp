#pragma once

#include <stdexcept>
#include <string>

namespace visbp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Mismatched dimensions between matrices or vectors.
class StructuralError : public Error {
public:
    using Error::Error;
};

/// Bad caller input: oversize item, empty list, malformed file, unknown name.
class InputError : public Error {
public:
    using Error::Error;
};

/// A value was found that breaks a documented invariant.
class InvariantViolation : public Error {
public:
    using Error::Error;
};

/// No unused consumer is left to open.
class CapacityExhausted : public Error {
public:
    using Error::Error;
};

/// A lookup that requires a unique match found none.
class NotFound : public Error {
public:
    using Error::Error;
};

/// The latency model has no valid solution (consumer saturated during rebalance).
class ModelDegenerate : public Error {
public:
    using Error::Error;
};

/// The controller/consumer message protocol was broken in simulation.
class ProtocolViolation : public InvariantViolation {
public:
    using InvariantViolation::InvariantViolation;
};

}  // namespace visbp
