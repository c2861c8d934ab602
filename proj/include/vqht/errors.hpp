#pragma once

#include <stdexcept>
#include <string>

namespace vqht {

// Base of every error raised by the library. Each subclass maps onto one
// failure category so callers (and the CLI exit-code logic) can branch on it.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Caller passed arguments that violate an operation's preconditions.
class UsageError : public Error {
public:
    using Error::Error;
};

// A value failed a physical-validity check (non-Hermitian state, non-unitary
// gate, incomplete Kraus set, ...). Nothing is silently repaired.
class ValidationError : public Error {
public:
    using Error::Error;
};

// A size guard was hit (e.g. total Hilbert-space dimension too large).
class ResourceError : public Error {
public:
    using Error::Error;
};

// Fock truncation lost more probability than the hard limit allows.
class CutoffError : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

class InternalError : public Error {
public:
    using Error::Error;
};

}  // namespace vqht
