#pragma once

#include <stdexcept>
#include <string>

namespace rotascope {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Descriptor or argument outside the mathematical domain (e.g. a lift that
/// is not a diffeomorphism).
class DomainError : public Error {
public:
    using Error::Error;
};

class NonConvergence : public Error {
public:
    using Error::Error;
};

/// Requested iteration count or denominator exceeds the configured cap.
class CapExceeded : public Error {
public:
    using Error::Error;
};

class DegenerateInput : public Error {
public:
    using Error::Error;
};

class RangeError : public Error {
public:
    using Error::Error;
};

/// The rotation-number comparison could not be decided at the q-cap.
class Unresolvable : public Error {
public:
    using Error::Error;
};

/// A disjointness or containment certificate failed beyond tolerance.
class CombinatoricsViolation : public Error {
public:
    using Error::Error;
};

class PreconditionFailed : public Error {
public:
    using Error::Error;
};

/// Orbit order disagrees with rotation order when building a conjugacy.
class OrderMismatch : public Error {
public:
    using Error::Error;
};

}  // namespace rotascope
