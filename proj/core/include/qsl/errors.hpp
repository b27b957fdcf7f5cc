#pragma once

#include <stdexcept>
#include <string>

namespace qsl {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Cubic roots too close for the partial-fraction amplitude; callers fall back
/// to the kernel integrator.
class NearDegenerateRoots : public Error {
public:
    using Error::Error;
};

class StepSizeUnderflow : public Error {
public:
    using Error::Error;
};

/// Discrete-bath state norm left the unit sphere beyond tolerance.
class NormDrift : public Error {
public:
    using Error::Error;
};

class QuadratureFailure : public Error {
public:
    using Error::Error;
};

/// Evolution rates vanish while the state has moved: the trajectory is
/// internally inconsistent.
class Infeasible : public Error {
public:
    using Error::Error;
};

class ToleranceExceeded : public Error {
public:
    using Error::Error;
};

}  // namespace qsl
