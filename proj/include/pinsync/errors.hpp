#pragma once

#include <stdexcept>
#include <string>

namespace pinsync {

// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidSize : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

// A documented precondition of the callee was violated by the caller.
class ContractViolation : public Error {
public:
    using Error::Error;
};

class NumericalFailure : public Error {
public:
    using Error::Error;
};

// An analytic gain bound is requested outside the region where it exists.
class BoundUndefined : public Error {
public:
    using Error::Error;
};

class InvalidDomain : public Error {
public:
    using Error::Error;
};

// The stability region of a mode family does not have the assumed
// left-unbounded shape, so no threshold can be reported.
class RegionShapeError : public Error {
public:
    using Error::Error;
};

class ScenarioDefinitionError : public Error {
public:
    using Error::Error;
};

class ComparisonDefinitionError : public Error {
public:
    using Error::Error;
};

class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, double time)
        : Error(what), time_(time) {}

    // Simulation time of the first non-finite state.
    double time() const noexcept { return time_; }

private:
    double time_;
};

}  // namespace pinsync
