#pragma once

#include <stdexcept>
#include <string>

namespace bsphere {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid numeric parameter (bad grid size, nonpositive duration, empty window...).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// An argument violates a structural contract (e.g. a lifetime path that is not an excursion).
class ContractError : public Error {
public:
    using Error::Error;
};

/// A computation ran out of budget (horizon, rejection floor, refinement cap).
class ResourceError : public Error {
public:
    using Error::Error;
};

class CorruptFileError : public Error {
public:
    using Error::Error;
};

class UnsupportedVersionError : public Error {
public:
    using Error::Error;
};

/// An output location cannot be created or written.
class OutputError : public Error {
public:
    using Error::Error;
};

class QuadratureError : public Error {
public:
    QuadratureError(const std::string& what, double achieved)
        : Error(what), achieved_tolerance(achieved) {}
    double achieved_tolerance;
};

} // namespace bsphere
