#pragma once

#include <stdexcept>
#include <string>

namespace geofuzz {

    class Error : public std::runtime_error {
    public:
        using std::runtime_error::runtime_error;
    };

    /// Invalid configuration or generator parameters.
    class ParameterError : public Error {
    public:
        using Error::Error;
    };

    /// Input vector does not fit the program (length or alphabet).
    class InputError : public Error {
    public:
        using Error::Error;
    };

    /// Graph-shape violation: zero out-degree, unreachable vertex, ...
    class StructuralError : public Error {
    public:
        using Error::Error;
    };

    /// A linear solve failed or produced a non-finite result.
    class NumericalError : public Error {
    public:
        using Error::Error;
    };

    /// Operation called on a state that cannot support it (e.g. empty archive).
    class StateError : public Error {
    public:
        using Error::Error;
    };

    /// Inconsistent records in a results file.
    class DataError : public Error {
    public:
        using Error::Error;
    };

    class IoError : public Error {
    public:
        using Error::Error;
    };

} // namespace geofuzz
