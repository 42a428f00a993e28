#pragma once

#include <stdexcept>
#include <string>

namespace modspace {

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DisconnectedError : Error {
    using Error::Error;
};
struct EmptyBallError : Error {
    using Error::Error;
};
struct DimensionMismatchError : Error {
    using Error::Error;
};
struct MeshTooCoarseError : Error {
    using Error::Error;
};
struct MissingEdgeDensityError : Error {
    using Error::Error;
};
struct EmptyFamilyError : Error {
    using Error::Error;
};
struct NoPathError : Error {
    using Error::Error;
};
struct NonconvergenceError : Error {
    using Error::Error;
};
struct TooLargeError : Error {
    using Error::Error;
};
struct ZeroLengthError : Error {
    using Error::Error;
};
struct TooFewPointsError : Error {
    using Error::Error;
};
struct IsolatedPointError : Error {
    using Error::Error;
};
struct WrongGeneratorError : Error {
    using Error::Error;
};
struct DirectionViolationError : Error {
    using Error::Error;
};
struct DependentDirectionsError : Error {
    using Error::Error;
};
struct InvalidInputError : Error {
    using Error::Error;
};

}  // namespace modspace
