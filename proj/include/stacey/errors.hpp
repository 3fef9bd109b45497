#pragma once

#include <stdexcept>
#include <string>

namespace stacey {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-finite entry in a vector argument or result.
struct InvalidVectorError : Error {
    using Error::Error;
};

// Operation not defined for the requested exponent (e.g. mirror map at p=inf).
struct UnsupportedExponentError : Error {
    using Error::Error;
};

struct DimMismatchError : Error {
    using Error::Error;
};

// An iterate left the representable region (non-finite or |theta_i| > 1e12).
struct DivergenceError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace stacey
