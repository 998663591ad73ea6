#pragma once

#include <stdexcept>
#include <string>

namespace srf {

/// Usage or configuration error (bad arguments, malformed files, ...).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a serialized artifact fails validation (bad magic, truncation).
class FormatError : public Error {
public:
    using Error::Error;
};

}  // namespace srf
