#pragma once

#include <stdexcept>
#include <string>

namespace csvm {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad parameter or configuration value; the CLI maps this to exit code 2.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Malformed data encountered at runtime (shape mismatch, non-finite values).
class InvalidInput : public Error {
public:
    using Error::Error;
};

// Kernel/window does not fit the input it is applied to.
class InvalidGeometry : public Error {
public:
    using Error::Error;
};

// Image file could not be read or decoded.
class DecodeError : public Error {
public:
    using Error::Error;
};

// A training or evaluation set contains only one class.
class DegenerateLabels : public Error {
public:
    using Error::Error;
};

// Dataset directory layout, split file, or model file is inconsistent.
class DataError : public Error {
public:
    using Error::Error;
};

} // namespace csvm
