#pragma once

#include <stdexcept>
#include <string>

namespace qsr {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// File contents are malformed or truncated.
class FormatError : public Error {
public:
    using Error::Error;
};

/// File is well formed but uses a bit depth or color type we do not read.
class UnsupportedFormatError : public Error {
public:
    using Error::Error;
};

/// Operand shapes disagree (image sizes, channel counts, parameter sets).
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A value violates a documented invariant (mask density, parameter range).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Training or reconstruction produced a non-finite value.
class NumericError : public Error {
public:
    using Error::Error;
};

}  // namespace qsr
