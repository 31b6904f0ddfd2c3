#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace scrollbin {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input data could not be used: malformed files, mismatched shapes, violated
/// preconditions. The CLI maps all of these to exit code 2.
class DataError : public Error {
public:
    using Error::Error;
};

class DecodeError : public DataError {
public:
    DecodeError(const std::string& what, std::size_t offset)
        : DataError(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class ShapeError : public DataError {
public:
    using DataError::DataError;
};

class PreconditionError : public DataError {
public:
    using DataError::DataError;
};

class IoError : public DataError {
public:
    using DataError::DataError;
};

// Weight file failures.
class FormatError : public DataError {
public:
    using DataError::DataError;
};

class VersionError : public FormatError {
public:
    using FormatError::FormatError;
};

class TruncatedError : public FormatError {
public:
    using FormatError::FormatError;
};

class DimensionOverflowError : public FormatError {
public:
    using FormatError::FormatError;
};

}  // namespace scrollbin
