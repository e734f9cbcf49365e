#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace geogs {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller supplied data that violates an operation's preconditions.
class InputError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration value or unsupported option.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Operation invoked on an object of the wrong kind (e.g. a Free splat where a Thin one is required).
class ContractError : public Error {
public:
    using Error::Error;
};

/// Filesystem failure.
class IoError : public Error {
public:
    using Error::Error;
};

/// Non-finite values detected during optimization.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Malformed file content. Carries the byte offset where parsing failed.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t byte_offset)
        : Error(message + " (at byte " + std::to_string(byte_offset) + ")"), offset_(byte_offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

}  // namespace geogs
