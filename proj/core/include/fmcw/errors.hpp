#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace fmcw {

/// Base class for every recoverable failure raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed scenario document. `position()` is a byte offset into the input
/// when the failure is syntactic, otherwise 0.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t position = 0)
        : Error(what), position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

class ValidationError : public Error {
public:
    ValidationError(const std::string& what, std::vector<std::string> messages)
        : Error(what), messages_(std::move(messages)) {}

    const std::vector<std::string>& messages() const noexcept { return messages_; }

private:
    std::vector<std::string> messages_;
};

/// A pipeline stage was requested without the outputs it consumes.
class DependencyError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace fmcw
