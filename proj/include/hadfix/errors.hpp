#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace hadfix {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operands live in different model spaces. `factor()` names the offending
/// chain position when the mismatch was found while assembling a chain.
class SpaceMismatch : public Error {
public:
    explicit SpaceMismatch(const std::string& what, std::optional<std::size_t> factor = std::nullopt)
        : Error(factor ? what + " (factor " + std::to_string(*factor) + ")" : what), factor_(factor) {}

    std::optional<std::size_t> factor() const noexcept { return factor_; }

private:
    std::optional<std::size_t> factor_;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class NoConvergence : public Error {
public:
    using Error::Error;
};

class EmptyInput : public Error {
public:
    using Error::Error;
};

/// A point handed to a verification check as a fixed point is not one.
class BadFixedPoint : public Error {
public:
    using Error::Error;
};

/// Problem-file decoding failure; `path()` is a JSON pointer-like field path.
class ParseError : public Error {
public:
    ParseError(std::string path, const std::string& what)
        : Error(path + ": " + what), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace hadfix
