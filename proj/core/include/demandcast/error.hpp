#pragma once

#include <stdexcept>
#include <string>

namespace demandcast {

/// Broad failure classes. The CLI maps each one to a distinct exit code.
enum class ErrorKind {
    InvalidArgument,    // caller violated a precondition (bad spec, bad option)
    Input,              // unreadable or malformed input data
    InsufficientData,   // series too short, too many gaps, degenerate split
    Numerical,          // singular system, non-finite likelihood, no convergence
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& what) : Error(ErrorKind::InvalidArgument, what) {}
};

class InputError : public Error {
public:
    explicit InputError(const std::string& what) : Error(ErrorKind::Input, what) {}
};

class InsufficientData : public Error {
public:
    explicit InsufficientData(const std::string& what) : Error(ErrorKind::InsufficientData, what) {}
};

class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};

const char* to_string(ErrorKind kind) noexcept;

/// Throws the exception class matching `kind`.
[[noreturn]] void throw_error(ErrorKind kind, const std::string& what);

}  // namespace demandcast
