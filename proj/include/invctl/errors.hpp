#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace invctl {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (e.g. negative order).
class DomainError : public Error {
public:
    using Error::Error;
};

/// The operation does not support this input variant (continuous demand in DP, ...).
class UnsupportedError : public Error {
public:
    using Error::Error;
};

/// Joint table or search space too large to enumerate.
class SizeError : public Error {
public:
    using Error::Error;
};

/// A policy table does not have the requested structure.
class StructureError : public Error {
public:
    using Error::Error;
};

class NotSectorBoundable : public Error {
public:
    using Error::Error;
};

class FitError : public Error {
public:
    using Error::Error;
};

/// Fit kind and policy family do not go together.
class MismatchError : public Error {
public:
    using Error::Error;
};

struct Issue {
    std::string path;
    std::string message;
};

/// All invariant violations found while validating a problem.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<Issue> issues);
    const std::vector<Issue>& issues() const noexcept { return issues_; }

private:
    std::vector<Issue> issues_;
};

} // namespace invctl
