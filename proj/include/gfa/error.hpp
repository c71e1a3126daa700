#pragma once

#include <stdexcept>
#include <string>

namespace gfa {

/// Invalid arguments, shapes or configuration. Maps to CLI exit code 2.
class UsageError : public std::invalid_argument {
public:
    explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

/// Missing, unreadable or malformed files. Maps to CLI exit code 1.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Non-finite values, failed Cholesky factorizations and similar
/// corruption of the variational state. Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gfa
