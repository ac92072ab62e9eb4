#pragma once

#include <stdexcept>
#include <string>

namespace raman {

/// Invalid user-supplied configuration (CLI exit code 1).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure during a computation: NaN blow-up, evaluation at a
/// pole of the dressed Green's functions, solver divergence (CLI exit code 2).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace raman
