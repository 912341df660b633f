#pragma once

#include <stdexcept>
#include <string>

namespace harmcalc {

/// Raised when a model, query or config violates a documented contract.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when an exact enumeration would exceed the supported state-space bound.
class CapacityError : public std::runtime_error {
public:
    explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace harmcalc
