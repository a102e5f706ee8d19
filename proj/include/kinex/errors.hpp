#pragma once

#include <stdexcept>
#include <string>

namespace kinex {

// Invalid user-facing parameter (bad family bounds, lambda outside [0,1], ...).
class ParameterError : public std::invalid_argument {
public:
    explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

// Two distributions that must live on the same grid do not.
class GridMismatchError : public std::invalid_argument {
public:
    explicit GridMismatchError(const std::string& what) : std::invalid_argument(what) {}
};

// Input is valid but the requested quantity is undefined for it
// (zero mean, identical pair in a ratio, ...).
class DegenerateInputError : public std::domain_error {
public:
    explicit DegenerateInputError(const std::string& what) : std::domain_error(what) {}
};

} // namespace kinex
