#pragma once

#include <stdexcept>
#include <string>

namespace chainlab {

/// Raised when a numerical procedure cannot deliver a trustworthy answer
/// (singular matrix, failed root solve, step-size underflow, energy drift).
/// Precondition violations use std::invalid_argument instead.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace chainlab
