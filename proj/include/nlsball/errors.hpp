#pragma once

#include <stdexcept>
#include <string>

namespace nlsball {

/// A trajectory left the representable range (non-finite values, exponential overflow).
class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A configuration or argument violates a documented invariant.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A computation would exceed its combinatorial or iteration budget.
class BudgetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A fixed-point iteration stopped contracting; the time window is too large.
class NonContractionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace nlsball
