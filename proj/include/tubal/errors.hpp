#pragma once

#include <stdexcept>
#include <string>

namespace tubal {

// Bad shapes, out-of-range arguments, malformed specs.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Non-finite iterates, SVD/solve failures, symmetry violations.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A theoretical precondition (e.g. the t-RIC threshold) does not hold.
class ConditionError : public std::domain_error {
public:
    ConditionError(std::string condition, const std::string& what)
        : std::domain_error(what), condition_(std::move(condition)) {}

    const std::string& condition() const noexcept { return condition_; }

private:
    std::string condition_;
};

} // namespace tubal
