#pragma once

#include <stdexcept>
#include <string>

namespace cantorquant {

/// Bad caller input: invalid word, r outside (0, 1/3), wrong index-set size, ...
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A bisection bracket without a sign change.
class BracketError : public InputError {
public:
    using InputError::InputError;
};

/// Numeric non-convergence. Carries the best bound reached before giving up.
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& what, double achieved_bound)
        : std::runtime_error(what), achieved_bound_(achieved_bound) {}

    double achieved_bound() const noexcept { return achieved_bound_; }

private:
    double achieved_bound_;
};

/// r lies outside the range where the closed-form optimum is known.
class UnsupportedRange : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

} // namespace cantorquant
