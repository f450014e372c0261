#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ifsl {

// Input violated a documented invariant (bad matrix, mismatched grids, ...).
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Parameter outside the formula's domain (theta <= 1/2, nonpositive factor, ...).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Fixed-point iteration did not reach tol within max_iter.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double last_gap)
        : std::runtime_error(what), last_gap(last_gap) {}
    double last_gap;
};

// Mixing-time estimation: d(horizon) still above epsilon.
class NotMixedError : public std::runtime_error {
public:
    NotMixedError(const std::string& what, std::vector<double> d_curve)
        : std::runtime_error(what), d_curve(std::move(d_curve)) {}
    std::vector<double> d_curve;
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace ifsl
