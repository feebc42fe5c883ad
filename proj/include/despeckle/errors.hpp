#pragma once

#include <stdexcept>
#include <string>

namespace despeckle {

/// Design matrix too close to singular at an evaluation point. Callers
/// should enlarge the bandwidth; the weights are never regularized.
class SingularDesign : public std::runtime_error {
public:
    SingularDesign(double x, double min_eigenvalue)
        : std::runtime_error("singular design matrix at x=" + std::to_string(x) +
                             " (min eigenvalue " + std::to_string(min_eigenvalue) + ")"),
          x_(x),
          min_eigenvalue_(min_eigenvalue) {}

    double x() const { return x_; }
    double min_eigenvalue() const { return min_eigenvalue_; }

private:
    double x_;
    double min_eigenvalue_;
};

/// Parameters outside the formula's domain (e.g. log of a value <= 1).
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Randomized packing search ran out of its candidate budget.
class SearchExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed CSV input.
class CsvError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace despeckle
