// SPDX-License-Identifier: MIT
#pragma once

#include <stdexcept>
#include <string>

namespace parity_bounds {

// Malformed problem descriptions: bad parameters, bad JSON, unknown families.
class spec_error : public std::runtime_error {
public:
    explicit spec_error(const std::string& what) : std::runtime_error(what) {}
};

// Dimension or problem-size limits exceeded (pattern enumeration, LP guards).
class size_error : public std::runtime_error {
public:
    explicit size_error(const std::string& what) : std::runtime_error(what) {}
};

// A quantity could not be evaluated at the requested point, e.g. a sign bias
// where both branch densities vanish on the support interior.
class evaluation_error : public std::runtime_error {
public:
    explicit evaluation_error(const std::string& what) : std::runtime_error(what) {}
};

// Adaptive quadrature failed to reach the requested tolerance. Carries the
// partial value and the error estimate at the point of failure.
class accuracy_error : public std::runtime_error {
public:
    accuracy_error(const std::string& what, double partial_value, double error_estimate)
        : std::runtime_error(what), partial_value(partial_value),
          error_estimate(error_estimate) {}

    double partial_value;
    double error_estimate;
};

}  // namespace parity_bounds
