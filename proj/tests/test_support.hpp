// SPDX-License-Identifier: MIT
#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "parity_bounds/marginal.hpp"

namespace pbt {

inline std::vector<double> unit_grid(int n, double margin = 1e-3) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i)
        g[i] = margin + (1.0 - 2.0 * margin) * i / (n - 1);
    return g;
}

// The analytic fixture set exercised across the marginal-law tests.
inline std::vector<parity_bounds::Marginal> fixture_marginals() {
    using parity_bounds::Marginal;
    return {
        Marginal::shifted_exponential(1.0, 0.3),
        Marginal::shifted_exponential(0.8, 0.15),
        Marginal::shifted_exponential(1.9, 0.2),
        Marginal::linear_density(0.4),
        Marginal::linear_density(-0.3),
        Marginal::normal(0.0, 1.0),
        Marginal::normal(0.674, 1.0),
        Marginal::normal(-1.2, 0.7),
        Marginal::uniform(0.0, 1.0),
        Marginal::uniform(-2.0, 1.0),
    };
}

// Piecewise-linear tabulation of the linear-density law on [-1, 1].
inline parity_bounds::Marginal tabulated_linear(double theta, int knots = 2001) {
    std::vector<double> x(knots), f(knots);
    for (int i = 0; i < knots; ++i) {
        x[i] = -1.0 + 2.0 * i / (knots - 1);
        f[i] = 0.5 * (1.0 + theta * x[i]);
    }
    return parity_bounds::Marginal::tabulated(std::move(x), std::move(f));
}

}  // namespace pbt
