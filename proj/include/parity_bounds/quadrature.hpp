// SPDX-License-Identifier: MIT
#pragma once

#include <functional>

namespace parity_bounds {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int evaluations = 0;
    bool converged = true;
};

// Adaptive 15-node Gauss-Legendre quadrature of f over [a,b]. A panel is
// accepted when |GL15(panel) - GL15(halves)| <= abs_tol * width / (b - a),
// otherwise it is bisected; accepted panels contribute the refined value.
// Nodes are strictly interior, so integrable endpoint growth is tolerated.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b, double abs_tol,
                                    int max_panels = 50000);

// Single 15-node Gauss-Legendre panel (no error estimate).
double gauss_legendre_15(const std::function<double(double)>& f, double a, double b);

}  // namespace parity_bounds
