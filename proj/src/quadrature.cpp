// SPDX-License-Identifier: MIT
#include "parity_bounds/quadrature.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace parity_bounds {

namespace {

// Abscissae and weights for the positive half of the 15-node rule on [-1,1];
// the node at 0 carries weight kGl15CenterWeight.
constexpr std::array<double, 7> kGl15Nodes = {
    0.2011940939974345, 0.3941513470775634, 0.5709721726085388,
    0.7244177313601700, 0.8482065834104272, 0.9372733924007059,
    0.9879925180204854};
constexpr std::array<double, 7> kGl15Weights = {
    0.1984314853271116, 0.1861610000155622, 0.1662692058169939,
    0.1395706779261543, 0.1071592204671719, 0.0703660474881081,
    0.0307532419961173};
constexpr double kGl15CenterWeight = 0.2025782419255613;

}  // namespace

double gauss_legendre_15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double acc = kGl15CenterWeight * f(c);
    for (int i = 0; i < 7; ++i) {
        const double dx = h * kGl15Nodes[i];
        acc += kGl15Weights[i] * (f(c + dx) + f(c - dx));
    }
    return acc * h;
}

QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b, double abs_tol,
                                    int max_panels) {
    QuadratureResult out;
    if (!(b > a)) return out;
    const double total_width = b - a;

    struct Panel {
        double lo, hi, coarse;
    };
    std::vector<Panel> stack;
    stack.push_back({a, b, gauss_legendre_15(f, a, b)});
    out.evaluations += 15;

    int panels_used = 1;
    while (!stack.empty()) {
        const Panel p = stack.back();
        stack.pop_back();
        const double mid = 0.5 * (p.lo + p.hi);
        const double left = gauss_legendre_15(f, p.lo, mid);
        const double right = gauss_legendre_15(f, mid, p.hi);
        out.evaluations += 30;
        const double refined = left + right;
        const double err = std::abs(p.coarse - refined);
        const double budget = abs_tol * (p.hi - p.lo) / total_width;
        const double width = p.hi - p.lo;
        if (err <= budget || width <= 1e-15 * total_width) {
            out.value += refined;
            out.error_estimate += err;
            continue;
        }
        if (panels_used >= max_panels) {
            out.value += refined;
            out.error_estimate += err;
            out.converged = false;
            continue;
        }
        panels_used += 2;
        stack.push_back({p.lo, mid, left});
        stack.push_back({mid, p.hi, right});
    }
    if (out.error_estimate > abs_tol) out.converged = false;
    return out;
}

}  // namespace parity_bounds
