// SPDX-License-Identifier: MIT
#include "parity_bounds/bounds.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "parity_bounds/errors.hpp"
#include "parity_bounds/parallel.hpp"
#include "parity_bounds/quadrature.hpp"

namespace parity_bounds {

namespace {

constexpr double kSharpSlackTol = 1e-8;
constexpr double kLevelClip = 1e-12;
constexpr double kTailCut = 1.0;   // t at which the exponential substitution starts
constexpr double kTailMax = 75.0;  // integrable growth is negligible beyond this

std::vector<double> level_grid(std::span<const Marginal> marginals, int grid) {
    std::vector<double> levels;
    levels.reserve(grid + 200 * marginals.size());
    for (int j = 0; j < grid; ++j)
        levels.push_back((j + 0.5) / grid);
    // Breakpoint refinement: p_i jumps at the one-branch level and the sign
    // threshold marks the copula junction; sample both neighbourhoods densely.
    const double halfwidth = 2.0 / grid;
    for (const auto& m : marginals) {
        for (double b : {m.sign_threshold(), m.one_branch_level()}) {
            if (!(b > kLevelClip && b < 1.0 - kLevelClip)) continue;
            for (int k = 0; k < 65; ++k)
                levels.push_back(b - halfwidth + (2.0 * halfwidth * k) / 64.0);
            levels.push_back(b - 1e-9);
            levels.push_back(b + 1e-9);
        }
    }
    for (double e : {1e-8, 1e-6, 1.0 - 1e-6, 1.0 - 1e-8}) levels.push_back(e);
    std::erase_if(levels, [](double u) { return u <= kLevelClip || u >= 1.0 - kLevelClip; });
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    return levels;
}

FeasibilityReport scan_levels(std::span<const Marginal> marginals, Parity parity,
                              const std::vector<double>& levels, bool identical) {
    FeasibilityReport rep;
    rep.parity = parity;
    rep.grid_size = static_cast<int>(levels.size());

    const std::size_t d = marginals.size();
    std::vector<double> slack(levels.size());
    parallel_for(levels.size(), [&](std::size_t k) {
        const double u = levels[k];
        std::vector<double> p(d);
        if (identical) {
            const double v = marginals[0].sign_bias(u);
            std::fill(p.begin(), p.end(), v);
        } else {
            for (std::size_t i = 0; i < d; ++i) p[i] = marginals[i].sign_bias(u);
        }
        slack[k] = membership(p, parity).slack;
    });

    rep.worst_slack = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < levels.size(); ++k) {
        rep.worst_slack = std::min(rep.worst_slack, slack[k]);
        if (slack[k] < -kSharpSlackTol) rep.violating_levels.push_back(levels[k]);
    }
    rep.sharp = rep.violating_levels.empty();
    return rep;
}

}  // namespace

const char* shortcut_name(FeasibilityShortcut s) {
    switch (s) {
        case FeasibilityShortcut::iid_threshold: return "iid_threshold";
        case FeasibilityShortcut::skew_obstruction: return "skew_obstruction";
        default: return "none";
    }
}

nlohmann::json FeasibilityReport::to_json() const {
    nlohmann::json j;
    j["parity"] = parity_name(parity);
    j["grid_size"] = grid_size;
    j["worst_slack"] = worst_slack;
    j["verdict"] = sharp ? "sharp" : "not_sharp";
    j["shortcut"] = shortcut_name(shortcut);
    j["violating_count"] = violating_levels.size();
    auto arr = nlohmann::json::array();
    const std::size_t cap = std::min<std::size_t>(violating_levels.size(), 64);
    for (std::size_t k = 0; k < cap; ++k) arr.push_back(violating_levels[k]);
    j["violating_levels"] = std::move(arr);
    return j;
}

BoundResult universal_bound(std::span<const Marginal> marginals, double tol) {
    if (marginals.empty()) throw spec_error("universal_bound requires marginals");
    for (const auto& m : marginals) {
        const auto rep = m.check_assumptions(static_cast<int>(marginals.size()));
        if (std::abs(rep.density_integral - 1.0) > 1e-6)
            throw spec_error("marginal density does not integrate to 1");
        if (!rep.moment_converged)
            std::fprintf(stderr,
                         "parity_bounds: warning: E|X|^d quadrature error %.3e exceeds "
                         "1e-4 relative\n",
                         rep.moment_error_estimate);
    }

    auto integrand = [&](double u) {
        double prod = 1.0;
        for (const auto& m : marginals) prod *= m.abs_quantile(u);
        return prod;
    };
    bool unbounded = false;
    for (const auto& m : marginals) unbounded = unbounded || m.abs_unbounded();

    BoundResult out;
    if (!unbounded) {
        const auto q = integrate_adaptive(integrand, 0.0, 1.0, tol);
        out.value = q.value;
        out.abs_error_estimate = q.error_estimate;
        out.nodes_used = q.evaluations;
        if (!q.converged)
            throw accuracy_error("universal_bound: quadrature did not converge",
                                 q.value, q.error_estimate);
        return out;
    }

    const double u_cut = -std::expm1(-kTailCut);
    const auto core = integrate_adaptive(integrand, 0.0, u_cut, 0.5 * tol);
    auto tail = [&](double t) {
        double prod = 1.0;
        for (const auto& m : marginals) prod *= m.abs_quantile_tail(t);
        return prod * std::exp(-t);
    };
    const auto tq = integrate_adaptive(tail, kTailCut, kTailMax, 0.5 * tol);
    out.value = core.value + tq.value;
    out.abs_error_estimate = core.error_estimate + tq.error_estimate + std::abs(tail(kTailMax));
    out.nodes_used = core.evaluations + tq.evaluations + 1;
    if (!core.converged || !tq.converged || out.abs_error_estimate > tol)
        throw accuracy_error("universal_bound: quadrature did not converge",
                             out.value, out.abs_error_estimate);
    return out;
}

FeasibilityReport feasibility(std::span<const Marginal> marginals, Parity parity,
                              int grid) {
    if (marginals.size() < 2) throw spec_error("feasibility requires d >= 2");
    if (grid < 64) throw spec_error("feasibility grid must be >= 64");
    const int d = static_cast<int>(marginals.size());

    // One-sided-support obstruction: when every marginal eventually loses one
    // sign branch, the bias vector is a fixed 0/1 vector near u = 1. If that
    // vertex misses the polytope, the verdict is immediate.
    bool all_pinned = true;
    double pin_level = 0.0;
    std::vector<double> pinned(d, 0.0);
    for (int i = 0; i < d; ++i) {
        const int s = marginals[i].pinned_sign();
        if (s == 0 || marginals[i].one_branch_level() >= 1.0) {
            all_pinned = false;
            break;
        }
        pinned[i] = s > 0 ? 1.0 : 0.0;
        pin_level = std::max(pin_level, marginals[i].one_branch_level());
    }
    if (all_pinned) {
        const auto vert = membership(pinned, parity);
        if (!vert.inside) {
            FeasibilityReport rep;
            rep.parity = parity;
            rep.grid_size = 1;
            rep.worst_slack = vert.slack;
            rep.violating_levels.push_back(std::min(0.5 * (1.0 + pin_level), 1.0 - kLevelClip));
            rep.sharp = false;
            rep.shortcut = FeasibilityShortcut::skew_obstruction;
            return rep;
        }
    }

    bool identical = true;
    for (int i = 1; i < d; ++i) identical = identical && marginals[i].same_law(marginals[0]);

    const auto levels = level_grid(marginals, grid);
    auto rep = scan_levels(marginals, parity, levels, identical);
    if (identical) rep.shortcut = FeasibilityShortcut::iid_threshold;
    return rep;
}

nlohmann::json SharpBounds::to_json() const {
    nlohmann::json j;
    j["upper"] = {{"value", upper_value()}, {"sharp", upper_sharp}};
    j["lower"] = {{"value", lower_value()}, {"sharp", lower_sharp}};
    j["feasibility"] = {{"even", even_report.to_json()}, {"odd", odd_report.to_json()}};
    j["bound_error_estimate"] = bound.abs_error_estimate;
    j["quadrature_nodes"] = bound.nodes_used;
    return j;
}

SharpBounds sharp_bounds(std::span<const Marginal> marginals, int grid, double tol) {
    SharpBounds out;
    out.bound = universal_bound(marginals, tol);
    out.even_report = feasibility(marginals, Parity::even, grid);
    out.odd_report = feasibility(marginals, Parity::odd, grid);
    out.upper_sharp = out.even_report.sharp;
    out.lower_sharp = out.odd_report.sharp;
    return out;
}

}  // namespace parity_bounds
