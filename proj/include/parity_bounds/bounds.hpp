// SPDX-License-Identifier: MIT
//
// Universal product bounds and their sharpness. The bound itself is the
// expected product of comonotonic absolute values, int_0^1 prod G_i^{-1}(u) du;
// it is attained (with sign) exactly when the sign-bias vector lies in the
// even- (upper) or odd- (lower) parity polytope at almost every level.
#pragma once

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "parity_bounds/marginal.hpp"
#include "parity_bounds/parity.hpp"

namespace parity_bounds {

struct BoundResult {
    double value = 0.0;               // int_0^1 prod_i G_i^{-1}(u) du >= 0
    double abs_error_estimate = 0.0;
    int nodes_used = 0;
};

enum class FeasibilityShortcut { none, iid_threshold, skew_obstruction };

[[nodiscard]] const char* shortcut_name(FeasibilityShortcut s);

struct FeasibilityReport {
    Parity parity = Parity::even;
    int grid_size = 0;          // levels actually evaluated
    double worst_slack = 0.0;   // min membership slack over the level grid
    std::vector<double> violating_levels;  // slack < -1e-8
    bool sharp = false;
    FeasibilityShortcut shortcut = FeasibilityShortcut::none;

    [[nodiscard]] nlohmann::json to_json() const;
};

// Thrown when a construction requires a sharp bound that is not attainable;
// carries the offending feasibility report.
class infeasible_error : public std::runtime_error {
public:
    infeasible_error(const std::string& what, FeasibilityReport report)
        : std::runtime_error(what), report(std::move(report)) {}
    FeasibilityReport report;
};

// Adaptive quadrature of the universal bound integral, with the substitution
// u = 1 - e^{-t} on the top panel when any |X_i| is unbounded. Throws
// accuracy_error when the error estimate cannot be brought under tol.
BoundResult universal_bound(std::span<const Marginal> marginals, double tol = 1e-9);

// Scans the sign-bias vector over a level grid (refined near each marginal's
// sign threshold and one-branch level) and tests parity-polytope membership.
// Closed-form shortcuts are applied first: the one-sided-support obstruction
// and identical-marginal thresholds. A level violating by more than 1e-8
// slack marks the bound not sharp; boundary-touching levels are tolerated.
FeasibilityReport feasibility(std::span<const Marginal> marginals, Parity parity,
                              int grid = 4097);

struct SharpBounds {
    BoundResult bound;
    bool upper_sharp = false;
    bool lower_sharp = false;
    FeasibilityReport even_report;
    FeasibilityReport odd_report;

    [[nodiscard]] double upper_value() const { return bound.value; }
    [[nodiscard]] double lower_value() const { return -bound.value; }
    [[nodiscard]] nlohmann::json to_json() const;
};

SharpBounds sharp_bounds(std::span<const Marginal> marginals, int grid = 4097,
                         double tol = 1e-9);

}  // namespace parity_bounds
