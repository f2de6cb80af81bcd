// SPDX-License-Identifier: MIT
//
// Construction and sampling of the extremal couplings: comonotonic
// magnitudes driven by one uniform, and a parity-consistent sign pattern
// selected by a second uniform through level-dependent weight profiles.
// Includes the closed-form trivariate copulas, the recursive pivot
// construction for d >= 4, and the analytic mixing-function fixtures.
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "parity_bounds/bounds.hpp"
#include "parity_bounds/marginal.hpp"
#include "parity_bounds/parity.hpp"

namespace parity_bounds {

enum class Target { max, min };

[[nodiscard]] constexpr Parity target_parity(Target t) {
    return t == Target::max ? Parity::even : Parity::odd;
}
[[nodiscard]] const char* target_name(Target t);

enum class Strategy { closed_form_d3, lp_weights, recursive_pivot };

struct CouplingSpec {
    std::vector<Marginal> marginals;
    Target target = Target::max;
    Strategy strategy = Strategy::closed_form_d3;
    int pivot = 0;  // recursive_pivot only
    std::uint64_t seed = 0;
    int feasibility_grid = 4097;
};

struct SampleBatch {
    int n = 0;
    int d = 0;
    std::vector<double> u, v;             // driving uniforms, one pair per row
    std::vector<std::uint32_t> patterns;  // sign-pattern masks per row
    std::vector<double> x;                // row-major n x d realizations

    [[nodiscard]] double value(int row, int col) const { return x[static_cast<std::size_t>(row) * d + col]; }
    [[nodiscard]] SignPattern pattern(int row) const { return SignPattern(d, patterns[row]); }

    // Header u,v,pattern,x1,...,xd; shortest round-trip float formatting.
    void write_csv(std::ostream& os) const;
};

// Selects the pattern with W_{k-1} < v <= W_k, cumulative sums taken in the
// profile's fixed (lexicographic) entry order; v = 0 maps to the first entry.
const SignPattern& select_pattern(const WeightProfile& profile, double v);

// Same selection driven by a level-dependent weight function.
SignPattern sign_selector(const std::function<WeightProfile(double)>& weights,
                          double u, double v);

// Validated extremal coupling with a per-level weight cache for the LP-backed
// strategies. Construction refuses infeasible targets (infeasible_error).
class ExtremalCoupling {
public:
    static ExtremalCoupling build(CouplingSpec spec);

    [[nodiscard]] SampleBatch sample(int n) const;
    [[nodiscard]] WeightProfile profile_at(double u) const;
    [[nodiscard]] const CouplingSpec& spec() const { return spec_; }
    [[nodiscard]] const FeasibilityReport& report() const { return report_; }

private:
    ExtremalCoupling(CouplingSpec spec, FeasibilityReport rep);

    CouplingSpec spec_;
    FeasibilityReport report_;
    // 4096-level midpoint cache for LP-backed strategies; nearest lookup.
    std::vector<WeightProfile> cache_;
};

SampleBatch sample(const CouplingSpec& spec, int n);

// Trivariate extremal copula evaluated at the driving pair (u, v); returns
// (U1, U2, U3) whose marginal quantiles realize the coupling.
std::array<double, 3> trivariate_copula(std::span<const Marginal> marginals,
                                        Target target, double u, double v);

// Conditional probability of the J = 1 branch at level u (the mixing
// function of the trivariate construction, in the branch-map convention of
// the general copula: J = 1 selects h^+ for coordinate 2).
double trivariate_mixing(std::span<const Marginal> marginals, Target target, double u);

// Recursive pivot construction for d >= 4: the pivot coordinate keeps its
// uniform, the remaining coordinates couple through the conditional bias
// split of the exact level profile.
std::vector<double> recursive_coupling(std::span<const Marginal> marginals,
                                       Target target, int pivot, double u, double v);

struct SupportCurve {
    SignPattern pattern;
    std::vector<double> u_grid;
    std::vector<std::array<double, 3>> points;
};

// Traces the four support legs of the trivariate extremal copula, junction
// included; legs are emitted only where their pattern weight is positive.
std::vector<SupportCurve> support_curves(std::span<const Marginal> marginals,
                                         Target target, int grid);
void write_support_csv(std::ostream& os, const std::vector<SupportCurve>& curves);

// Closed-form mixing function and sign-flip involution for the homogeneous
// shifted-exponential maximizer and the non-centred normal extremizers,
// used to cross-check the general pipeline.
struct MixingFixture {
    std::function<double(double)> s;    // mixing function u -> s(u)
    std::function<double(double)> tau;  // sign-flip involution
    double u0 = 0.0;                    // sign threshold
    double ua = 1.0;                    // one-branch level (1 when absent)
};

MixingFixture analytic_mixing_fixture(std::span<const Marginal> marginals, Target target);

}  // namespace parity_bounds
