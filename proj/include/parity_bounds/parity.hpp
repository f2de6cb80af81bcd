// SPDX-License-Identifier: MIT
//
// Sign-pattern combinatorics and parity-polytope geometry. The even (odd)
// parity polytope is the convex hull of the 0/1 indicator vectors of the
// sign patterns whose product is +1 (-1). Membership of the sign-bias
// vector decides whether the universal product bounds are attainable, and
// weight profiles over same-parity patterns realize them.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace parity_bounds {

enum class Parity { even, odd };

[[nodiscard]] constexpr Parity opposite(Parity p) {
    return p == Parity::even ? Parity::odd : Parity::even;
}

[[nodiscard]] const char* parity_name(Parity p);

// A vector in {-1,+1}^d, stored as the bitmask of negative coordinates with
// coordinate 0 in the most significant position, so that ascending masks are
// exactly lexicographic order with '+' < '-'.
class SignPattern {
public:
    SignPattern(int dim, std::uint32_t neg_mask) : dim_(dim), neg_mask_(neg_mask) {}

    [[nodiscard]] int dim() const { return dim_; }
    [[nodiscard]] std::uint32_t mask() const { return neg_mask_; }

    [[nodiscard]] int sign(int i) const {
        return (neg_mask_ >> (dim_ - 1 - i)) & 1u ? -1 : +1;
    }
    [[nodiscard]] int indicator(int i) const { return sign(i) > 0 ? 1 : 0; }
    [[nodiscard]] Parity parity() const;
    [[nodiscard]] std::vector<int> signs() const;
    [[nodiscard]] std::string to_string() const;  // e.g. "+--"

    friend bool operator==(const SignPattern& a, const SignPattern& b) {
        return a.dim_ == b.dim_ && a.neg_mask_ == b.neg_mask_;
    }

private:
    int dim_;
    std::uint32_t neg_mask_;
};

// All 2^{d-1} patterns of the requested parity, lexicographically ordered.
// Requires 2 <= d <= 20.
std::vector<SignPattern> enumerate_patterns(int d, Parity parity);

struct MembershipResult {
    bool inside = false;
    // Minimum slack over the facet description (box constraints plus the
    // parity facets); negative when violated.
    double slack = 0.0;
    // Index set of the most violated parity facet, when one is violated.
    std::optional<std::vector<int>> violating_facet;
};

// Exact membership test for the parity polytope via its facet description:
// p in P_d^+/- iff 0 <= p <= 1 and, for every index set A whose cardinality
// parity differs from the polytope's vertex-weight parity,
//   sum_{A} p_i - sum_{A^c} p_i <= |A| - 1.
// Separation is O(d log d): greedily take p_i > 1/2 into A, then repair the
// cardinality parity by flipping the coordinate nearest 1/2.
MembershipResult membership(std::span<const double> p, Parity parity);

struct WeightEntry {
    SignPattern pattern;
    double weight;
};

// A sparse probability distribution over same-parity sign patterns at one
// magnitude level, matching given marginal sign biases.
struct WeightProfile {
    double level = 0.0;
    Parity parity = Parity::even;
    std::vector<WeightEntry> entries;  // positive weights, lexicographic order

    [[nodiscard]] int dim() const;
    [[nodiscard]] double total() const;
    // Sum of weights over entries with s_i = +1.
    [[nodiscard]] double marginal_sum(int i) const;
    [[nodiscard]] nlohmann::json to_json() const;
};

// Closed-form trivariate weights; the parity polytopes are simplices for
// d = 3, so the representation is unique. Throws evaluation_error when a
// closed-form weight is below -1e-10.
WeightProfile d3_weights(std::span<const double> p, Parity parity, double level = 0.0);

// Basic feasible solution of {w >= 0, sum w = 1, sum_{s_i=+1} w = p_i} over
// the same-parity patterns (phase-1 simplex, Bland's rule, lexicographic
// column order). Support size <= d+1. Requires d <= 14.
WeightProfile weights_lp(std::span<const double> p, Parity parity, double level = 0.0);

struct SplitResult {
    double pivot_mass = 0.0;  // sum of weights with positive pivot sign
    // Conditional positive-sign biases of the non-pivot coordinates, present
    // when the corresponding branch carries mass. q_plus has the parity of
    // the profile, q_minus the opposite parity.
    std::optional<std::vector<double>> q_plus;
    std::optional<std::vector<double>> q_minus;
};

// Conditions a weight profile on the sign of the pivot coordinate, yielding
// the mixture decomposition p_j = p1 q_j^+ + (1-p1) q_j^-.
SplitResult recursive_split(const WeightProfile& w, int pivot);

// Closed-form diagonal feasibility: whether (p,...,p) lies in the parity
// polytope of dimension d.
bool diagonal_feasible(int d, double p, Parity parity);

}  // namespace parity_bounds
