// SPDX-License-Identifier: MIT
#include "parity_bounds/parity.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include <nlohmann/json.hpp>

#include "parity_bounds/errors.hpp"
#include "parity_bounds/simplex.hpp"

namespace parity_bounds {

namespace {

constexpr double kMembershipTol = 1e-10;
constexpr double kWeightFloor = -1e-10;

void require_probability_vector(std::span<const double> p) {
    for (double v : p)
        if (!(v >= -1e-12 && v <= 1.0 + 1e-12))
            throw std::domain_error("sign-bias coordinates must lie in [0,1]");
}

void normalize_entries(std::vector<WeightEntry>& entries) {
    double total = 0.0;
    for (auto& e : entries) total += e.weight;
    if (total <= 0.0) throw evaluation_error("weight profile has no mass");
    for (auto& e : entries) e.weight /= total;
}

}  // namespace

const char* parity_name(Parity p) { return p == Parity::even ? "even" : "odd"; }

Parity SignPattern::parity() const {
    return (std::popcount(neg_mask_) % 2 == 0) ? Parity::even : Parity::odd;
}

std::vector<int> SignPattern::signs() const {
    std::vector<int> s(dim_);
    for (int i = 0; i < dim_; ++i) s[i] = sign(i);
    return s;
}

std::string SignPattern::to_string() const {
    std::string s(dim_, '+');
    for (int i = 0; i < dim_; ++i)
        if (sign(i) < 0) s[i] = '-';
    return s;
}

std::vector<SignPattern> enumerate_patterns(int d, Parity parity) {
    if (d < 2 || d > 20) throw size_error("enumerate_patterns: d must be in [2, 20]");
    const int want = parity == Parity::even ? 0 : 1;
    std::vector<SignPattern> out;
    out.reserve(1u << (d - 1));
    for (std::uint32_t mask = 0; mask < (1u << d); ++mask)
        if (std::popcount(mask) % 2 == want) out.emplace_back(d, mask);
    return out;
}

MembershipResult membership(std::span<const double> p, Parity parity) {
    require_probability_vector(p);
    const int d = static_cast<int>(p.size());
    MembershipResult res;

    double slack = std::numeric_limits<double>::infinity();
    for (double v : p) slack = std::min({slack, v, 1.0 - v});

    // Vertex indicator weights have parity d mod 2 for the even polytope and
    // the complement for the odd one; the facet family runs over index sets A
    // of the complementary cardinality parity.
    const int facet_par = (parity == Parity::even) ? (d % 2) ^ 1 : d % 2;

    std::vector<int> a_set;
    a_set.reserve(d);
    double y = 0.0;
    for (int i = 0; i < d; ++i) {
        if (p[i] > 0.5) {
            a_set.push_back(i);
            y += p[i];
        } else {
            y -= p[i];
        }
    }
    double facet_slack = (static_cast<double>(a_set.size()) - 1.0) - y;
    if (static_cast<int>(a_set.size()) % 2 != facet_par) {
        // Repair the cardinality parity with the cheapest single flip; it
        // worsens the violation by exactly |2p_i - 1|.
        int flip = 0;
        double cost = std::numeric_limits<double>::infinity();
        for (int i = 0; i < d; ++i) {
            const double ci = std::abs(2.0 * p[i] - 1.0);
            if (ci < cost) {
                cost = ci;
                flip = i;
            }
        }
        facet_slack += cost;
        const auto it = std::find(a_set.begin(), a_set.end(), flip);
        if (it != a_set.end()) {
            a_set.erase(it);
        } else {
            a_set.insert(std::lower_bound(a_set.begin(), a_set.end(), flip), flip);
        }
    }
    if (facet_slack < slack) {
        slack = facet_slack;
        if (facet_slack < -kMembershipTol) res.violating_facet = a_set;
    }

    res.slack = slack;
    res.inside = slack >= -kMembershipTol;
    if (res.inside) res.violating_facet.reset();
    return res;
}

int WeightProfile::dim() const {
    return entries.empty() ? 0 : entries.front().pattern.dim();
}

double WeightProfile::total() const {
    double t = 0.0;
    for (const auto& e : entries) t += e.weight;
    return t;
}

double WeightProfile::marginal_sum(int i) const {
    double t = 0.0;
    for (const auto& e : entries)
        if (e.pattern.sign(i) > 0) t += e.weight;
    return t;
}

nlohmann::json WeightProfile::to_json() const {
    nlohmann::json j;
    j["u"] = level;
    j["parity"] = parity_name(parity);
    auto arr = nlohmann::json::array();
    for (const auto& e : entries) {
        nlohmann::json je;
        je["signs"] = e.pattern.signs();
        je["w"] = e.weight;
        arr.push_back(std::move(je));
    }
    j["entries"] = std::move(arr);
    return j;
}

WeightProfile d3_weights(std::span<const double> p, Parity parity, double level) {
    if (p.size() != 3) throw size_error("d3_weights requires a 3-vector");
    require_probability_vector(p);
    const double p1 = p[0], p2 = p[1], p3 = p[2];
    // Pattern masks in lexicographic order alongside their closed-form
    // barycentric weights on the simplex P_3^+ or P_3^-.
    std::array<std::uint32_t, 4> masks;
    std::array<double, 4> w;
    if (parity == Parity::even) {
        masks = {0b000, 0b011, 0b101, 0b110};  // +++, +--, -+-, --+
        w = {0.5 * (p1 + p2 + p3 - 1.0), 0.5 * (1.0 + p1 - p2 - p3),
             0.5 * (1.0 - p1 + p2 - p3), 0.5 * (1.0 - p1 - p2 + p3)};
    } else {
        masks = {0b001, 0b010, 0b100, 0b111};  // ++-, +-+, -++, ---
        w = {0.5 * (p1 + p2 - p3), 0.5 * (p1 - p2 + p3),
             0.5 * (-p1 + p2 + p3), 0.5 * (2.0 - p1 - p2 - p3)};
    }
    WeightProfile prof;
    prof.level = level;
    prof.parity = parity;
    for (int k = 0; k < 4; ++k) {
        if (w[k] < kWeightFloor)
            throw evaluation_error("d3_weights: sign-bias vector outside the parity simplex");
        if (w[k] > 0.0) prof.entries.push_back({SignPattern(3, masks[k]), w[k]});
    }
    normalize_entries(prof.entries);
    return prof;
}

WeightProfile weights_lp(std::span<const double> p, Parity parity, double level) {
    const int d = static_cast<int>(p.size());
    if (d < 2) throw size_error("weights_lp requires d >= 2");
    if (d > 14) throw size_error("weights_lp supports d <= 14 (2^{d-1} columns)");
    require_probability_vector(p);

    const auto patterns = enumerate_patterns(d, parity);
    const int n = static_cast<int>(patterns.size());
    const int m = d + 1;
    std::vector<double> a(static_cast<std::size_t>(m) * n, 0.0);
    std::vector<double> b(m, 0.0);
    for (int j = 0; j < n; ++j) a[j] = 1.0;
    b[0] = 1.0;
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < n; ++j)
            if (patterns[j].sign(i) > 0) a[static_cast<std::size_t>(i + 1) * n + j] = 1.0;
        b[i + 1] = p[i];
    }
    const std::vector<double> c(n, 0.0);
    const auto sol = simplex_solve(m, n, a, b, c);
    if (sol.status == SimplexResult::Status::infeasible)
        throw evaluation_error("weights_lp: sign-bias vector outside the parity polytope");
    if (sol.status != SimplexResult::Status::optimal)
        throw evaluation_error("weights_lp: simplex did not converge");

    WeightProfile prof;
    prof.level = level;
    prof.parity = parity;
    for (int j = 0; j < n; ++j) {
        double w = sol.x[j];
        if (w <= 0.0) continue;  // clip at -1e-12 handled by the LP tolerance
        prof.entries.push_back({patterns[j], w});
    }
    normalize_entries(prof.entries);
    return prof;
}

SplitResult recursive_split(const WeightProfile& w, int pivot) {
    const int d = w.dim();
    if (d < 3) throw size_error("recursive_split requires d >= 3");
    if (pivot < 0 || pivot >= d) throw std::domain_error("recursive_split: pivot out of range");

    SplitResult out;
    std::vector<double> plus(d - 1, 0.0), minus(d - 1, 0.0);
    double mass_plus = 0.0, mass_minus = 0.0;
    for (const auto& e : w.entries) {
        const bool pos = e.pattern.sign(pivot) > 0;
        (pos ? mass_plus : mass_minus) += e.weight;
        int r = 0;
        for (int j = 0; j < d; ++j) {
            if (j == pivot) continue;
            if (e.pattern.sign(j) > 0) (pos ? plus : minus)[r] += e.weight;
            ++r;
        }
    }
    out.pivot_mass = mass_plus;
    constexpr double tol = 1e-12;
    if (mass_plus > tol) {
        for (auto& v : plus) v = std::clamp(v / mass_plus, 0.0, 1.0);
        out.q_plus = std::move(plus);
    }
    if (mass_minus > tol) {
        for (auto& v : minus) v = std::clamp(v / mass_minus, 0.0, 1.0);
        out.q_minus = std::move(minus);
    }
    return out;
}

bool diagonal_feasible(int d, double p, Parity parity) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::domain_error("diagonal_feasible: p outside [0,1]");
    const double lo = 1.0 / d;
    const double hi = static_cast<double>(d - 1) / d;
    if (d % 2 == 0)
        return parity == Parity::even ? true : (p >= lo && p <= hi);
    return parity == Parity::even ? p >= lo : p <= hi;
}

}  // namespace parity_bounds
