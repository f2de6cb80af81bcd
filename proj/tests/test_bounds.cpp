// SPDX-License-Identifier: MIT
#include <doctest.h>

#include <cmath>
#include <vector>

#include "parity_bounds/bounds.hpp"
#include "parity_bounds/errors.hpp"
#include "test_support.hpp"

using namespace parity_bounds;

namespace {

constexpr double kEAbsZ3 = 1.5957691216057307;  // 2*sqrt(2/pi), confirmed below

std::vector<Marginal> three(const Marginal& m) { return {m, m, m}; }

std::vector<Marginal> linear_example() {
    return {Marginal::linear_density(0.4), Marginal::linear_density(0.2),
            Marginal::linear_density(-0.3)};
}

std::vector<Marginal> hetero_exp() {
    return {Marginal::shifted_exponential(0.8, 0.15),
            Marginal::shifted_exponential(1.0, 0.38),
            Marginal::shifted_exponential(1.9, 0.20)};
}

}  // namespace

TEST_CASE("universal bound: uniform powers have the exact closed form") {
    for (int d = 2; d <= 6; ++d) {
        const std::vector<Marginal> ms(d, Marginal::uniform(0.0, 1.0));
        const auto r = universal_bound(ms);
        CHECK(std::abs(r.value - 1.0 / (d + 1)) < 1e-10);
        CHECK(r.value >= 0.0);
        CHECK(r.abs_error_estimate <= 1e-9);
    }
}

TEST_CASE("universal bound: linear densities give 1/4 for any skew") {
    const auto r = universal_bound(linear_example());
    CHECK(std::abs(r.value - 0.25) < 1e-9);
    const auto r2 = universal_bound(three(Marginal::linear_density(0.9)));
    CHECK(std::abs(r2.value - 0.25) < 1e-9);
}

TEST_CASE("universal bound: standard normal cube against a trapezoid oracle") {
    // Independent oracle: E|Z|^3 = 2 * int_0^40 z^3 phi(z) dz by a dense
    // trapezoid rule in density space (no quantile machinery involved).
    const int n = 10'000'000;
    const double h = 40.0 / n;
    double acc = 0.0;
    for (int k = 1; k < n; ++k) {
        const double z = k * h;
        acc += z * z * z * std::exp(-0.5 * z * z);
    }
    const double oracle = 2.0 * acc * h * 0.3989422804014327;
    CHECK(std::abs(oracle - kEAbsZ3) < 1e-9);

    const auto r = universal_bound(three(Marginal::normal(0.0, 1.0)));
    CHECK(std::abs(r.value - oracle) < 1e-8);
    CHECK(std::abs(r.value - kEAbsZ3) < 1e-9);
}

TEST_CASE("universal bound: quartic normal moment") {
    const std::vector<Marginal> ms(4, Marginal::normal(0.0, 1.0));
    CHECK(std::abs(universal_bound(ms).value - 3.0) < 1e-9);
}

TEST_CASE("feasibility fixtures from the shifted-exponential family") {
    const auto se = three(Marginal::shifted_exponential(1.0, 0.3));
    const auto even = feasibility(se, Parity::even, 512);
    CHECK(even.sharp);
    CHECK(even.shortcut == FeasibilityShortcut::iid_threshold);

    const auto odd = feasibility(se, Parity::odd, 512);
    CHECK_FALSE(odd.sharp);
    CHECK(odd.shortcut == FeasibilityShortcut::skew_obstruction);
    CHECK(odd.worst_slack < -0.5);

    const auto het = feasibility(hetero_exp(), Parity::even, 4097);
    CHECK(het.sharp);
    CHECK(het.worst_slack >= -1e-8);
    CHECK_FALSE(feasibility(hetero_exp(), Parity::odd, 512).sharp);
}

TEST_CASE("shifted-exponential sharpness threshold brackets log2 / (2 lambda)") {
    const auto lo = three(Marginal::shifted_exponential(1.0, 0.34));
    const auto hi = three(Marginal::shifted_exponential(1.0, 0.35));
    CHECK(feasibility(lo, Parity::even, 2048).sharp);
    CHECK_FALSE(feasibility(hi, Parity::even, 2048).sharp);
    for (double a : {0.05, 0.2, 0.34657, 0.9}) {
        CHECK_FALSE(feasibility(three(Marginal::shifted_exponential(1.0, a)),
                                Parity::odd, 256)
                        .sharp);
    }
}

TEST_CASE("normal family sharpness by mean") {
    const auto plus = sharp_bounds(three(Marginal::normal(0.674, 1.0)), 1024);
    CHECK(plus.upper_sharp);
    CHECK_FALSE(plus.lower_sharp);
    const auto minus = sharp_bounds(three(Marginal::normal(-0.674, 1.0)), 1024);
    CHECK_FALSE(minus.upper_sharp);
    CHECK(minus.lower_sharp);
    const auto centred = sharp_bounds(three(Marginal::normal(0.0, 1.0)), 1024);
    CHECK(centred.upper_sharp);
    CHECK(centred.lower_sharp);
}

TEST_CASE("sharp bounds on the worked linear example") {
    const auto sb = sharp_bounds(linear_example(), 1024);
    CHECK(std::abs(sb.upper_value() - 0.25) < 1e-9);
    CHECK(std::abs(sb.lower_value() + 0.25) < 1e-9);
    CHECK(sb.upper_sharp);
    CHECK(sb.lower_sharp);
    CHECK(sb.lower_value() == -sb.upper_value());  // exact by construction
}

TEST_CASE("negation swaps the parities for odd dimension") {
    const std::vector<std::vector<Marginal>> fixtures = {
        three(Marginal::normal(0.674, 1.0)),
        three(Marginal::shifted_exponential(1.0, 0.3)),
        linear_example(),
        three(Marginal::normal(-0.3, 0.8)),
    };
    for (const auto& ms : fixtures) {
        std::vector<Marginal> neg;
        for (const auto& m : ms) neg.push_back(m.negated());
        for (auto parity : {Parity::even, Parity::odd}) {
            const auto a = feasibility(ms, parity, 512);
            const auto b = feasibility(neg, opposite(parity), 512);
            CHECK(a.sharp == b.sharp);
        }
    }
}

TEST_CASE("iid verdicts match the closed-form thresholds") {
    struct Case {
        Marginal m;
        int d;
    };
    const std::vector<Case> cases = {{Marginal::normal(0.674, 1.0), 3},
                                     {Marginal::normal(0.0, 1.0), 3},
                                     {Marginal::shifted_exponential(1.0, 0.3), 3},
                                     {Marginal::normal(0.0, 1.0), 4},
                                     {Marginal::normal(0.9, 1.0), 4}};
    for (const auto& c : cases) {
        const std::vector<Marginal> ms(c.d, c.m);
        for (auto parity : {Parity::even, Parity::odd}) {
            const auto rep = feasibility(ms, parity, 512);
            // closed-form verdict: threshold test over the same level scan
            bool closed_form = true;
            for (int k = 0; k < 512 && closed_form; ++k) {
                const double u = (k + 0.5) / 512;
                closed_form = diagonal_feasible(c.d, c.m.sign_bias(u), parity);
            }
            CHECK(rep.sharp == closed_form);
        }
    }
}

TEST_CASE("doubling the grid never flips a confident verdict") {
    const std::vector<std::vector<Marginal>> fixtures = {
        linear_example(),
        three(Marginal::shifted_exponential(1.0, 0.3)),
        three(Marginal::normal(0.674, 1.0)),
        hetero_exp(),
        three(Marginal::linear_density(0.45)),
    };
    for (const auto& ms : fixtures) {
        for (auto parity : {Parity::even, Parity::odd}) {
            for (int grid : {128, 256, 512, 1024}) {
                const auto coarse = feasibility(ms, parity, grid);
                if (std::abs(coarse.worst_slack) <= 1e-6) continue;
                const auto fine = feasibility(ms, parity, 2 * grid);
                CHECK(coarse.sharp == fine.sharp);
            }
        }
    }
}

TEST_CASE("tabulated marginals reproduce their analytic verdicts") {
    const std::vector<Marginal> tab = {pbt::tabulated_linear(0.4), pbt::tabulated_linear(0.2),
                                       pbt::tabulated_linear(-0.3)};
    const auto sb = sharp_bounds(tab, 512);
    CHECK(std::abs(sb.upper_value() - 0.25) < 1e-5);  // piecewise-linear bias
    CHECK(sb.upper_sharp);
    CHECK(sb.lower_sharp);

    const std::vector<Marginal> infeasible = {pbt::tabulated_linear(0.6),
                                              pbt::tabulated_linear(0.3),
                                              pbt::tabulated_linear(0.2)};
    CHECK_FALSE(feasibility(infeasible, Parity::odd, 512).sharp);  // l1 norm 1.1
    CHECK(feasibility(infeasible, Parity::even, 512).sharp);
}

TEST_CASE("feasibility rejects an undersized grid") {
    CHECK_THROWS_AS(feasibility(linear_example(), Parity::even, 32), spec_error);
    CHECK_THROWS_AS(universal_bound({}), spec_error);
}
