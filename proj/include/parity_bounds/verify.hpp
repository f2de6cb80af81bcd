// SPDX-License-Identifier: MIT
//
// Independent verification machinery: Monte Carlo estimates of the expected
// product, Kolmogorov-Smirnov distances against target marginals, and an
// exact multi-marginal transport LP over quantized marginals that serves as
// a brute-force oracle for small instances.
#pragma once

#include <span>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "parity_bounds/coupling.hpp"
#include "parity_bounds/marginal.hpp"

namespace parity_bounds {

struct McEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;  // sample std / sqrt(n)
    int n = 0;
};

McEstimate mc_expected_product(const SampleBatch& batch);

// Sup distance between the empirical cdf of the samples and F.
double ks_statistic(std::vector<double> samples, const Marginal& marginal);
double ks_statistic_uniform(std::vector<double> samples);

struct DiscreteProblem {
    int d = 0;
    // Per margin: (value, probability) atoms; probabilities sum to 1.
    std::vector<std::vector<std::pair<double, double>>> atoms;
    Target target = Target::max;
};

// n equal-probability atoms at the conditional medians F^{-1}((k-1/2)/n).
DiscreteProblem quantize(std::span<const Marginal> marginals, int n_atoms, Target target);

struct OracleResult {
    double value = 0.0;
    int cells = 0;
    [[nodiscard]] nlohmann::json to_json(double bound) const;
};

// Exact optimum of the multi-marginal transport LP over the product grid;
// refuses instances with more than 20000 joint cells.
OracleResult discrete_oracle(const DiscreteProblem& problem);

}  // namespace parity_bounds
