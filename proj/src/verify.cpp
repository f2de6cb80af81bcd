// SPDX-License-Identifier: MIT
#include "parity_bounds/verify.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "parity_bounds/errors.hpp"
#include "parity_bounds/simplex.hpp"

namespace parity_bounds {

McEstimate mc_expected_product(const SampleBatch& batch) {
    if (batch.n < 2) throw spec_error("mc_expected_product requires n >= 2");
    McEstimate est;
    est.n = batch.n;
    double mean = 0.0, m2 = 0.0;
    for (int k = 0; k < batch.n; ++k) {
        double prod = 1.0;
        for (int i = 0; i < batch.d; ++i) prod *= batch.value(k, i);
        const double delta = prod - mean;
        mean += delta / (k + 1);
        m2 += delta * (prod - mean);
    }
    est.mean = mean;
    est.stderr_ = std::sqrt(m2 / (batch.n - 1)) / std::sqrt(static_cast<double>(batch.n));
    return est;
}

double ks_statistic(std::vector<double> samples, const Marginal& marginal) {
    const std::size_t n = samples.size();
    if (n < 1) throw spec_error("ks_statistic requires samples");
    std::sort(samples.begin(), samples.end());
    double d = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double f = marginal.cdf(samples[k]);
        d = std::max(d, f - static_cast<double>(k) / n);
        d = std::max(d, static_cast<double>(k + 1) / n - f);
    }
    return d;
}

double ks_statistic_uniform(std::vector<double> samples) {
    const std::size_t n = samples.size();
    if (n < 1) throw spec_error("ks_statistic requires samples");
    std::sort(samples.begin(), samples.end());
    double d = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double f = std::clamp(samples[k], 0.0, 1.0);
        d = std::max(d, f - static_cast<double>(k) / n);
        d = std::max(d, static_cast<double>(k + 1) / n - f);
    }
    return d;
}

DiscreteProblem quantize(std::span<const Marginal> marginals, int n_atoms, Target target) {
    if (n_atoms < 1) throw spec_error("quantize requires n_atoms >= 1");
    DiscreteProblem p;
    p.d = static_cast<int>(marginals.size());
    p.target = target;
    p.atoms.reserve(marginals.size());
    for (const auto& m : marginals) {
        std::vector<std::pair<double, double>> a;
        a.reserve(n_atoms);
        for (int k = 0; k < n_atoms; ++k)
            a.emplace_back(m.quantile((k + 0.5) / n_atoms), 1.0 / n_atoms);
        p.atoms.push_back(std::move(a));
    }
    return p;
}

nlohmann::json OracleResult::to_json(double bound) const {
    nlohmann::json j;
    j["n_atoms"] = cells;
    j["value"] = value;
    j["bound"] = bound;
    j["gap"] = value - bound;
    return j;
}

OracleResult discrete_oracle(const DiscreteProblem& problem) {
    const int d = problem.d;
    if (d < 2 || static_cast<int>(problem.atoms.size()) != d)
        throw spec_error("discrete_oracle: malformed problem");
    long long cells = 1;
    int rows = 0;
    for (const auto& a : problem.atoms) {
        if (a.empty()) throw spec_error("discrete_oracle: empty margin");
        double mass = 0.0;
        for (const auto& [v, pr] : a) mass += pr;
        if (std::abs(mass - 1.0) > 1e-12)
            throw spec_error("discrete_oracle: margin probabilities must sum to 1");
        cells *= static_cast<long long>(a.size());
        rows += static_cast<int>(a.size());
        if (cells > 20000) throw size_error("discrete_oracle: more than 20000 joint cells");
    }
    const int n = static_cast<int>(cells);

    // Joint cells in row-major order over atom indices; marginal-sum rows.
    std::vector<double> a_mat(static_cast<std::size_t>(rows) * n, 0.0);
    std::vector<double> b(rows, 0.0);
    std::vector<double> c(n, 0.0);
    std::vector<int> stride(d, 1);
    for (int i = d - 2; i >= 0; --i)
        stride[i] = stride[i + 1] * static_cast<int>(problem.atoms[i + 1].size());

    for (int cell = 0; cell < n; ++cell) {
        double prod = 1.0;
        int rest = cell;
        for (int i = 0; i < d; ++i) {
            const int idx = rest / stride[i];
            rest %= stride[i];
            prod *= problem.atoms[i][idx].first;
        }
        c[cell] = (problem.target == Target::max) ? -prod : prod;
    }
    int row = 0;
    for (int i = 0; i < d; ++i) {
        const int ni = static_cast<int>(problem.atoms[i].size());
        for (int k = 0; k < ni; ++k, ++row) {
            b[row] = problem.atoms[i][k].second;
            for (int cell = 0; cell < n; ++cell)
                if ((cell / stride[i]) % ni == k)
                    a_mat[static_cast<std::size_t>(row) * n + cell] = 1.0;
        }
    }

    const auto sol = simplex_solve(rows, n, a_mat, b, c);
    if (sol.status != SimplexResult::Status::optimal)
        throw evaluation_error("discrete_oracle: LP did not solve");
    OracleResult out;
    out.cells = n;
    out.value = (problem.target == Target::max) ? -sol.objective : sol.objective;
    return out;
}

}  // namespace parity_bounds
