// SPDX-License-Identifier: MIT
#include "parity_bounds/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace parity_bounds {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-9;
constexpr int kMaxIterations = 200000;

struct Tableau {
    int m, n;          // constraint rows, structural columns
    int width;         // n + m artificials + rhs
    std::vector<double> t;
    std::vector<int> basis;

    double& at(int i, int j) { return t[static_cast<std::size_t>(i) * width + j]; }
    double at(int i, int j) const { return t[static_cast<std::size_t>(i) * width + j]; }
    int rhs_col() const { return width - 1; }

    void pivot(int pr, int pc) {
        const double inv = 1.0 / at(pr, pc);
        for (int j = 0; j < width; ++j) at(pr, j) *= inv;
        at(pr, pc) = 1.0;
        for (int i = 0; i < m; ++i) {
            if (i == pr) continue;
            const double f = at(i, pc);
            if (f == 0.0) continue;
            for (int j = 0; j < width; ++j) at(i, j) -= f * at(pr, j);
            at(i, pc) = 0.0;
        }
        basis[pr] = pc;
    }

    // Dantzig pricing with Bland's rule engaged for anti-cycling: after a
    // run of degenerate pivots the selection switches to lowest-index
    // entering columns (and lowest basis-index ratio ties) until the
    // objective strictly improves again.
    // Returns iterations used, or -1 on iteration limit, -2 on unbounded.
    int run(std::vector<double>& cost, double& objective, int n_enterable) {
        int iters = 0;
        int degenerate_streak = 0;
        bool bland_mode = false;
        while (true) {
            int enter = -1;
            if (bland_mode) {
                for (int j = 0; j < n_enterable; ++j) {
                    if (cost[j] < -kCostTol) {
                        enter = j;
                        break;
                    }
                }
            } else {
                double most_negative = -kCostTol;
                for (int j = 0; j < n_enterable; ++j) {
                    if (cost[j] < most_negative) {
                        most_negative = cost[j];
                        enter = j;
                    }
                }
            }
            if (enter < 0) return iters;
            int leave = -1;
            double best_ratio = 0.0;
            for (int i = 0; i < m; ++i) {
                const double a = at(i, enter);
                if (a <= kPivotTol) continue;
                const double ratio = at(i, rhs_col()) / a;
                if (leave < 0 || ratio < best_ratio - 1e-15 ||
                    (std::abs(ratio - best_ratio) <= 1e-15 && basis[i] < basis[leave])) {
                    leave = i;
                    best_ratio = ratio;
                }
            }
            if (leave < 0) return -2;
            pivot(leave, enter);
            const double f = cost[enter];
            for (int j = 0; j < width; ++j) cost[j] -= f * at(leave, j);
            cost[enter] = 0.0;
            const double previous = objective;
            objective = -cost[width - 1];
            if (objective < previous - 1e-13) {
                degenerate_streak = 0;
                bland_mode = false;
            } else if (++degenerate_streak > 64) {
                bland_mode = true;
            }
            if (++iters > kMaxIterations) return -1;
        }
    }
};

}  // namespace

SimplexResult simplex_solve(int m, int n, const std::vector<double>& a_rowmajor,
                            const std::vector<double>& b, const std::vector<double>& c,
                            double feas_tol) {
    SimplexResult out;
    Tableau tb;
    tb.m = m;
    tb.n = n;
    tb.width = n + m + 1;
    tb.t.assign(static_cast<std::size_t>(m) * tb.width, 0.0);
    tb.basis.resize(m);
    for (int i = 0; i < m; ++i) {
        const double sgn = (b[i] < 0.0) ? -1.0 : 1.0;
        for (int j = 0; j < n; ++j)
            tb.at(i, j) = sgn * a_rowmajor[static_cast<std::size_t>(i) * n + j];
        tb.at(i, n + i) = 1.0;
        tb.at(i, tb.rhs_col()) = sgn * b[i];
        tb.basis[i] = n + i;
    }

    // Phase 1: minimize the artificial mass. Reduced costs start at
    // -columnsum for structural columns; artificials never re-enter.
    std::vector<double> cost(tb.width, 0.0);
    double phase1 = 0.0;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) cost[j] -= tb.at(i, j);
        cost[tb.rhs_col()] -= tb.at(i, tb.rhs_col());
        phase1 += tb.at(i, tb.rhs_col());
    }
    int rc = tb.run(cost, phase1, n);
    if (rc == -1) {
        out.status = SimplexResult::Status::iteration_limit;
        return out;
    }
    out.phase1_objective = phase1;
    if (phase1 > feas_tol) {
        out.status = SimplexResult::Status::infeasible;
        return out;
    }

    // Drive artificials out of the basis; rows that cannot pivot on any
    // structural column are redundant constraints and are dropped.
    for (int i = tb.m - 1; i >= 0; --i) {
        if (tb.basis[i] < n) continue;
        int pc = -1;
        for (int j = 0; j < n; ++j) {
            if (std::abs(tb.at(i, j)) > 1e-9) {
                pc = j;
                break;
            }
        }
        if (pc >= 0) {
            tb.pivot(i, pc);
        } else {
            const std::size_t row = static_cast<std::size_t>(i) * tb.width;
            tb.t.erase(tb.t.begin() + row, tb.t.begin() + row + tb.width);
            tb.basis.erase(tb.basis.begin() + i);
            --tb.m;
        }
    }

    // Phase 2 over the structural columns.
    bool nonzero_cost = false;
    for (int j = 0; j < n; ++j) nonzero_cost = nonzero_cost || c[j] != 0.0;
    if (nonzero_cost) {
        std::vector<double> cost2(tb.width, 0.0);
        for (int j = 0; j < n; ++j) cost2[j] = c[j];
        double obj = 0.0;
        for (int i = 0; i < tb.m; ++i) {
            const double cb = c[tb.basis[i]];
            if (cb == 0.0) continue;
            for (int j = 0; j < tb.width; ++j) cost2[j] -= cb * tb.at(i, j);
            cost2[tb.basis[i]] = 0.0;
        }
        obj = -cost2[tb.rhs_col()];
        rc = tb.run(cost2, obj, n);
        if (rc == -1) {
            out.status = SimplexResult::Status::iteration_limit;
            return out;
        }
        if (rc == -2) {
            out.status = SimplexResult::Status::unbounded;
            return out;
        }
    }

    out.x.assign(n, 0.0);
    for (int i = 0; i < tb.m; ++i)
        if (tb.basis[i] < n) out.x[tb.basis[i]] = tb.at(i, tb.rhs_col());
    out.objective = 0.0;
    for (int j = 0; j < n; ++j) out.objective += c[j] * out.x[j];
    out.status = SimplexResult::Status::optimal;
    return out;
}

}  // namespace parity_bounds
