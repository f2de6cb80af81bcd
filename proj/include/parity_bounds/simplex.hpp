// SPDX-License-Identifier: MIT
#pragma once

#include <vector>

namespace parity_bounds {

// Dense two-phase primal simplex for small equality-form programs
//   min c.x  s.t.  A x = b,  x >= 0.
// Bland's rule everywhere (anti-cycling); redundant equality rows are
// detected in phase 1 and dropped. One solver serves both the parity weight
// selection and the discrete transport oracle.
struct SimplexResult {
    enum class Status { optimal, infeasible, unbounded, iteration_limit };
    Status status = Status::optimal;
    std::vector<double> x;
    double objective = 0.0;
    double phase1_objective = 0.0;
};

SimplexResult simplex_solve(int m, int n, const std::vector<double>& a_rowmajor,
                            const std::vector<double>& b, const std::vector<double>& c,
                            double feas_tol = 1e-9);

}  // namespace parity_bounds
