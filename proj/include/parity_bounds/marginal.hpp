// SPDX-License-Identifier: MIT
//
// Univariate marginal laws: absolutely continuous distributions with
// connected support, together with the law of the absolute value and the
// sign-bias function they induce. These three objects are what the rest of
// the library consumes: magnitudes are coupled through the absolute-value
// quantile, and signs through the bias p(u) = P(X >= 0 | |X| at level u).
#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace parity_bounds {

enum class Family {
    shifted_exponential,  // X + a ~ Exp(lambda), support [-a, inf)
    linear_density,       // f(x) = (1 + theta x)/2 on [-1, 1]
    normal,               // N(mu, sigma^2)
    uniform,              // U[lo, hi]
    tabulated             // piecewise-linear density on a user grid
};

struct AssumptionReport {
    double density_integral = 0.0;      // should be 1
    double moment = 0.0;                // E|X|^d
    double moment_error_estimate = 0.0; // absolute quadrature error
    bool moment_converged = true;       // relative error below 1e-4
};

class Marginal {
public:
    static Marginal shifted_exponential(double lambda, double a);
    static Marginal linear_density(double theta);
    static Marginal normal(double mu, double sigma);
    static Marginal uniform(double lo, double hi);
    static Marginal tabulated(std::vector<double> x, std::vector<double> density);

    [[nodiscard]] Family family() const;

    // Distribution of X.
    [[nodiscard]] double cdf(double x) const;
    [[nodiscard]] double density(double x) const;
    [[nodiscard]] double quantile(double u) const;  // u in (0,1), throws std::domain_error

    [[nodiscard]] double support_lo() const;
    [[nodiscard]] double support_hi() const;

    // Distribution of |X|: G(y) = F(y) - F(-y), g(y) = f(y) + f(-y).
    [[nodiscard]] double abs_cdf(double y) const;
    [[nodiscard]] double abs_density(double y) const;
    [[nodiscard]] double abs_quantile(double u) const;
    // G^{-1}(1 - e^{-t}), evaluated stably for large t (quantile levels
    // indistinguishable from 1 in double precision).
    [[nodiscard]] double abs_quantile_tail(double t) const;
    [[nodiscard]] double abs_support_hi() const;
    [[nodiscard]] bool abs_unbounded() const;

    // Sign structure.
    [[nodiscard]] double sign_bias(double u) const;  // p(u), u in (0,1)
    [[nodiscard]] double sign_threshold() const;     // u0 = F(0)
    // Magnitude level above which only one sign branch remains; 1 when both
    // branches persist to the top of the magnitude range, 0 when the support
    // never straddles zero.
    [[nodiscard]] double one_branch_level() const;
    // +1 / -1 when the surviving branch above one_branch_level() is the
    // positive / negative one, 0 when there is no such level (symmetric
    // reach or no straddle... see one_branch_level()).
    [[nodiscard]] int pinned_sign() const;

    // Sign-flip level map tau(u) = F(-F^{-1}(u)).
    [[nodiscard]] double sign_flip(double u) const;

    // The law of -X. Not serializable; used for duality checks.
    [[nodiscard]] Marginal negated() const;
    [[nodiscard]] bool is_negated() const { return mirrored_; }

    [[nodiscard]] bool same_law(const Marginal& other) const;

    // Numerical verification of the standing assumptions for dimension d:
    // unit mass and finite E|X|^d.
    [[nodiscard]] AssumptionReport check_assumptions(int d) const;

    [[nodiscard]] nlohmann::json to_json() const;
    static Marginal from_json(const nlohmann::json& j);

private:
    struct ShiftedExpParams {
        double lambda, a;
        bool operator==(const ShiftedExpParams&) const = default;
    };
    struct LinearParams {
        double theta;
        bool operator==(const LinearParams&) const = default;
    };
    struct NormalParams {
        double mu, sigma;
        bool operator==(const NormalParams&) const = default;
    };
    struct UniformParams {
        double lo, hi;
        bool operator==(const UniformParams&) const = default;
    };
    struct TabulatedParams {
        // Shared: marginals are freely copied, the grid is immutable.
        std::shared_ptr<const std::vector<double>> x;
        std::shared_ptr<const std::vector<double>> pdf;        // renormalized
        std::shared_ptr<const std::vector<double>> cdf_knots;  // cumulative trapezoid
        bool operator==(const TabulatedParams& o) const {
            return *x == *o.x && *pdf == *o.pdf;
        }
    };
    using Params = std::variant<ShiftedExpParams, LinearParams, NormalParams,
                                UniformParams, TabulatedParams>;

    explicit Marginal(Params params, bool mirrored = false);

    // Base-law evaluations (before the mirror transform).
    [[nodiscard]] double base_cdf(double x) const;
    [[nodiscard]] double base_density(double x) const;
    [[nodiscard]] double base_quantile(double u) const;
    [[nodiscard]] double base_sign_bias(double u) const;

    Params params_;
    bool mirrored_ = false;
    double lo_ = 0.0, hi_ = 0.0;  // support of the (possibly mirrored) law
    double u0_ = 0.0;             // F(0)
    double ua_ = 0.0;             // one-branch level on the magnitude scale
    int pinned_sign_ = 0;
    double abs_hi_ = 0.0;         // sup of |X|
};

// View onto the law of |X| for a marginal: G(y) = F(y) - F(-y) with density
// g(y) = f(y) + f(-y). Valid while the parent marginal is alive.
class AbsoluteLaw {
public:
    explicit AbsoluteLaw(const Marginal& parent) : parent_(&parent) {}
    [[nodiscard]] double cdf(double y) const { return parent_->abs_cdf(y); }
    [[nodiscard]] double density(double y) const { return parent_->abs_density(y); }
    [[nodiscard]] double quantile(double u) const { return parent_->abs_quantile(u); }
    [[nodiscard]] const Marginal& parent() const { return *parent_; }

private:
    const Marginal* parent_;
};

// View onto the sign-bias function p(u) = P(X >= 0 | |X| at level u), with
// its two structural levels: u0 = F(0) and the one-branch level.
class SignBias {
public:
    explicit SignBias(const Marginal& parent) : parent_(&parent) {}
    [[nodiscard]] double operator()(double u) const { return parent_->sign_bias(u); }
    [[nodiscard]] double u0() const { return parent_->sign_threshold(); }
    [[nodiscard]] double ua() const { return parent_->one_branch_level(); }

private:
    const Marginal* parent_;
};

// Accurate inverse of the standard normal cdf (Wichura's PPND16).
double standard_normal_quantile(double p);
double standard_normal_cdf(double z);
double standard_normal_density(double z);

}  // namespace parity_bounds
