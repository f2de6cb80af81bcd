// SPDX-License-Identifier: MIT
#include "parity_bounds/marginal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "parity_bounds/errors.hpp"
#include "parity_bounds/quadrature.hpp"

namespace parity_bounds {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kInvSqrt2Pi = 0.3989422804014326779;

// Monotone increasing fn on [lo, hi]: bisection to width 1e-13, then one
// Newton polish when the derivative is available and positive.
template <class F, class D>
double invert_monotone(const F& fn, const D& deriv, double lo, double hi, double target) {
    double flo = fn(lo) - target;
    double fhi = fn(hi) - target;
    if (flo >= 0.0) return lo;
    if (fhi <= 0.0) return hi;
    for (int it = 0; it < 200 && (hi - lo) > 1e-13 * std::max(1.0, std::abs(lo) + std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = fn(mid) - target;
        if (fm <= 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    double x = 0.5 * (lo + hi);
    const double g = deriv(x);
    if (g > 1e-300 && std::isfinite(g)) {
        const double step = (fn(x) - target) / g;
        if (std::isfinite(step)) {
            const double y = x - step;
            if (y >= lo && y <= hi) x = y;
        }
    }
    return x;
}

}  // namespace

double standard_normal_cdf(double z) {
    return 0.5 * std::erfc(-z * M_SQRT1_2);
}

double standard_normal_density(double z) {
    return kInvSqrt2Pi * std::exp(-0.5 * z * z);
}

// Wichura's algorithm AS241, PPND16: inverse normal cdf to ~1e-16 relative.
double standard_normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        if (p == 0.0) return -kInf;
        if (p == 1.0) return kInf;
        throw std::domain_error("standard_normal_quantile: p outside (0,1)");
    }
    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                     6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                   1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                 1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
               (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                     3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                   5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
                 4.2313330701600911252e1) * r + 1.0);
    }
    double r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                    2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                  3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
                4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
              (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                    1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                  6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
                2.05319162663775882187e0) * r + 1.0);
    } else {
        r -= 5.0;
        val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                    1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                  2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
                5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
              (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-9) * r +
                    1.84631831751005468180e-6) * r + 7.86869131145613259100e-4) * r +
                  1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                5.99832206555887937690e-1) * r + 1.0);
    }
    return (q < 0.0) ? -val : val;
}

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

Marginal::Marginal(Params params, bool mirrored)
    : params_(std::move(params)), mirrored_(mirrored) {
    // Base support, then the mirror transform.
    double blo = 0.0, bhi = 0.0;
    if (auto* se = std::get_if<ShiftedExpParams>(&params_)) {
        blo = -se->a;
        bhi = kInf;
    } else if (std::get_if<LinearParams>(&params_)) {
        blo = -1.0;
        bhi = 1.0;
    } else if (std::get_if<NormalParams>(&params_)) {
        blo = -kInf;
        bhi = kInf;
    } else if (auto* un = std::get_if<UniformParams>(&params_)) {
        blo = un->lo;
        bhi = un->hi;
    } else {
        auto& tb = std::get<TabulatedParams>(params_);
        blo = tb.x->front();
        bhi = tb.x->back();
    }
    lo_ = mirrored_ ? -bhi : blo;
    hi_ = mirrored_ ? -blo : bhi;

    u0_ = cdf(0.0);
    const double reach_neg = (lo_ < 0.0) ? -lo_ : 0.0;
    const double reach_pos = (hi_ > 0.0) ? hi_ : 0.0;
    abs_hi_ = std::max(reach_neg, reach_pos);
    if (reach_neg == reach_pos) {
        pinned_sign_ = 0;
        ua_ = 1.0;
    } else if (reach_neg == 0.0 || reach_pos == 0.0) {
        pinned_sign_ = (reach_pos > 0.0) ? +1 : -1;
        ua_ = 0.0;
    } else {
        pinned_sign_ = (reach_pos > reach_neg) ? +1 : -1;
        ua_ = abs_cdf(std::min(reach_neg, reach_pos));
    }
}

Marginal Marginal::shifted_exponential(double lambda, double a) {
    if (!(lambda > 0.0) || !(a > 0.0))
        throw spec_error("shifted_exponential requires lambda > 0 and a > 0");
    return Marginal(ShiftedExpParams{lambda, a});
}

Marginal Marginal::linear_density(double theta) {
    if (!(theta > -1.0 && theta < 1.0))
        throw spec_error("linear_density requires theta in (-1, 1)");
    return Marginal(LinearParams{theta});
}

Marginal Marginal::normal(double mu, double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(mu))
        throw spec_error("normal requires finite mu and sigma > 0");
    return Marginal(NormalParams{mu, sigma});
}

Marginal Marginal::uniform(double lo, double hi) {
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
        throw spec_error("uniform requires finite lo < hi");
    return Marginal(UniformParams{lo, hi});
}

Marginal Marginal::tabulated(std::vector<double> x, std::vector<double> density) {
    if (x.size() < 2 || x.size() != density.size())
        throw spec_error("tabulated requires >= 2 grid points and matching arrays");
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        if (!(x[i] < x[i + 1])) throw spec_error("tabulated grid must be strictly increasing");
    double mass = 0.0;
    for (std::size_t i = 0; i < density.size(); ++i) {
        if (!(density[i] >= 0.0) || !std::isfinite(density[i]))
            throw spec_error("tabulated density must be nonnegative and finite");
        if (i + 1 < x.size())
            mass += 0.5 * (density[i] + density[i + 1]) * (x[i + 1] - x[i]);
    }
    if (!(mass > 0.0)) throw spec_error("tabulated density has zero mass");
    for (auto& d : density) d /= mass;
    std::vector<double> cum(x.size(), 0.0);
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        cum[i + 1] = cum[i] + 0.5 * (density[i] + density[i + 1]) * (x[i + 1] - x[i]);
    cum.back() = 1.0;
    auto xs = std::make_shared<const std::vector<double>>(std::move(x));
    auto pdf = std::make_shared<const std::vector<double>>(std::move(density));
    auto ck = std::make_shared<const std::vector<double>>(std::move(cum));
    return Marginal(TabulatedParams{xs, pdf, ck});
}

Family Marginal::family() const {
    switch (params_.index()) {
        case 0: return Family::shifted_exponential;
        case 1: return Family::linear_density;
        case 2: return Family::normal;
        case 3: return Family::uniform;
        default: return Family::tabulated;
    }
}

// ---------------------------------------------------------------------------
// Base-law evaluations (unmirrored)
// ---------------------------------------------------------------------------

double Marginal::base_cdf(double x) const {
    if (auto* se = std::get_if<ShiftedExpParams>(&params_)) {
        if (x <= -se->a) return 0.0;
        return -std::expm1(-se->lambda * (x + se->a));
    }
    if (auto* li = std::get_if<LinearParams>(&params_)) {
        if (x <= -1.0) return 0.0;
        if (x >= 1.0) return 1.0;
        return 0.5 * (x + 1.0) + 0.25 * li->theta * (x * x - 1.0);
    }
    if (auto* no = std::get_if<NormalParams>(&params_)) {
        return standard_normal_cdf((x - no->mu) / no->sigma);
    }
    if (auto* un = std::get_if<UniformParams>(&params_)) {
        if (x <= un->lo) return 0.0;
        if (x >= un->hi) return 1.0;
        return (x - un->lo) / (un->hi - un->lo);
    }
    const auto& tb = std::get<TabulatedParams>(params_);
    const auto& xs = *tb.x;
    if (x <= xs.front()) return 0.0;
    if (x >= xs.back()) return 1.0;
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t k = static_cast<std::size_t>(it - xs.begin()) - 1;
    const double s = x - xs[k];
    const double h = xs[k + 1] - xs[k];
    const double dk = (*tb.pdf)[k];
    const double slope = ((*tb.pdf)[k + 1] - dk) / h;
    return std::min(1.0, (*tb.cdf_knots)[k] + dk * s + 0.5 * slope * s * s);
}

double Marginal::base_density(double x) const {
    if (auto* se = std::get_if<ShiftedExpParams>(&params_)) {
        if (x < -se->a) return 0.0;
        return se->lambda * std::exp(-se->lambda * (x + se->a));
    }
    if (auto* li = std::get_if<LinearParams>(&params_)) {
        if (x < -1.0 || x > 1.0) return 0.0;
        return 0.5 * (1.0 + li->theta * x);
    }
    if (auto* no = std::get_if<NormalParams>(&params_)) {
        return standard_normal_density((x - no->mu) / no->sigma) / no->sigma;
    }
    if (auto* un = std::get_if<UniformParams>(&params_)) {
        return (x >= un->lo && x <= un->hi) ? 1.0 / (un->hi - un->lo) : 0.0;
    }
    const auto& tb = std::get<TabulatedParams>(params_);
    const auto& xs = *tb.x;
    if (x < xs.front() || x > xs.back()) return 0.0;
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    std::size_t k = static_cast<std::size_t>(it - xs.begin());
    k = (k == 0) ? 0 : k - 1;
    if (k + 1 >= xs.size()) k = xs.size() - 2;
    const double t = (x - xs[k]) / (xs[k + 1] - xs[k]);
    return (*tb.pdf)[k] * (1.0 - t) + (*tb.pdf)[k + 1] * t;
}

double Marginal::base_quantile(double u) const {
    if (auto* se = std::get_if<ShiftedExpParams>(&params_)) {
        return -std::log1p(-u) / se->lambda - se->a;
    }
    if (auto* li = std::get_if<LinearParams>(&params_)) {
        const double th = li->theta;
        const double disc = (1.0 - th) * (1.0 - th) + 4.0 * th * u;
        return (4.0 * u - 2.0 + th) / (1.0 + std::sqrt(std::max(0.0, disc)));
    }
    if (auto* no = std::get_if<NormalParams>(&params_)) {
        return no->mu + no->sigma * standard_normal_quantile(u);
    }
    if (auto* un = std::get_if<UniformParams>(&params_)) {
        return un->lo + u * (un->hi - un->lo);
    }
    const auto& tb = std::get<TabulatedParams>(params_);
    const auto& cum = *tb.cdf_knots;
    const auto it = std::upper_bound(cum.begin(), cum.end(), u);
    std::size_t k = (it == cum.begin()) ? 0 : static_cast<std::size_t>(it - cum.begin()) - 1;
    if (k + 1 >= cum.size()) k = cum.size() - 2;
    const double du = u - cum[k];
    const double h = (*tb.x)[k + 1] - (*tb.x)[k];
    const double dk = (*tb.pdf)[k];
    const double slope = ((*tb.pdf)[k + 1] - dk) / h;
    const double disc = std::max(0.0, dk * dk + 2.0 * slope * du);
    const double denom = dk + std::sqrt(disc);
    double s;
    if (denom > 0.0) {
        s = 2.0 * du / denom;
    } else {
        s = 0.0;  // flat zero-density stretch: left-continuous inverse
    }
    return (*tb.x)[k] + std::clamp(s, 0.0, h);
}

// ---------------------------------------------------------------------------
// Public law of X
// ---------------------------------------------------------------------------

double Marginal::cdf(double x) const {
    return mirrored_ ? 1.0 - base_cdf(-x) : base_cdf(x);
}

double Marginal::density(double x) const {
    return mirrored_ ? base_density(-x) : base_density(x);
}

double Marginal::quantile(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("quantile: u outside (0,1)");
    return mirrored_ ? -base_quantile(1.0 - u) : base_quantile(u);
}

double Marginal::support_lo() const { return lo_; }
double Marginal::support_hi() const { return hi_; }

double Marginal::sign_flip(double u) const { return cdf(-quantile(u)); }

// ---------------------------------------------------------------------------
// Law of |X|
// ---------------------------------------------------------------------------

double Marginal::abs_cdf(double y) const {
    if (y <= 0.0) return 0.0;
    if (auto* se = std::get_if<ShiftedExpParams>(&params_)) {
        if (y <= se->a) return 2.0 * std::exp(-se->lambda * se->a) * std::sinh(se->lambda * y);
        return -std::expm1(-se->lambda * (y + se->a));
    }
    if (std::get_if<LinearParams>(&params_)) {
        return std::min(y, 1.0);  // |X| ~ U[0,1] for every theta
    }
    return std::min(1.0, std::max(0.0, cdf(y) - cdf(-y)));
}

double Marginal::abs_density(double y) const {
    if (y < 0.0) return 0.0;
    return density(y) + density(-y);
}

double Marginal::abs_quantile(double u) const {
    if (u == 0.0) {
        // inf of the |X| support
        if (lo_ >= 0.0) return lo_;
        if (hi_ <= 0.0) return -hi_;
        return 0.0;
    }
    if (u == 1.0 && !abs_unbounded()) return abs_hi_;
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("abs_quantile: u outside (0,1)");

    if (auto* se = std::get_if<ShiftedExpParams>(&params_)) {
        if (u < ua_) return std::asinh(0.5 * u * std::exp(se->lambda * se->a)) / se->lambda;
        return -std::log1p(-u) / se->lambda - se->a;
    }
    if (std::get_if<LinearParams>(&params_)) {
        return u;
    }
    if (auto* no = std::get_if<NormalParams>(&params_)) {
        if (no->mu == 0.0)
            return -no->sigma * standard_normal_quantile(0.5 * (1.0 - u));
        // fall through to the generic inversion
    }
    if (auto* un = std::get_if<UniformParams>(&params_)) {
        const double lo = mirrored_ ? -un->hi : un->lo;
        const double hi = mirrored_ ? -un->lo : un->hi;
        const double w = hi - lo;
        if (lo >= 0.0) return lo + u * w;
        if (hi <= 0.0) return -hi + u * w;
        const double m = std::min(-lo, hi);
        const double um = 2.0 * m / w;
        return (u <= um) ? 0.5 * u * w : u * w - m;
    }

    // Generic monotone inversion of G on [y_min, y_max].
    double ylo = abs_quantile(0.0);
    double yhi = abs_hi_;
    if (!std::isfinite(yhi)) {
        yhi = std::max(std::abs(quantile(1e-15)), std::abs(quantile(1.0 - 1e-15))) + 1.0;
    }
    return invert_monotone([this](double y) { return abs_cdf(y); },
                           [this](double y) { return abs_density(y); }, ylo, yhi, u);
}

double Marginal::abs_quantile_tail(double t) const {
    const double u = -std::expm1(-t);
    if (!abs_unbounded()) return abs_quantile(std::min(u, 1.0));
    if (u < 1.0 - 1e-12) return abs_quantile(u);

    if (auto* se = std::get_if<ShiftedExpParams>(&params_)) {
        return t / se->lambda - se->a;  // -log(1-u) = t exactly
    }
    const auto& no = std::get<NormalParams>(params_);
    // Solve survival(y) = P(|X| > y) = e^{-t} via the complementary cdf,
    // which stays accurate where G itself rounds to 1.
    const double target = std::exp(-t);
    auto survival = [&](double y) {
        const double zp = (y - no.mu) / no.sigma;
        const double zm = (y + no.mu) / no.sigma;
        return 0.5 * std::erfc(zp * M_SQRT1_2) + 0.5 * std::erfc(zm * M_SQRT1_2);
    };
    double ylo = 0.0;
    double yhi = no.sigma * (std::sqrt(2.0 * t) + 3.0) + std::abs(no.mu) + 1.0;
    for (int it = 0; it < 200 && (yhi - ylo) > 1e-13 * std::max(1.0, yhi); ++it) {
        const double mid = 0.5 * (ylo + yhi);
        if (survival(mid) > target) {
            ylo = mid;
        } else {
            yhi = mid;
        }
    }
    return 0.5 * (ylo + yhi);
}

double Marginal::abs_support_hi() const { return abs_hi_; }

bool Marginal::abs_unbounded() const { return !std::isfinite(abs_hi_); }

// ---------------------------------------------------------------------------
// Sign structure
// ---------------------------------------------------------------------------

double Marginal::base_sign_bias(double u) const {
    if (auto* se = std::get_if<ShiftedExpParams>(&params_)) {
        if (u >= ua_) return 1.0;
        const double y = std::asinh(0.5 * u * std::exp(se->lambda * se->a)) / se->lambda;
        return 1.0 / (1.0 + std::exp(2.0 * se->lambda * y));
    }
    if (auto* li = std::get_if<LinearParams>(&params_)) {
        return 0.5 * (1.0 + li->theta * u);
    }
    if (auto* no = std::get_if<NormalParams>(&params_)) {
        const double y = abs_quantile(u);
        const double e = 2.0 * no->mu * y / (no->sigma * no->sigma);
        // logistic(e), stable in both tails
        if (e >= 0.0) return 1.0 / (1.0 + std::exp(-e));
        const double w = std::exp(e);
        return w / (1.0 + w);
    }
    // uniform / tabulated: density ratio at +-y
    const double y = abs_quantile(u);
    const double fp = base_density(y);
    const double fm = base_density(-y);
    if (fp == 0.0 && fm == 0.0)
        throw evaluation_error("sign_bias: both branch densities vanish at an interior level");
    return fp / (fp + fm);
}

double Marginal::sign_bias(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("sign_bias: u outside (0,1)");
    const double p = base_sign_bias(u);
    return mirrored_ ? 1.0 - p : p;
}

double Marginal::sign_threshold() const { return u0_; }
double Marginal::one_branch_level() const { return ua_; }

int Marginal::pinned_sign() const {
    // Computed from the already-mirrored support in the constructor.
    return pinned_sign_;
}

Marginal Marginal::negated() const { return Marginal(params_, !mirrored_); }

bool Marginal::same_law(const Marginal& other) const {
    return mirrored_ == other.mirrored_ && params_ == other.params_;
}

// ---------------------------------------------------------------------------
// Assumption checks
// ---------------------------------------------------------------------------

AssumptionReport Marginal::check_assumptions(int d) const {
    AssumptionReport rep;
    // Unit mass: integrate the density over a core interval and add the
    // cdf mass of the clipped tails, so density and cdf are checked against
    // each other.
    const double eps = 1e-12;
    const double xlo = std::isfinite(lo_) ? lo_ : quantile(eps);
    const double xhi = std::isfinite(hi_) ? hi_ : quantile(1.0 - eps);
    auto dens = [this](double x) { return density(x); };
    const auto qmass = integrate_adaptive(dens, xlo, xhi, 1e-10);
    rep.density_integral = qmass.value + cdf(xlo) + (1.0 - cdf(xhi));

    // E|X|^d = int_0^1 G^{-1}(u)^d du, with the exponential substitution on
    // the top panel when |X| is unbounded.
    auto integrand = [this, d](double u) { return std::pow(abs_quantile(u), d); };
    if (!abs_unbounded()) {
        const auto q = integrate_adaptive(integrand, 0.0, 1.0, 1e-10);
        rep.moment = q.value;
        rep.moment_error_estimate = q.error_estimate;
    } else {
        const double t_cut = 1.0, t_max = 75.0;
        const double u_cut = -std::expm1(-t_cut);
        const auto core = integrate_adaptive(integrand, 0.0, u_cut, 5e-11);
        auto tail = [this, d](double t) {
            return std::pow(abs_quantile_tail(t), d) * std::exp(-t);
        };
        const auto tq = integrate_adaptive(tail, t_cut, t_max, 5e-11);
        rep.moment = core.value + tq.value;
        rep.moment_error_estimate = core.error_estimate + tq.error_estimate +
                                    std::abs(tail(t_max));
    }
    rep.moment_converged =
        rep.moment_error_estimate <= 1e-4 * std::max(1e-300, std::abs(rep.moment));
    return rep;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

nlohmann::json Marginal::to_json() const {
    if (mirrored_)
        throw std::logic_error("negated marginals have no JSON encoding");
    nlohmann::json j;
    if (auto* se = std::get_if<ShiftedExpParams>(&params_)) {
        j["family"] = "shifted_exponential";
        j["lambda"] = se->lambda;
        j["a"] = se->a;
    } else if (auto* li = std::get_if<LinearParams>(&params_)) {
        j["family"] = "linear_density";
        j["theta"] = li->theta;
    } else if (auto* no = std::get_if<NormalParams>(&params_)) {
        j["family"] = "normal";
        j["mu"] = no->mu;
        j["sigma"] = no->sigma;
    } else if (auto* un = std::get_if<UniformParams>(&params_)) {
        j["family"] = "uniform";
        j["lo"] = un->lo;
        j["hi"] = un->hi;
    } else {
        const auto& tb = std::get<TabulatedParams>(params_);
        j["family"] = "tabulated";
        j["x"] = *tb.x;
        j["density"] = *tb.pdf;
    }
    return j;
}

Marginal Marginal::from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("family") || !j["family"].is_string())
        throw spec_error("marginal JSON must be an object with a \"family\" string");
    const std::string fam = j["family"].get<std::string>();
    auto num = [&j](const char* key) {
        if (!j.contains(key) || !j[key].is_number())
            throw spec_error(std::string("marginal JSON missing numeric field \"") + key + "\"");
        return j[key].get<double>();
    };
    if (fam == "shifted_exponential")
        return shifted_exponential(num("lambda"), num("a"));
    if (fam == "linear_density") return linear_density(num("theta"));
    if (fam == "normal") return normal(num("mu"), num("sigma"));
    if (fam == "uniform") return uniform(num("lo"), num("hi"));
    if (fam == "tabulated") {
        if (!j.contains("x") || !j.contains("density") || !j["x"].is_array() ||
            !j["density"].is_array())
            throw spec_error("tabulated marginal JSON requires \"x\" and \"density\" arrays");
        return tabulated(j["x"].get<std::vector<double>>(),
                         j["density"].get<std::vector<double>>());
    }
    throw spec_error("unknown marginal family: " + fam);
}

}  // namespace parity_bounds
