// SPDX-License-Identifier: MIT
#include "parity_bounds/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "parity_bounds/errors.hpp"
#include "parity_bounds/format.hpp"
#include "parity_bounds/parallel.hpp"
#include "parity_bounds/rng.hpp"

namespace parity_bounds {

namespace {

constexpr int kCacheLevels = 4096;
constexpr double kLevelEps = 1e-15;

double clamp_level(double u) { return std::clamp(u, kLevelEps, 1.0 - kLevelEps); }

std::vector<double> bias_vector(std::span<const Marginal> marginals, double u) {
    std::vector<double> p(marginals.size());
    for (std::size_t i = 0; i < marginals.size(); ++i)
        p[i] = marginals[i].sign_bias(clamp_level(u));
    return p;
}

// Closed-form d3 weights with a tiny pull toward the simplex barycenter when
// roundoff leaves the bias vector marginally outside a facet.
WeightProfile robust_d3(std::span<const double> p, Parity parity, double level) {
    try {
        return d3_weights(p, parity, level);
    } catch (const evaluation_error&) {
        std::array<double, 3> q;
        for (int i = 0; i < 3; ++i) q[i] = p[i] + 1e-8 * (0.5 - p[i]);
        return d3_weights(q, parity, level);
    }
}

// Flattens the recursive pivot decomposition into a single profile over
// patterns with the local coordinate 0 as pivot: the level profile is split
// on the pivot sign, each branch recursing until the trivariate closed form.
WeightProfile flatten_pivot0(std::span<const double> p, Parity parity, double level) {
    const int d = static_cast<int>(p.size());
    if (d == 3) return robust_d3(p, parity, level);

    const auto prof = weights_lp(p, parity, level);
    const auto split = recursive_split(prof, 0);

    WeightProfile out;
    out.level = level;
    out.parity = parity;
    if (split.q_plus) {
        const auto sub = flatten_pivot0(*split.q_plus, parity, level);
        for (const auto& e : sub.entries)
            out.entries.push_back(
                {SignPattern(d, e.pattern.mask()), split.pivot_mass * e.weight});
    }
    if (split.q_minus) {
        const auto sub = flatten_pivot0(*split.q_minus, opposite(parity), level);
        for (const auto& e : sub.entries)
            out.entries.push_back({SignPattern(d, (1u << (d - 1)) | e.pattern.mask()),
                                   (1.0 - split.pivot_mass) * e.weight});
    }
    if (out.entries.empty())
        throw evaluation_error("recursive decomposition produced an empty profile");
    return out;
}

// General pivot: reorder the bias vector pivot-first, flatten, and map the
// masks back to the original coordinate layout (restoring lexicographic order).
WeightProfile flatten_pivot(std::span<const double> p, Parity parity, int pivot,
                            double level) {
    const int d = static_cast<int>(p.size());
    if (pivot == 0) return flatten_pivot0(p, parity, level);
    std::vector<double> reordered;
    reordered.reserve(d);
    reordered.push_back(p[pivot]);
    for (int j = 0; j < d; ++j)
        if (j != pivot) reordered.push_back(p[j]);
    auto prof = flatten_pivot0(reordered, parity, level);

    // local position -> original coordinate
    std::vector<int> coord_of(d);
    coord_of[0] = pivot;
    for (int j = 0, r = 1; j < d; ++j)
        if (j != pivot) coord_of[r++] = j;

    for (auto& e : prof.entries) {
        std::uint32_t mask = 0;
        for (int local = 0; local < d; ++local)
            if (e.pattern.sign(local) < 0) mask |= 1u << (d - 1 - coord_of[local]);
        e.pattern = SignPattern(d, mask);
    }
    std::sort(prof.entries.begin(), prof.entries.end(),
              [](const WeightEntry& a, const WeightEntry& b) {
                  return a.pattern.mask() < b.pattern.mask();
              });
    return prof;
}

WeightProfile build_profile(const CouplingSpec& spec, double level) {
    const auto p = bias_vector(spec.marginals, level);
    switch (spec.strategy) {
        case Strategy::closed_form_d3:
            return robust_d3(p, target_parity(spec.target), level);
        case Strategy::lp_weights:
            return weights_lp(p, target_parity(spec.target), level);
        case Strategy::recursive_pivot:
            return flatten_pivot(p, target_parity(spec.target), spec.pivot, level);
    }
    throw std::logic_error("unreachable strategy");
}

struct TrivariateContext {
    double u01 = 0.0;
    double w = 0.0;
    bool positive_branch = false;
    std::array<double, 3> p{};
};

TrivariateContext trivariate_context(std::span<const Marginal> marginals, double u) {
    TrivariateContext ctx;
    ctx.u01 = marginals[0].sign_threshold();
    ctx.positive_branch = u > ctx.u01;
    ctx.w = marginals[0].abs_cdf(std::abs(marginals[0].quantile(u)));
    const double wl = clamp_level(ctx.w);
    for (int i = 0; i < 3; ++i) ctx.p[i] = marginals[i].sign_bias(wl);
    return ctx;
}

double branch_map(const Marginal& m, int sign, double w) {
    const double y = (w <= 0.0) ? m.abs_quantile(0.0) : m.abs_quantile(std::min(w, 1.0 - kLevelEps));
    return m.cdf(sign > 0 ? y : -y);
}

}  // namespace

const char* target_name(Target t) { return t == Target::max ? "max" : "min"; }

const SignPattern& select_pattern(const WeightProfile& profile, double v) {
    double cum = 0.0;
    for (const auto& e : profile.entries) {
        cum += e.weight;
        if (v <= cum) return e.pattern;
    }
    return profile.entries.back().pattern;
}

SignPattern sign_selector(const std::function<WeightProfile(double)>& weights,
                          double u, double v) {
    return select_pattern(weights(u), v);
}

double trivariate_mixing(std::span<const Marginal> marginals, Target target, double u) {
    if (marginals.size() != 3) throw size_error("trivariate_mixing requires d = 3");
    const auto ctx = trivariate_context(marginals, u);
    const auto profile =
        robust_d3(ctx.p, target_parity(target), clamp_level(ctx.w));
    // Active patterns on each branch, in the fixed J=1 / J=0 order.
    std::uint32_t mask_j1, mask_j0;
    if (target == Target::max) {
        mask_j1 = ctx.positive_branch ? 0b000u : 0b101u;  // +++ / -+-
        mask_j0 = ctx.positive_branch ? 0b011u : 0b110u;  // +-- / --+
    } else {
        mask_j1 = ctx.positive_branch ? 0b001u : 0b100u;  // ++- / -++
        mask_j0 = ctx.positive_branch ? 0b010u : 0b111u;  // +-+ / ---
    }
    double w1 = 0.0, w0 = 0.0;
    for (const auto& e : profile.entries) {
        if (e.pattern.mask() == mask_j1) w1 = e.weight;
        if (e.pattern.mask() == mask_j0) w0 = e.weight;
    }
    if (w1 + w0 <= 0.0) return 1.0;  // inactive branch convention
    return w1 / (w1 + w0);
}

std::array<double, 3> trivariate_copula(std::span<const Marginal> marginals,
                                        Target target, double u, double v) {
    if (marginals.size() != 3) throw size_error("trivariate_copula requires d = 3");
    const auto ctx = trivariate_context(marginals, u);
    const double s = trivariate_mixing(marginals, target, u);
    const bool j = v <= s;

    const int sign2 = j ? +1 : -1;
    // Maximizer: coordinate 3 matches coordinate 2's branch on the positive
    // side of the junction and opposes it on the negative side; the
    // minimizer interchanges the two cases.
    const bool match = (target == Target::max) == ctx.positive_branch;
    const int sign3 = match ? sign2 : -sign2;

    return {u, branch_map(marginals[1], sign2, ctx.w), branch_map(marginals[2], sign3, ctx.w)};
}

std::vector<double> recursive_coupling(std::span<const Marginal> marginals,
                                       Target target, int pivot, double u, double v) {
    const int d = static_cast<int>(marginals.size());
    if (d < 4) throw size_error("recursive_coupling requires d >= 4");
    if (pivot < 0 || pivot >= d) throw std::domain_error("recursive_coupling: pivot out of range");

    const auto& mp = marginals[pivot];
    const double w = mp.abs_cdf(std::abs(mp.quantile(u)));
    const bool positive = u > mp.sign_threshold();

    std::vector<double> p(d);
    for (int i = 0; i < d; ++i) p[i] = marginals[i].sign_bias(clamp_level(w));
    const auto profile = flatten_pivot(p, target_parity(target), pivot, clamp_level(w));

    // Condition on the pivot sign fixed by u, then select within the branch.
    WeightProfile branch;
    branch.level = profile.level;
    branch.parity = profile.parity;
    double mass = 0.0;
    for (const auto& e : profile.entries) {
        if ((e.pattern.sign(pivot) > 0) == positive) {
            branch.entries.push_back(e);
            mass += e.weight;
        }
    }
    if (branch.entries.empty() || mass <= 0.0)
        throw evaluation_error("recursive_coupling: level inconsistent with the pivot sign");
    for (auto& e : branch.entries) e.weight /= mass;
    const auto& pat = select_pattern(branch, v);

    std::vector<double> out(d);
    out[pivot] = u;
    for (int jx = 0; jx < d; ++jx) {
        if (jx == pivot) continue;
        out[jx] = branch_map(marginals[jx], pat.sign(jx), w);
    }
    return out;
}

// ---------------------------------------------------------------------------
// ExtremalCoupling
// ---------------------------------------------------------------------------

ExtremalCoupling::ExtremalCoupling(CouplingSpec spec, FeasibilityReport rep)
    : spec_(std::move(spec)), report_(std::move(rep)) {}

ExtremalCoupling ExtremalCoupling::build(CouplingSpec spec) {
    const int d = static_cast<int>(spec.marginals.size());
    if (d < 2) throw spec_error("coupling requires d >= 2");
    if (spec.strategy == Strategy::closed_form_d3 && d != 3)
        throw spec_error("closed_form_d3 strategy requires d = 3");
    if (spec.strategy == Strategy::recursive_pivot && d < 4)
        throw spec_error("recursive_pivot strategy requires d >= 4");
    if (spec.strategy == Strategy::recursive_pivot && (spec.pivot < 0 || spec.pivot >= d))
        throw spec_error("pivot index out of range");
    if (spec.strategy == Strategy::lp_weights && d > 14)
        throw size_error("lp_weights strategy supports d <= 14");

    auto rep = feasibility(spec.marginals, target_parity(spec.target), spec.feasibility_grid);
    if (!rep.sharp)
        throw infeasible_error(std::string("target ") + target_name(spec.target) +
                                   " is not attainable for these marginals",
                               std::move(rep));

    ExtremalCoupling c(std::move(spec), std::move(rep));
    if (c.spec_.strategy != Strategy::closed_form_d3) {
        c.cache_.reserve(kCacheLevels);
        for (int j = 0; j < kCacheLevels; ++j)
            c.cache_.push_back(build_profile(c.spec_, (j + 0.5) / kCacheLevels));
    }
    return c;
}

WeightProfile ExtremalCoupling::profile_at(double u) const {
    if (spec_.strategy == Strategy::closed_form_d3) return build_profile(spec_, u);
    const int j = std::clamp(static_cast<int>(u * kCacheLevels), 0, kCacheLevels - 1);
    WeightProfile prof = cache_[j];
    prof.level = u;
    return prof;
}

SampleBatch ExtremalCoupling::sample(int n) const {
    const int d = static_cast<int>(spec_.marginals.size());
    SampleBatch batch;
    batch.n = n;
    batch.d = d;
    batch.u.resize(n);
    batch.v.resize(n);
    batch.patterns.resize(n);
    batch.x.resize(static_cast<std::size_t>(n) * d);
    if (n == 0) return batch;

    const CounterRng rng(spec_.seed);
    constexpr int kBlock = 8192;
    const std::size_t blocks = (static_cast<std::size_t>(n) + kBlock - 1) / kBlock;
    parallel_for(blocks, [&](std::size_t blk) {
        const int row_lo = static_cast<int>(blk) * kBlock;
        const int row_hi = std::min(n, row_lo + kBlock);
        for (int k = row_lo; k < row_hi; ++k) {
            const auto [uk, vk] = rng.row_uniforms(static_cast<std::uint64_t>(k));
            batch.u[k] = uk;
            batch.v[k] = vk;
            WeightProfile prof;
            if (spec_.strategy == Strategy::closed_form_d3) {
                prof = build_profile(spec_, uk);
            } else {
                const int j = std::clamp(static_cast<int>(uk * kCacheLevels), 0, kCacheLevels - 1);
                prof = cache_[j];
            }
            const auto& pat = select_pattern(prof, vk);
            batch.patterns[k] = pat.mask();
            for (int i = 0; i < d; ++i) {
                const double y = spec_.marginals[i].abs_quantile(uk);
                batch.x[static_cast<std::size_t>(k) * d + i] = pat.sign(i) * y;
            }
        }
    });
    return batch;
}

SampleBatch sample(const CouplingSpec& spec, int n) {
    return ExtremalCoupling::build(spec).sample(n);
}

void SampleBatch::write_csv(std::ostream& os) const {
    os << "u,v,pattern";
    for (int i = 1; i <= d; ++i) os << ",x" << i;
    os << "\n";
    for (int k = 0; k < n; ++k) {
        os << format_double(u[k]) << ',' << format_double(v[k]) << ','
           << pattern(k).to_string();
        for (int i = 0; i < d; ++i) os << ',' << format_double(value(k, i));
        os << "\n";
    }
}

// ---------------------------------------------------------------------------
// Support curves
// ---------------------------------------------------------------------------

std::vector<SupportCurve> support_curves(std::span<const Marginal> marginals,
                                         Target target, int grid) {
    if (marginals.size() != 3) throw size_error("support_curves requires d = 3");
    if (grid < 2) throw spec_error("support_curves grid must be >= 2");
    const double u01 = marginals[0].sign_threshold();
    const std::array<double, 3> junction = {u01, marginals[1].sign_threshold(),
                                            marginals[2].sign_threshold()};

    struct Leg {
        std::uint32_t mask;
        bool positive_branch;  // active for u > u01
        bool j_one;            // weight s(u) rather than 1 - s(u)
    };
    std::array<Leg, 4> legs;
    if (target == Target::max) {
        legs = {Leg{0b000, true, true}, Leg{0b011, true, false}, Leg{0b101, false, true},
                Leg{0b110, false, false}};
    } else {
        legs = {Leg{0b001, true, true}, Leg{0b010, true, false}, Leg{0b100, false, true},
                Leg{0b111, false, false}};
    }

    std::vector<SupportCurve> curves;
    curves.reserve(4);
    for (const auto& leg : legs) {
        SupportCurve curve{SignPattern(3, leg.mask), {}, {}};
        curve.u_grid.push_back(u01);
        curve.points.push_back(junction);
        const double lo = leg.positive_branch ? u01 : kLevelEps;
        const double hi = leg.positive_branch ? 1.0 - 1e-9 : u01;
        for (int k = 1; k <= grid; ++k) {
            double uu;
            if (leg.positive_branch) {
                uu = lo + (hi - lo) * k / grid;
            } else {
                uu = hi - (hi - lo) * k / grid;  // walk away from the junction
            }
            const double s = trivariate_mixing(marginals, target, uu);
            const double weight = leg.j_one ? s : 1.0 - s;
            if (weight <= 1e-12) break;  // leg terminates where its mass dies
            const auto& m0 = marginals[0];
            const double w = m0.abs_cdf(std::abs(m0.quantile(uu)));
            curve.u_grid.push_back(uu);
            curve.points.push_back({uu, branch_map(marginals[1], curve.pattern.sign(1), w),
                                    branch_map(marginals[2], curve.pattern.sign(2), w)});
        }
        curves.push_back(std::move(curve));
    }
    return curves;
}

void write_support_csv(std::ostream& os, const std::vector<SupportCurve>& curves) {
    os << "pattern,u,U1,U2,U3\n";
    for (const auto& c : curves) {
        for (std::size_t k = 0; k < c.points.size(); ++k) {
            os << c.pattern.to_string() << ',' << format_double(c.u_grid[k]) << ','
               << format_double(c.points[k][0]) << ',' << format_double(c.points[k][1])
               << ',' << format_double(c.points[k][2]) << "\n";
        }
    }
}

// ---------------------------------------------------------------------------
// Analytic fixtures
// ---------------------------------------------------------------------------

MixingFixture analytic_mixing_fixture(std::span<const Marginal> marginals, Target target) {
    if (marginals.size() != 3) throw size_error("analytic fixtures cover d = 3");
    for (std::size_t i = 1; i < marginals.size(); ++i)
        if (!marginals[i].same_law(marginals[0]))
            throw evaluation_error("analytic fixtures require identical marginals");
    const auto& m = marginals[0];

    MixingFixture fx;
    fx.u0 = m.sign_threshold();
    fx.ua = m.one_branch_level();

    if (m.family() == Family::shifted_exponential && !m.is_negated()) {
        if (target != Target::max)
            throw evaluation_error("shifted-exponential fixture covers the maximizer only");
        // lambda recovered from the quantile; c = e^{-2 lambda a}
        const double a = -m.support_lo();
        const double lambda = -std::log1p(-m.sign_threshold()) / a;
        const double c = std::exp(-2.0 * lambda * a);
        const double u0 = fx.u0, ua = fx.ua;
        fx.s = [c, u0, ua](double u) {
            if (u <= u0) return 0.5;
            if (u <= ua) return 1.0 - 0.5 * c / ((1.0 - u) * (1.0 - u));
            return 1.0;
        };
        fx.tau = [c, ua](double u) {
            if (u > ua) return u;
            return 1.0 - c / (1.0 - u);
        };
        return fx;
    }

    if (m.family() == Family::normal && !m.is_negated()) {
        const double mu = m.quantile(0.5);
        const double sigma = (m.quantile(standard_normal_cdf(1.0)) - mu);
        const double ratio = mu / sigma;
        auto r = [ratio](double u) {
            return std::exp(-2.0 * ratio * standard_normal_quantile(u) - 2.0 * ratio * ratio);
        };
        const double u0 = fx.u0;
        if (target == Target::max) {
            if (mu < 0.0) throw evaluation_error("normal maximizer fixture requires mu >= 0");
            fx.s = [r, u0](double u) { return u <= u0 ? 0.5 : 1.0 - 0.5 * r(u); };
        } else {
            if (mu > 0.0) throw evaluation_error("normal minimizer fixture requires mu <= 0");
            // General-convention mixing: the J = 1 branch keeps coordinate 2
            // on h^+, so on the negative side the closed form is r(u)/2.
            fx.s = [r, u0](double u) { return u <= u0 ? 0.5 * r(u) : 0.5; };
        }
        fx.tau = [ratio](double u) {
            return standard_normal_cdf(-standard_normal_quantile(u) - 2.0 * ratio);
        };
        return fx;
    }

    throw evaluation_error("no analytic mixing fixture for this family");
}

}  // namespace parity_bounds
