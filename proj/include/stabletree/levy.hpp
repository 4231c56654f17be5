#pragma once

// Spectrally positive stable process normalized by E exp(-l X_t) = exp(t l^a)
// for a in (1, 2]: exact marginal sampling (Chambers-Mallows-Stuck), the
// marginal density and cdf by Fourier inversion, grid discretization, bridges
// and excursions, and the eps-jump-count estimators of the height process and
// of the local time at the supremum.
//
// At a = 2 the process is sqrt(2) times a standard Brownian motion, X_1 is
// N(0, 2), and closed forms replace both the inversion integrals and the jump
// counts (H = X - I, L = S).

#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "stabletree/detail/quadrature.hpp"
#include "stabletree/grid_path.hpp"
#include "stabletree/rng.hpp"
#include "stabletree/sampler.hpp"

namespace stabletree {

class StableLevy {
public:
    explicit StableLevy(double alpha) : alpha_(alpha) {
        if (!(alpha > 1.0) || alpha > 2.0) throw std::invalid_argument("levy: alpha must lie in (1, 2]");
    }

    double alpha() const { return alpha_; }

    // One draw of X_1.
    double sample_standard(RandomStream& rng) const {
        if (alpha_ == 2.0) return std::sqrt(2.0) * rng.normal();
        const double pi = std::numbers::pi;
        const double shift = pi / 2.0 - pi / alpha_;
        double v = pi * (rng.uniform() - 0.5);
        double w = rng.exponential();
        double av = alpha_ * (v + shift);
        return std::sin(av) / std::pow(std::cos(v), 1.0 / alpha_) *
               std::pow(std::cos(v - av) / w, (1.0 - alpha_) / alpha_);
    }

    double sample_increment(double dt, RandomStream& rng) const {
        return std::pow(dt, 1.0 / alpha_) * sample_standard(rng);
    }

    GridPath sample_path(double horizon, std::int64_t steps, RandomStream& rng) const {
        if (steps < 1) throw std::invalid_argument("levy: need at least one step");
        GridPath p;
        p.dt = horizon / double(steps);
        p.values.assign(static_cast<std::size_t>(steps) + 1, 0.0);
        double scale = std::pow(p.dt, 1.0 / alpha_);
        for (std::int64_t k = 1; k <= steps; ++k)
            p.values[k] = p.values[k - 1] + scale * sample_standard(rng);
        return p;
    }

    // Density of X_1 by Fourier inversion, valid for every a in (1, 2]:
    // (1/pi) int_0^inf exp(u^a c) cos(u^a s + u x) du, c = cos(pi a / 2) < 0,
    // s = sin(pi a / 2).
    double density_by_inversion(double x) const {
        const double c = std::cos(std::numbers::pi * alpha_ / 2.0);
        const double s = std::sin(std::numbers::pi * alpha_ / 2.0);
        const double upper = std::pow(45.0 / -c, 1.0 / alpha_);
        double val = detail::integrate(
            [&](double u) { return std::exp(std::pow(u, alpha_) * c) * std::cos(std::pow(u, alpha_) * s + u * x); },
            0.0, upper, 1e-11);
        return val / std::numbers::pi;
    }

    double density(double x) const {
        if (alpha_ == 2.0) return std::exp(-x * x / 4.0) / std::sqrt(4.0 * std::numbers::pi);
        return density_by_inversion(x);
    }

    // cdf of X_1 (Gil-Pelaez):  1/2 + (1/pi) int_0^inf exp(u^a c)
    // sin(u x + u^a s) / u du.
    double cdf_by_inversion(double x) const {
        const double c = std::cos(std::numbers::pi * alpha_ / 2.0);
        const double s = std::sin(std::numbers::pi * alpha_ / 2.0);
        const double upper = std::pow(45.0 / -c, 1.0 / alpha_);
        double val = detail::integrate(
            [&](double u) {
                if (u == 0.0) return x;
                return std::exp(std::pow(u, alpha_) * c) * std::sin(u * x + std::pow(u, alpha_) * s) / u;
            },
            0.0, upper, 1e-11);
        return 0.5 + val / std::numbers::pi;
    }

    double cdf(double x) const {
        if (alpha_ == 2.0) return 0.5 * std::erfc(-x / 2.0);
        return cdf_by_inversion(x);
    }

    // Density and cdf of X_t by self-similarity.
    double density_at(double t, double x) const {
        if (!(t > 0.0)) throw std::invalid_argument("levy: density_at needs t > 0");
        double r = std::pow(t, -1.0 / alpha_);
        return r * density(r * x);
    }
    double cdf_at(double t, double x) const {
        if (!(t > 0.0)) throw std::invalid_argument("levy: cdf_at needs t > 0");
        return cdf(std::pow(t, -1.0 / alpha_) * x);
    }

private:
    double alpha_;
};

// Expected jump count per unit height, beta_eps = a / (Gamma(2-a) eps^(a-1)).
inline double ladder_rate(double alpha, double eps) {
    return alpha / (std::tgamma(2.0 - alpha) * std::pow(eps, alpha - 1.0));
}

// Default jump threshold c n^{-1/(2a)}: vanishes, but slower than the grid
// increment scale n^{-1/a}, so jump detection stays meaningful.
inline double default_resolution(double alpha, std::int64_t n) {
    return std::pow(double(n), -1.0 / (2.0 * alpha));
}

// Jump count behind the height estimator at a single grid time: steps
// j -> j+1 with increment above eps whose pre-jump value lies strictly below
// the minimum over [j+1, t].  Quadratic sweep, kept as the reference
// implementation for the stack version below.
inline std::int64_t straddle_count(const std::vector<double>& x, std::int64_t t, double eps) {
    if (t < 0 || t >= static_cast<std::int64_t>(x.size())) throw std::invalid_argument("straddle_count: index out of range");
    std::int64_t count = 0;
    double m = x[static_cast<std::size_t>(t)];
    for (std::int64_t j = t - 1; j >= 0; --j) {
        if (x[static_cast<std::size_t>(j)] < m && x[static_cast<std::size_t>(j) + 1] - x[static_cast<std::size_t>(j)] > eps) ++count;
        m = std::min(m, x[static_cast<std::size_t>(j)]);
    }
    return count;
}

// Height process estimate at every grid time: H_t = (1/beta_eps) Card{u <= t:
// increment at u exceeds eps, pre-jump value below the future infimum}.  The
// records are maintained by a monotone stack (pop when the new value reaches
// a stored pre-jump level), so the sweep is O(n) amortized.  At a = 2 the
// exact identity H = X - I replaces the count.
inline GridPath height_estimate(const GridPath& x, double eps, double alpha) {
    GridPath h;
    h.dt = x.dt;
    h.values.assign(x.values.size(), 0.0);
    if (x.values.empty()) throw std::invalid_argument("height_estimate: empty path");
    if (alpha == 2.0) {
        double run = x.values[0];
        for (std::size_t k = 0; k < x.values.size(); ++k) {
            run = std::min(run, x.values[k]);
            h.values[k] = x.values[k] - run;
        }
        return h;
    }
    if (!(eps > 0.0)) throw std::invalid_argument("height_estimate: eps must be positive for alpha < 2");
    const double rate = ladder_rate(alpha, eps);
    std::vector<std::pair<double, bool>> stack;  // (pre-jump value, counted)
    std::int64_t big = 0;
    for (std::size_t k = 1; k < x.values.size(); ++k) {
        const double cur = x.values[k];
        while (!stack.empty() && stack.back().first >= cur) {
            big -= stack.back().second ? 1 : 0;
            stack.pop_back();
        }
        const double prev = x.values[k - 1];
        if (cur > prev) {
            bool counted = (cur - prev) > eps;
            stack.emplace_back(prev, counted);
            big += counted ? 1 : 0;
        }
        h.values[k] = double(big) / rate;
    }
    return h;
}

// Local time at the supremum: L_t = (1/beta_eps) Card{s <= t: new running
// supremum reached by an increment above eps}; the running supremum itself
// at a = 2.
inline GridPath local_time_estimate(const GridPath& x, double eps, double alpha) {
    GridPath l;
    l.dt = x.dt;
    l.values.assign(x.values.size(), 0.0);
    if (x.values.empty()) throw std::invalid_argument("local_time_estimate: empty path");
    if (alpha == 2.0) {
        double run = x.values[0];
        for (std::size_t k = 0; k < x.values.size(); ++k) {
            run = std::max(run, x.values[k]);
            l.values[k] = run;
        }
        return l;
    }
    if (!(eps > 0.0)) throw std::invalid_argument("local_time_estimate: eps must be positive for alpha < 2");
    const double rate = ladder_rate(alpha, eps);
    double sup = x.values[0];
    std::int64_t count = 0;
    for (std::size_t k = 1; k < x.values.size(); ++k) {
        if (x.values[k] > sup && x.values[k] - x.values[k - 1] > eps) ++count;
        sup = std::max(sup, x.values[k]);
        l.values[k] = double(count) / rate;
    }
    return l;
}

// Grid time-reversal dual: Y_k = X_n - X_{n-k}.
inline GridPath dual_path(const GridPath& p) {
    GridPath d;
    d.dt = p.dt;
    const std::size_t n = p.values.size() - 1;
    d.values.resize(p.values.size());
    for (std::size_t k = 0; k <= n; ++k) d.values[k] = p.values[n] - p.values[n - k];
    return d;
}

// Rotation at the first global minimum; the wrapped tail is lifted by the
// path's end value.  A path whose minimum is first attained at the endpoint
// is returned unchanged.  On integer-valued grid paths this coincides with
// the lattice rotation step for step.
inline GridPath vervaat_continuous(const GridPath& p) {
    if (p.values.empty()) throw std::invalid_argument("vervaat_continuous: empty path");
    const std::int64_t n = static_cast<std::int64_t>(p.values.size()) - 1;
    std::int64_t g = 0;
    for (std::int64_t j = 1; j <= n; ++j)
        if (p.values[static_cast<std::size_t>(j)] < p.values[static_cast<std::size_t>(g)]) g = j;
    GridPath out;
    out.dt = p.dt;
    out.values.resize(p.values.size());
    const double vg = p.values[static_cast<std::size_t>(g)];
    const double end = p.values[static_cast<std::size_t>(n)];
    for (std::int64_t j = 0; j <= n; ++j)
        out.values[static_cast<std::size_t>(j)] =
            j <= n - g ? p.values[static_cast<std::size_t>(g + j)] - vg
                       : p.values[static_cast<std::size_t>(j - (n - g))] + end - vg;
    return out;
}

// Value rotation with period n at the first strict minimum, no terminal
// correction.  This is the transform for sequences that are not bridges,
// e.g. the ladder complement plus estimated height: such a sum starts at a
// positive level and vanishes at the bridge minimum, so wrapping increments
// would inject the endpoint defect into the rotated tail.
inline GridPath cyclic_shift_values(const GridPath& p) {
    if (p.values.empty()) throw std::invalid_argument("cyclic_shift_values: empty path");
    const std::size_t n = p.values.size() - 1;
    std::size_t g = 0;
    for (std::size_t j = 1; j <= n; ++j)
        if (p.values[j] < p.values[g]) g = j;
    GridPath out;
    out.dt = p.dt;
    out.values.resize(p.values.size());
    const double vg = p.values[g];
    for (std::size_t j = 0; j <= n; ++j)
        out.values[j] = p.values[g + j <= n ? g + j : g + j - n] - vg;
    return out;
}

// Grid bridge of the stable process on [0, 1].  The walk method draws the
// conditioned lattice bridge of a matched critical offspring law at p = n and
// rescales by 1/a_p (exact conditioning; endpoint -1/a_p).  The chaumont
// method draws an unconditioned path, locates the last grid time whose value
// sits within one increment scale of 0 with a sign change bracketing it (the
// grid surrogate of the last passage at the origin), and rescales the path
// before it by self-similarity.
class LevyBridge {
public:
    static LevyBridge walk(const OffspringLaw& law, std::int64_t n) {
        LevyBridge b;
        b.alpha_ = law.stable_index();
        b.n_ = n;
        b.walk_ = true;
        b.scale_ = law.scaling(n);
        b.sampler_ = std::make_shared<BridgeSampler>(law, n);
        return b;
    }

    static LevyBridge chaumont(double alpha, std::int64_t n) {
        LevyBridge b;
        b.alpha_ = alpha;
        b.n_ = n;
        b.walk_ = false;
        return b;
    }

    double alpha() const { return alpha_; }
    std::int64_t grid() const { return n_; }
    const BridgeSampler* lattice_sampler() const { return sampler_.get(); }

    GridPath sample(RandomStream& rng) const {
        GridPath out;
        out.dt = 1.0 / double(n_);
        out.values.resize(static_cast<std::size_t>(n_) + 1);
        if (walk_) {
            Path w = sampler_->sample(rng);
            for (std::int64_t k = 0; k <= n_; ++k)
                out.values[static_cast<std::size_t>(k)] = double(w[static_cast<std::size_t>(k)]) / scale_;
            return out;
        }
        StableLevy levy(alpha_);
        const double thr = std::pow(out.dt, 1.0 / alpha_);
        for (;;) {
            GridPath raw = levy.sample_path(1.0, n_, rng);
            std::int64_t g = -1;
            for (std::int64_t k = n_; k >= 1; --k) {
                const double v = raw.values[static_cast<std::size_t>(k)];
                if (std::abs(v) > thr) continue;
                bool left = (raw.values[static_cast<std::size_t>(k) - 1] < 0.0) != (v < 0.0);
                bool right = k < n_ && (raw.values[static_cast<std::size_t>(k) + 1] < 0.0) != (v < 0.0);
                if (left || right) {
                    g = k;
                    break;
                }
            }
            if (g < 1) continue;  // no zero-ish passage located; redraw
            const double lift = std::pow(double(g) / double(n_), -1.0 / alpha_);
            for (std::int64_t j = 0; j <= n_; ++j) {
                std::int64_t idx = (g * j + n_ / 2) / n_;
                out.values[static_cast<std::size_t>(j)] = lift * raw.values[static_cast<std::size_t>(idx)];
            }
            return out;
        }
    }

private:
    double alpha_ = 2.0;
    std::int64_t n_ = 1;
    bool walk_ = true;
    double scale_ = 1.0;
    std::shared_ptr<const BridgeSampler> sampler_;
};

// Normalized excursion: the continuous rotation of a bridge draw.
inline GridPath excursion_path(const LevyBridge& bridge, RandomStream& rng) {
    return vervaat_continuous(bridge.sample(rng));
}

// Ladder-complement pair of a bridge: B on the level grid of -I (one level
// per running-minimum record, increasing), and M_t = B at level -I_t.  For
// a < 2, B_x = L_1(dual) - L_{T_x}(dual) with L the local-time estimate and
// T_x the first passage of the dual above x; at a = 2 the closed forms
// B_x = (-x - I_1)+ and M_t = I_t - I_1.
struct BridgeLadder {
    std::vector<double> levels;  // increasing, levels[0] = 0
    std::vector<double> b;       // B at each level
    GridPath m;
};

inline BridgeLadder b_and_m(const GridPath& bridge, double eps, double alpha) {
    const std::size_t n1 = bridge.values.size();
    if (n1 < 2) throw std::invalid_argument("b_and_m: empty bridge");
    BridgeLadder out;
    out.m.dt = bridge.dt;
    out.m.values.assign(n1, 0.0);

    // running-minimum levels of the bridge
    std::vector<std::size_t> rec_at(n1, 0);  // level index in force at each grid time
    double run = bridge.values[0];
    out.levels.push_back(0.0);
    for (std::size_t k = 1; k < n1; ++k) {
        if (bridge.values[k] < run) {
            run = bridge.values[k];
            out.levels.push_back(-run);
        }
        rec_at[k] = out.levels.size() - 1;
    }

    if (alpha == 2.0) {
        // B_x = (-x - I_1)+ with I_1 the final infimum = -levels.back()
        const double neg_i1 = out.levels.back();
        out.b.resize(out.levels.size());
        for (std::size_t i = 0; i < out.levels.size(); ++i) out.b[i] = std::max(0.0, neg_i1 - out.levels[i]);
        for (std::size_t k = 0; k < n1; ++k) out.m.values[k] = out.b[rec_at[k]];
        return out;
    }

    GridPath dual = dual_path(bridge);
    GridPath lhat = local_time_estimate(dual, eps, alpha);
    const double l1 = lhat.values.back();
    out.b.assign(out.levels.size(), 0.0);
    std::size_t k = 0;
    double dual_max = dual.values[0];
    for (std::size_t i = 0; i < out.levels.size(); ++i) {
        while (k + 1 < n1 && dual_max < out.levels[i]) {
            ++k;
            dual_max = std::max(dual_max, dual.values[k]);
        }
        // The ladder mass above a level starts at the step that crosses it,
        // so a crossing record belongs to B.  When the dual never reaches the
        // level (bridge top: the dual tops out one endpoint short), the whole
        // ladder count has been spent and B is exactly zero.
        out.b[i] = dual_max >= out.levels[i] ? l1 - lhat.values[k > 0 ? k - 1 : 0]
                                             : l1 - lhat.values[k];
    }
    for (std::size_t t = 0; t < n1; ++t) out.m.values[t] = out.b[rec_at[t]];
    return out;
}

struct NormalizedExcursion {
    std::vector<double> values;  // grid+1 values on [0, 1], values[0] = 0
    double duration;             // length of the raw straddling interval
};

// Excursion of X - I straddling time 1, rescaled to duration 1 by
// e(s) = (X(g + s(d-g)) - X(g)) / (d-g)^(1/a).  The normalized shape is
// independent of the duration, so rejecting on d > horizon or on too-short
// excursions does not bias it.  Reads values piecewise-constantly off a raw
// grid of resolution raw_dt; this is the only discretization error.
inline NormalizedExcursion sample_normalized_excursion(const StableLevy& levy, std::int64_t grid,
                                                       double horizon, double raw_dt,
                                                       double min_duration, RandomStream& rng) {
    if (horizon <= 1.0) throw std::invalid_argument("excursion: horizon must exceed 1");
    const std::int64_t steps = static_cast<std::int64_t>(std::ceil(horizon / raw_dt));
    const double scale = std::pow(raw_dt, 1.0 / levy.alpha());
    std::vector<double> x(static_cast<std::size_t>(steps) + 1);
    for (;;) {
        x[0] = 0.0;
        for (std::int64_t k = 1; k <= steps; ++k) x[k] = x[k - 1] + scale * levy.sample_standard(rng);

        // Infimum-visit indices around time 1.
        const std::int64_t one = static_cast<std::int64_t>(std::llround(1.0 / raw_dt));
        std::int64_t g = 0;
        double run_min = 0.0;
        for (std::int64_t k = 1; k <= one; ++k)
            if (x[k] < run_min) {
                run_min = x[k];
                g = k;
            }
        std::int64_t d = -1;
        for (std::int64_t k = one + 1; k <= steps; ++k)
            if (x[k] < run_min) {
                d = k;
                break;
            }
        if (d < 0) continue;  // excursion not finished by the horizon
        double duration = double(d - g) * raw_dt;
        if (duration < min_duration) continue;

        NormalizedExcursion e;
        e.duration = duration;
        e.values.resize(static_cast<std::size_t>(grid) + 1);
        double h = std::pow(duration, -1.0 / levy.alpha());
        for (std::int64_t k = 0; k <= grid; ++k) {
            std::int64_t idx = g + (d - g) * k / grid;
            e.values[k] = h * (x[idx] - x[g]);
        }
        return e;
    }
}

// Durations of the maximal excursion intervals of X - I over the whole path:
// gaps between successive strict running-minimum times.  The point process of
// these durations is proportional to the excursion measure, so tail counts
// carry its exponent.
inline std::vector<double> excursion_durations(const GridPath& x) {
    std::vector<double> out;
    double run = x.values[0];
    std::int64_t last = 0;
    for (std::size_t k = 1; k < x.values.size(); ++k) {
        if (x.values[k] < run) {
            run = x.values[k];
            out.push_back(double(static_cast<std::int64_t>(k) - last) * x.dt);
            last = static_cast<std::int64_t>(k);
        }
    }
    return out;
}

}  // namespace stabletree
