#pragma once

// Exact sampling of the offspring walk bridge (0 to -1 in p steps, steps
// >= -1) by dyadic midpoint splitting, and of the size-conditioned tree via
// the rotation at the first minimum.
//
// For every segment length m in the halving set of p, the row f_m(x) =
// P(W_m = x) is precomputed on the window x in [-m, p-1-m].  The window is
// exact: a step of a length-p bridge never exceeds p-2, so any sub-segment
// displacement lies in the window, and (by induction) so does every dyadic
// midpoint.  Rows are built bottom-up by convolution and kept raw, so the
// midpoint law  P(mid = j) = f_l(j-a) f_r(b-j) / f_m(b-a)  uses the parent
// row value as its normalizer.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stabletree/detail/fft.hpp"
#include "stabletree/lattice_path.hpp"
#include "stabletree/offspring.hpp"
#include "stabletree/ordered_tree.hpp"
#include "stabletree/rng.hpp"

namespace stabletree {

class BridgeSampler {
public:
    BridgeSampler(const OffspringLaw& law, std::int64_t p) : law_(law), p_(p) {
        if (p < 1) throw std::invalid_argument("bridge sampler: p must be positive");
        std::vector<double> base(static_cast<std::size_t>(p_), 0.0);
        auto nu = law.step_pmf_table(p_ - 1);  // steps -1 .. p-2
        for (std::int64_t s = -1; s <= p_ - 2; ++s) base[s + 1] = nu[s + 1];
        rows_[1] = std::move(base);
        build_row(p_);
        if (row_value(p_, -1) <= 0.0)
            throw std::invalid_argument("bridge sampler: size " + std::to_string(p_) + " has zero mass under this law");
    }

    std::int64_t progeny() const { return p_; }
    const OffspringLaw& law() const { return law_; }

    // f_m(x); zero outside the window.  Builds the row if absent.
    double row_value(std::int64_t m, std::int64_t x) {
        const auto& r = row(m);
        if (x < -m || x > p_ - 1 - m) return 0.0;
        return r[static_cast<std::size_t>(x + m)];
    }

    const std::vector<double>& row(std::int64_t m) {
        build_row(m);
        return rows_.at(m);
    }

    // Thread-safe once the needed rows exist (sampling touches only the
    // halving set of p, built in the constructor).
    Path sample(RandomStream& rng) const {
        Path w(static_cast<std::size_t>(p_) + 1, 0);
        w[p_] = -1;
        fill_segment(w, 0, p_, rng);
        return w;
    }

    double log_end_mass() const { return std::log(rows_.at(p_)[static_cast<std::size_t>(p_ - 1)]); }

    double log_path_probability(const Path& w) const {
        double s = 0.0;
        for (std::size_t k = 0; k + 1 < w.size(); ++k) {
            double q = law_.pmf_double(w[k + 1] - w[k] + 1);
            if (q <= 0.0) return -std::numeric_limits<double>::infinity();
            s += std::log(q);
        }
        return s;
    }

private:
    double value_or_zero(const std::vector<double>& r, std::int64_t m, std::int64_t x) const {
        if (x < -m || x > p_ - 1 - m) return 0.0;
        return r[static_cast<std::size_t>(x + m)];
    }

    void build_row(std::int64_t m) {
        if (rows_.count(m)) return;
        std::int64_t l = m / 2, r = m - l;
        build_row(l);
        build_row(r);
        auto conv = detail::convolve(rows_.at(l), rows_.at(r));
        conv.resize(static_cast<std::size_t>(p_));  // keep x in [-m, p-1-m]
        rows_[m] = std::move(conv);
    }

    void fill_segment(Path& w, std::int64_t lo, std::int64_t hi, RandomStream& rng) const {
        std::int64_t m = hi - lo;
        if (m <= 1) return;
        std::int64_t l = m / 2, r = m - l;
        const auto& fl = rows_.at(l);
        const auto& fr = rows_.at(r);
        const std::int64_t a = w[lo], b = w[hi];

        std::int64_t jmin = std::max(a - l, b - (p_ - 1 - r));
        std::int64_t jmax = std::min(a + (p_ - 1 - l), b + r);
        std::int64_t j0 = a + std::llround(double(b - a) * double(l) / double(m));
        j0 = std::clamp(j0, jmin, jmax);

        auto weight = [&](std::int64_t j) {
            return value_or_zero(fl, l, j - a) * value_or_zero(fr, r, b - j);
        };
        // Outward scan from the mode; returns jmin-1 if the target is never
        // reached (normalizer slightly above the true sum).
        auto scan = [&](double target) -> std::int64_t {
            double cum = 0.0;
            for (std::int64_t d = 0;; ++d) {
                for (int side = 0; side < (d == 0 ? 1 : 2); ++side) {
                    std::int64_t j = side == 0 ? j0 + d : j0 - d;
                    if (j < jmin || j > jmax) continue;
                    cum += weight(j);
                    if (cum >= target) return j;
                }
                if (j0 + d > jmax && j0 - d < jmin) return jmin - 1;
            }
        };

        double z = value_or_zero(rows_.at(m), m, b - a);
        double u = rng.uniform();
        std::int64_t mid = z > 0.0 ? scan(u * z) : jmin - 1;
        if (mid < jmin) {
            // Recompute the normalizer in the scan's own accumulation order.
            double total = 0.0;
            for (std::int64_t d = 0;; ++d) {
                for (int side = 0; side < (d == 0 ? 1 : 2); ++side) {
                    std::int64_t j = side == 0 ? j0 + d : j0 - d;
                    if (j >= jmin && j <= jmax) total += weight(j);
                }
                if (j0 + d > jmax && j0 - d < jmin) break;
            }
            if (total <= 0.0) throw std::runtime_error("bridge sampler: empty midpoint support");
            mid = scan(u * total * (1.0 - 1e-15));
            if (mid < jmin) throw std::runtime_error("bridge sampler: midpoint scan failed");
        }
        w[lo + l] = mid;
        fill_segment(w, lo, lo + l, rng);
        fill_segment(w, lo + l, hi, rng);
    }

    OffspringLaw law_;
    std::int64_t p_;
    std::map<std::int64_t, std::vector<double>> rows_;
};

struct ConditionedDraw {
    Path bridge;     // the walk bridge, 0 to -1
    Path excursion;  // rotation at the first minimum
    Path height;     // walk height of the excursion; height[p] = 0
};

// Draws one size-conditioned tree coding and asserts, pathwise, that the
// rotated ladder-complement route and the direct height of the rotated
// bridge agree.
inline ConditionedDraw draw_conditioned(const BridgeSampler& sampler, RandomStream& rng) {
    ConditionedDraw d;
    d.bridge = sampler.sample(rng);
    d.excursion = vervaat_rotate(d.bridge);
    d.height = height_from_walk(d.excursion);

    Path rebuilt = cyclic_shift_at(add_paths(m_process(d.bridge), height_from_walk(d.bridge)),
                                   first_argmin(d.bridge));
    if (rebuilt != d.height) throw std::logic_error("conditioned draw: ladder-complement identity failed");
    return d;
}

inline OrderedTree sample_conditioned_tree(const BridgeSampler& sampler, RandomStream& rng) {
    Path w = sampler.sample(rng);
    return tree_from_walk(vervaat_rotate(w));
}

// One conditioned draw without a cached sampler; per-call table cost.
inline Path sample_bridge_walk(const OffspringLaw& law, std::int64_t p, RandomStream& rng) {
    return BridgeSampler(law, p).sample(rng);
}

inline OrderedTree sample_conditioned_tree(const OffspringLaw& law, std::int64_t p, RandomStream& rng) {
    BridgeSampler sampler(law, p);
    return sample_conditioned_tree(sampler, rng);
}

// Unconditioned tree by preorder expansion; nullopt when the size cap is hit.
inline std::optional<OrderedTree> try_sample_gw_tree(const OffspringLaw& law, RandomStream& rng, std::int64_t max_size) {
    OrderedTree t;
    std::int64_t open = 1;
    while (open > 0) {
        if (t.size() >= max_size) return std::nullopt;
        std::int64_t c = law.sample(rng);
        t.children.push_back(c);
        open += c - 1;
    }
    return t;
}

inline OrderedTree sample_gw_tree(const OffspringLaw& law, RandomStream& rng, std::int64_t max_size) {
    auto t = try_sample_gw_tree(law, rng, max_size);
    if (!t) throw std::runtime_error("gw sample: truncated at size cap " + std::to_string(max_size));
    return *t;
}

// Conditioned tree by plain rejection on the total progeny; the independent
// cross-check of the bridge route.  Sizes beyond p abort the attempt early.
inline OrderedTree sample_conditioned_tree_rejection(const OffspringLaw& law, std::int64_t p, RandomStream& rng,
                                                     std::int64_t max_tries, std::int64_t* tries_out = nullptr) {
    if (p < 1) throw std::invalid_argument("rejection sample: p must be positive");
    for (std::int64_t t = 1; t <= max_tries; ++t) {
        auto tree = try_sample_gw_tree(law, rng, p + 1);
        if (tree && tree->size() == p) {
            if (tries_out) *tries_out = t;
            return *tree;
        }
    }
    throw std::runtime_error("rejection sample: no progeny-" + std::to_string(p) + " tree in " +
                             std::to_string(max_tries) + " tries");
}

// One conditioned sample with its derived codings and scale factors: the
// bridge walk, its rotation, the height with terminal 0, and the contour
// padded with two zeros to cover [2p-2, 2p].
struct RescaledBundle {
    std::int64_t p = 0;
    Path bridge_walk;    // W, W_p = -1
    Path excursion_walk; // rotation at the first minimum, ends at -1
    Path height;         // p+1 values, height[p] = 0
    Path contour;        // 2p+1 values
    double walk_scale = 1.0;    // 1/a_p
    double height_scale = 1.0;  // a_p/p

    double rescaled_walk_at(double t) const { return double(at(bridge_walk, t)) * walk_scale; }
    double rescaled_height_at(double t) const { return double(at(height, t)) * height_scale; }
    double rescaled_contour_at(double t) const { return double(at(contour, t)) * height_scale; }

private:
    static std::int64_t at(const Path& v, double t) {
        std::int64_t idx = static_cast<std::int64_t>(t * double(v.size() - 1));
        if (idx < 0) idx = 0;
        if (idx >= static_cast<std::int64_t>(v.size())) idx = static_cast<std::int64_t>(v.size()) - 1;
        return v[static_cast<std::size_t>(idx)];
    }
};

inline RescaledBundle rescaled_bundle(const BridgeSampler& sampler, RandomStream& rng) {
    ConditionedDraw d = draw_conditioned(sampler, rng);
    RescaledBundle b;
    b.p = sampler.progeny();
    b.bridge_walk = std::move(d.bridge);
    b.excursion_walk = std::move(d.excursion);
    b.height = std::move(d.height);
    b.contour = contour_process(tree_from_walk(b.excursion_walk));
    b.contour.push_back(0);
    b.contour.push_back(0);
    b.walk_scale = 1.0 / sampler.law().scaling(b.p);
    b.height_scale = sampler.law().scaling(b.p) / double(b.p);
    return b;
}

}  // namespace stabletree
