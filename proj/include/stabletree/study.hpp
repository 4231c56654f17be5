#pragma once

// Monte-Carlo studies tying the samplers to the limit objects: convergence
// ladders for the rescaled codings, skeleton frequency comparisons, reduced
// tree length collections, and exact bridge-marginal calibrations.
//
// Every draw i derives its own counter-based stream (seed, stream_offset+i),
// so results are independent of the thread count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "stabletree/lattice_path.hpp"
#include "stabletree/levy.hpp"
#include "stabletree/marginals.hpp"
#include "stabletree/offspring.hpp"
#include "stabletree/sampler.hpp"
#include "stabletree/stats.hpp"

namespace stabletree {

// Runs fn(i, rng_i) for i in [0, n) across the given number of threads.
// Results land in a pre-sized vector; fn must only write its own slot.
template <class T, class Fn>
std::vector<T> parallel_draws(std::int64_t n, int threads, std::uint64_t seed, std::uint64_t stream_offset, Fn&& fn) {
    std::vector<T> out(static_cast<std::size_t>(n));
    if (threads < 1) threads = 1;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    std::int64_t chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        std::int64_t lo = t * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi]() {
            for (std::int64_t i = lo; i < hi; ++i) {
                RandomStream rng(seed, stream_offset + static_cast<std::uint64_t>(i));
                out[i] = fn(i, rng);
            }
        });
    }
    for (auto& th : pool) th.join();
    return out;
}

// sup_j |C_j - H_{floor(j/2)}| for the contour of the given height sequence.
inline std::int64_t contour_height_gap(const Path& h) {
    Path c = contour_from_height(h);
    std::int64_t gap = 0;
    for (std::size_t j = 0; j < c.size(); ++j)
        gap = std::max(gap, std::abs(c[j] - h[j / 2]));
    return gap;
}

struct ConvergenceRow {
    std::int64_t p = 0;
    double t = 0;
    double ks_stat = 0;
    double ks_pvalue = 0;
    std::int64_t n_samples = 0;
};

struct ConvergenceStudy {
    std::vector<ConvergenceRow> rows;          // one per (p, t), reference rung included
    std::vector<std::pair<std::int64_t, double>> gap_q99;  // (p, 0.99-quantile of sup gap / h_p)
};

// Rescaled height marginals H_{[tp]} / h_p along a ladder of sizes, compared
// by two-sample KS against a reference run at the largest size.  The
// reference uses its own stream block, so even the top rung is a genuine
// two-sample comparison, not a self-test.
inline ConvergenceStudy convergence_study(const OffspringLaw& law, std::vector<std::int64_t> ladder,
                                          const std::vector<double>& times, std::int64_t n_samples,
                                          std::uint64_t seed, int threads) {
    std::sort(ladder.begin(), ladder.end());
    ConvergenceStudy st;
    std::map<std::int64_t, std::vector<std::vector<double>>> marg;  // p -> per-time samples
    std::vector<std::vector<double>> ref;
    std::uint64_t stream = 0;
    struct DrawOut {
        std::vector<double> at_times;
        double gap = 0;
    };
    auto run_rung = [&](std::int64_t p, bool want_gap) {
        BridgeSampler sampler(law, p);
        double hp = law.height_scaling(p);
        auto res = parallel_draws<DrawOut>(n_samples, threads, seed, stream, [&](std::int64_t, RandomStream& rng) {
            ConditionedDraw d = draw_conditioned(sampler, rng);
            DrawOut o;
            o.at_times.reserve(times.size());
            for (double t : times) {
                auto idx = static_cast<std::int64_t>(t * double(p));
                if (idx > p) idx = p;
                o.at_times.push_back(double(d.height[idx]) / hp);
            }
            if (want_gap) {
                Path tree_h(d.height.begin(), d.height.end() - 1);  // drop the zero pad
                o.gap = double(contour_height_gap(tree_h)) / hp;
            }
            return o;
        });
        stream += static_cast<std::uint64_t>(n_samples);
        std::vector<std::vector<double>> per_time(times.size());
        std::vector<double> gaps;
        gaps.reserve(res.size());
        for (auto& o : res) {
            for (std::size_t ti = 0; ti < times.size(); ++ti) per_time[ti].push_back(o.at_times[ti]);
            if (want_gap) gaps.push_back(o.gap);
        }
        if (want_gap) st.gap_q99.emplace_back(p, empirical_quantile(gaps, 0.99));
        return per_time;
    };
    for (std::int64_t p : ladder) marg[p] = run_rung(p, true);
    ref = run_rung(ladder.back(), false);
    for (std::int64_t p : ladder) {
        for (std::size_t ti = 0; ti < times.size(); ++ti) {
            ConvergenceRow row;
            row.p = p;
            row.t = times[ti];
            row.n_samples = n_samples;
            auto ks = ks_two_sample(marg.at(p)[ti], ref[ti]);
            row.ks_stat = ks.statistic;
            row.ks_pvalue = ks.p_value;
            st.rows.push_back(row);
        }
    }
    return st;
}

struct MarginalRow {
    std::string skeleton;
    double closed_form = 0;
    double mc_freq = 0;
    double mc_stderr = 0;
    std::int64_t n_samples = 0;
};

// k distinct uniform preorder indices in [0, p), sorted.  Rejection keeps
// the conditioned-on-distinct law exact.
inline std::vector<std::int64_t> sample_distinct_marks(int k, std::int64_t p, RandomStream& rng) {
    std::vector<std::int64_t> marks(static_cast<std::size_t>(k));
    for (;;) {
        for (auto& m : marks) m = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(p)));
        std::sort(marks.begin(), marks.end());
        if (std::adjacent_find(marks.begin(), marks.end()) == marks.end()) return marks;
    }
}

// Frequencies of the reduced-tree skeleton over k distinct uniform marks,
// against the closed-form limit probabilities.
inline std::vector<MarginalRow> marginal_study(const OffspringLaw& law, std::int64_t p, int k,
                                               std::int64_t reps, std::uint64_t seed, int threads) {
    BridgeSampler sampler(law, p);
    auto keys = parallel_draws<std::string>(reps, threads, seed, 0, [&](std::int64_t, RandomStream& rng) {
        ConditionedDraw d = draw_conditioned(sampler, rng);
        auto marks = sample_distinct_marks(k, p, rng);
        return tree_to_text(reduce_from_path(d.height, marks).skeleton);
    });
    std::map<std::string, std::int64_t> counts;
    for (auto& s : keys) ++counts[s];

    Rational alpha = law.kind() == OffspringKind::Stable ? law.alpha() : Rational(2);
    std::vector<MarginalRow> rows;
    for (const auto& sk : enumerate_ordered_skeletons(k)) {
        MarginalRow r;
        r.skeleton = tree_to_text(sk);
        r.closed_form = to_double(skeleton_probability(sk, alpha));
        auto it = counts.find(r.skeleton);
        r.mc_freq = it == counts.end() ? 0.0 : double(it->second) / double(reps);
        r.mc_stderr = std::sqrt(std::max(r.mc_freq * (1.0 - r.mc_freq), 1e-12) / double(reps));
        r.n_samples = reps;
        rows.push_back(std::move(r));
    }
    return rows;
}

// Scaled total edge length of the reduced tree over k distinct uniform
// marks, one value per draw, with the vertex count of the sampled skeleton.
struct LengthSample {
    double scaled_total = 0;
    int vertices = 0;
};

inline std::vector<LengthSample> length_study(const BridgeSampler& sampler, int k, std::int64_t reps,
                                              std::uint64_t seed, int threads) {
    const std::int64_t p = sampler.progeny();
    const double hp = sampler.law().height_scaling(p);
    return parallel_draws<LengthSample>(reps, threads, seed, 0, [&](std::int64_t, RandomStream& rng) {
        ConditionedDraw d = draw_conditioned(sampler, rng);
        auto marks = sample_distinct_marks(k, p, rng);
        MarkedTree red = reduce_from_path(d.height, marks);
        LengthSample s;
        s.scaled_total = total_length(red) / hp;
        s.vertices = static_cast<int>(red.skeleton.size());
        return s;
    });
}

// Exact E[exp(-l W_m / a_p)] for the bridge, from the convolution rows.
inline double bridge_marginal_laplace_exact(BridgeSampler& sampler, std::int64_t m, double lambda) {
    const std::int64_t p = sampler.progeny();
    const double ap = sampler.law().scaling(p);
    const auto& left = sampler.row(m);
    sampler.row(p - m);
    double z = sampler.row_value(p, -1);
    double acc = 0.0;
    for (std::int64_t x = -m; x <= p - 1 - m; ++x) {
        double fl = left[static_cast<std::size_t>(x + m)];
        if (fl == 0.0) continue;
        double fr = sampler.row_value(p - m, -1 - x);
        if (fr == 0.0) continue;
        acc += fl * fr * std::exp(-lambda * double(x) / ap);
    }
    return acc / z;
}

// sup over |x| <= span * a_m of |a_m P(W_m = x) - density(x / a_m)| for the
// unconditioned walk against the stable marginal.  The convolution rows of a
// sampler with progeny 2m carry the exact pmf of W_m on the whole window
// [-m, m-1], which covers both signs.
inline double local_limit_sup(const OffspringLaw& law, std::int64_t m, double span) {
    BridgeSampler wide(law, 2 * m);
    const double am = law.scaling(m);
    StableLevy levy(law.stable_index());
    double sup = 0.0;
    auto lo = std::max<std::int64_t>(-m, static_cast<std::int64_t>(-span * am));
    auto hi = std::min<std::int64_t>(m - 1, static_cast<std::int64_t>(span * am));
    for (std::int64_t x = lo; x <= hi; ++x) {
        double diff = std::abs(am * wide.row_value(m, x) - levy.density(double(x) / am));
        sup = std::max(sup, diff);
    }
    return sup;
}

}  // namespace stabletree
