#pragma once

// Exhaustive enumeration and exact rational probabilities for small sizes.
// Everything here is brute force on purpose: it is the reference the fast
// code is checked against.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "stabletree/lattice_path.hpp"
#include "stabletree/marginals.hpp"
#include "stabletree/offspring.hpp"
#include "stabletree/ordered_tree.hpp"
#include "stabletree/rational.hpp"

namespace stabletree {

// All ordered trees with p vertices, children sequences in lexicographic
// order.  There are Catalan(p-1) of them.
inline std::vector<OrderedTree> enumerate_trees(std::int64_t p) {
    if (p < 1 || p > 14) throw std::invalid_argument("enumerate_trees: p out of range");
    std::vector<OrderedTree> out;
    std::vector<std::int64_t> seq;
    auto rec = [&](auto&& self, std::int64_t n, std::int64_t children_sum) -> void {
        if (n == p) {
            if (children_sum == p - 1) out.push_back(OrderedTree{seq});
            return;
        }
        if (n > 0 && children_sum < n) return;  // tree already closed
        for (std::int64_t k = 0; children_sum + k <= p - 1; ++k) {
            seq.push_back(k);
            self(self, n + 1, children_sum + k);
            seq.pop_back();
        }
    };
    rec(rec, 0, 0);
    return out;
}

// All skip-free-downward paths of length p from 0 to -1 (value sequences).
inline std::vector<Path> enumerate_bridges(std::int64_t p) {
    if (p < 1 || p > 10) throw std::invalid_argument("enumerate_bridges: p out of range");
    std::vector<Path> out;
    Path w{0};
    auto rec = [&](auto&& self, std::int64_t n) -> void {
        if (n == p) {
            if (w.back() == -1) out.push_back(w);
            return;
        }
        std::int64_t remaining = p - n;
        // w(p) = -1 and later steps are >= -1, so w(n+1) <= -1 + (remaining-1).
        for (std::int64_t s = -1; w.back() + s <= remaining - 2; ++s) {
            w.push_back(w.back() + s);
            self(self, n + 1);
            w.pop_back();
        }
    };
    rec(rec, 0);
    return out;
}

inline Rational tree_weight(const OffspringLaw& law, const OrderedTree& t) {
    Rational w = 1;
    for (std::int64_t k : t.children) w *= law.pmf(k);
    return w;
}

inline Rational walk_probability(const OffspringLaw& law, const Path& w) {
    Rational q = 1;
    for (std::size_t k = 0; k + 1 < w.size(); ++k) q *= law.step_pmf(w[k + 1] - w[k]);
    return q;
}

// P(total progeny = p), by enumeration.
inline Rational total_progeny_mass(const OffspringLaw& law, std::int64_t p) {
    Rational s = 0;
    for (const auto& t : enumerate_trees(p)) s += tree_weight(law, t);
    return s;
}

// P(W_p = v) for the walk with iid steps nu, by exact convolution.  Support
// is truncated to the window a skip-free path can occupy en route to v,
// which is exact whenever v <= 0.
inline Rational end_value_mass(const OffspringLaw& law, std::int64_t p, std::int64_t v) {
    if (v > 0) throw std::invalid_argument("end_value_mass: positive targets not supported");
    std::map<std::int64_t, Rational> dist;
    dist[0] = 1;
    for (std::int64_t i = 0; i < p; ++i) {
        std::map<std::int64_t, Rational> next;
        std::int64_t remaining = p - i - 1;
        for (const auto& [x, q] : dist) {
            for (std::int64_t s = -1; x + s <= v + remaining; ++s) {
                Rational mass = law.step_pmf(s);
                if (mass == 0) {
                    if (law.max_support() >= 0 && s + 1 > law.max_support()) break;
                    continue;
                }
                next[x + s] += q * mass;
            }
        }
        dist.swap(next);
    }
    auto it = dist.find(v);
    return it == dist.end() ? Rational(0) : it->second;
}

// Exact law of the conditioned tree: pairs (tree, probability), probabilities
// summing to 1.
inline std::vector<std::pair<OrderedTree, Rational>> conditioned_pmf(const OffspringLaw& law, std::int64_t p) {
    auto trees = enumerate_trees(p);
    Rational total = 0;
    std::vector<std::pair<OrderedTree, Rational>> out;
    out.reserve(trees.size());
    for (auto& t : trees) {
        Rational w = tree_weight(law, t);
        total += w;
        out.emplace_back(std::move(t), std::move(w));
    }
    if (total == 0) throw std::invalid_argument("conditioned_pmf: size " + std::to_string(p) + " has zero mass");
    for (auto& [t, q] : out) q /= total;
    return out;
}

// p * P(zeta = p) versus P(W_p = -1); equal for every critical law.
inline std::pair<Rational, Rational> otter_check(const OffspringLaw& law, std::int64_t p) {
    Rational lhs = Rational(p) * total_progeny_mass(law, p);
    Rational rhs = WalkLawTable::exact(law, p).exact_value(p, -1);
    return {lhs, rhs};
}

struct IdentityResult {
    std::string identity;
    std::int64_t p = 0;       // size swept (tree size, path lifetime, or leaf count)
    std::int64_t atoms = 0;   // compared atoms
    bool pass = true;
    std::vector<std::string> mismatches;  // "atom: lhs=' rhs='" lines
};

struct IdentityReport {
    std::vector<IdentityResult> results;
    bool all_pass() const {
        for (const auto& r : results)
            if (!r.pass) return false;
        return true;
    }
};

namespace detail {

inline std::string path_text(const Path& w) {
    std::string s;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(w[i]);
    }
    return s;
}

// Measure comparison: a key absent on one side counts as weight 0 there.
inline void compare_ensembles(IdentityResult& res, const std::map<std::string, Rational>& lhs,
                              const std::map<std::string, Rational>& rhs) {
    res.atoms = static_cast<std::int64_t>(std::max(lhs.size(), rhs.size()));
    auto value_of = [](const std::map<std::string, Rational>& m, const std::string& key) {
        auto it = m.find(key);
        return it == m.end() ? Rational(0) : it->second;
    };
    for (const auto& [key, q] : lhs) {
        Rational other = value_of(rhs, key);
        if (other != q) res.mismatches.push_back(key + ": lhs=" + to_string(q) + " rhs=" + to_string(other));
    }
    for (const auto& [key, q] : rhs)
        if (lhs.find(key) == lhs.end() && q != 0) res.mismatches.push_back(key + ": lhs=0 rhs=" + to_string(q));
    res.pass = res.mismatches.empty();
}

}  // namespace detail

// Conditional bridge law: all length-p skip-free paths to -1 with exact
// weights summing to 1.
inline std::vector<std::pair<Path, Rational>> bridge_ensemble(const OffspringLaw& law, std::int64_t p) {
    std::vector<std::pair<Path, Rational>> out;
    Rational total = 0;
    for (auto& w : enumerate_bridges(p)) {
        Rational q = walk_probability(law, w);
        if (q == 0) continue;
        total += q;
        out.emplace_back(std::move(w), std::move(q));
    }
    for (auto& [w, q] : out) q /= total;
    return out;
}

// Conditional excursion law: bridges that stay nonnegative before the end.
inline std::vector<std::pair<Path, Rational>> excursion_ensemble(const OffspringLaw& law, std::int64_t p) {
    std::vector<std::pair<Path, Rational>> out;
    Rational total = 0;
    for (auto& w : enumerate_bridges(p)) {
        bool ok = true;
        for (std::size_t j = 0; j + 1 < w.size(); ++j)
            if (w[j] < 0) {
                ok = false;
                break;
            }
        if (!ok) continue;
        Rational q = walk_probability(law, w);
        if (q == 0) continue;
        total += q;
        out.emplace_back(std::move(w), std::move(q));
    }
    for (auto& [w, q] : out) q /= total;
    return out;
}

// Exhaustive exact checks of every combinatorial identity the fast code
// relies on.  Sweeps are capped per identity at the sizes enumeration can
// afford; the report carries one row per (identity, size) with any
// mismatching atoms spelled out.  Never calls the samplers.
inline IdentityReport verify_identities(const OffspringLaw& law, std::int64_t p_max) {
    if (p_max < 1 || p_max > 12) throw std::invalid_argument("verify_identities: p_max must lie in [1, 12]");
    IdentityReport rep;

    const std::int64_t p_joint = std::min<std::int64_t>(p_max, 8);
    WalkLawTable table = WalkLawTable::exact(law, std::min<std::int64_t>(p_max, 12));

    // total progeny mass against the walk's end-value mass
    for (std::int64_t p = 1; p <= std::min<std::int64_t>(p_max, 12); ++p) {
        IdentityResult res;
        res.identity = "otter";
        res.p = p;
        res.atoms = 1;
        Rational lhs = Rational(p) * total_progeny_mass(law, p);
        Rational rhs = table.exact_value(p, -1);
        if (lhs != rhs) res.mismatches.push_back("p P(zeta=p)=" + to_string(lhs) + " P(W_p=-1)=" + to_string(rhs));
        res.pass = res.mismatches.empty();
        rep.results.push_back(std::move(res));
    }

    // bridge enumeration size against the closed-form count, and its total
    // weight against the walk table
    for (std::int64_t p = 1; p <= std::min<std::int64_t>(p_max, 10); ++p) {
        IdentityResult res;
        res.identity = "bridge-mass";
        res.p = p;
        auto bridges = enumerate_bridges(p);
        res.atoms = static_cast<std::int64_t>(bridges.size());
        Rational expect_count = rational_binom(Rational(2 * p - 2), static_cast<int>(p - 1));
        if (Rational(static_cast<std::int64_t>(bridges.size())) != expect_count)
            res.mismatches.push_back("count=" + std::to_string(bridges.size()) + " closed form=" + to_string(expect_count));
        Rational total = 0;
        for (const auto& w : bridges) total += walk_probability(law, w);
        Rational expect_mass = table.exact_value(p, -1);
        if (total != expect_mass)
            res.mismatches.push_back("mass=" + to_string(total) + " P(W_p=-1)=" + to_string(expect_mass));
        res.pass = res.mismatches.empty();
        rep.results.push_back(std::move(res));
    }

    // geometric conditioning is uniform over tree shapes
    if (law.kind() == OffspringKind::Geometric) {
        for (std::int64_t p = 1; p <= std::min<std::int64_t>(p_max, 7); ++p) {
            IdentityResult res;
            res.identity = "uniformity";
            res.p = p;
            auto pmf = conditioned_pmf(law, p);
            res.atoms = static_cast<std::int64_t>(pmf.size());
            Rational want = Rational(1) / catalan_number(p - 1);
            for (const auto& [t, q] : pmf)
                if (q != want)
                    res.mismatches.push_back(tree_to_text(t) + ": lhs=" + to_string(q) + " rhs=" + to_string(want));
            res.pass = res.mismatches.empty();
            rep.results.push_back(std::move(res));
        }
    }

    for (std::int64_t p = 1; p <= p_joint; ++p) {
        if (table.exact_value(p, -1) == 0) continue;  // no bridges of this length under this law

        auto bridges = bridge_ensemble(law, p);
        auto excursions = excursion_ensemble(law, p);

        // law of the tree height sequence == law of the walk height transform
        {
            IdentityResult res;
            res.identity = "height-law";
            res.p = p;
            std::map<std::string, Rational> lhs, rhs;
            for (const auto& [t, q] : conditioned_pmf(law, p))
                if (q != 0) lhs[detail::path_text(height_process(t))] += q;
            for (const auto& [w, q] : excursions) {
                Path h = height_from_walk(w);
                if (h.back() != 0) {
                    res.mismatches.push_back(detail::path_text(w) + ": height pad nonzero");
                    continue;
                }
                h.pop_back();
                rhs[detail::path_text(h)] += q;
            }
            if (res.mismatches.empty()) detail::compare_ensembles(res, lhs, rhs);
            else res.pass = false;
            rep.results.push_back(std::move(res));
        }

        // rotation at the first minimum maps the bridge law to the excursion law
        {
            IdentityResult res;
            res.identity = "vervaat";
            res.p = p;
            std::map<std::string, Rational> lhs, rhs;
            for (const auto& [w, q] : bridges) lhs[detail::path_text(vervaat_rotate(w))] += q;
            for (const auto& [w, q] : excursions) rhs[detail::path_text(w)] += q;
            detail::compare_ensembles(res, lhs, rhs);
            rep.results.push_back(std::move(res));
        }

        // joint law of (V0(W), V0(H+M)) under bridges == (W, H) under excursions
        {
            IdentityResult res;
            res.identity = "bridge-map";
            res.p = p;
            std::map<std::string, Rational> lhs, rhs;
            for (const auto& [w, q] : bridges) {
                Path hm = add_paths(height_from_walk(w), m_process(w));
                Path rotated = cyclic_shift_at(hm, first_argmin(w));
                lhs[detail::path_text(vervaat_rotate(w)) + "|" + detail::path_text(rotated)] += q;
            }
            for (const auto& [w, q] : excursions)
                rhs[detail::path_text(w) + "|" + detail::path_text(height_from_walk(w))] += q;
            detail::compare_ensembles(res, lhs, rhs);
            rep.results.push_back(std::move(res));
        }
    }

    // both displayed splitting identities, every bridge path, every (n, m)
    for (std::int64_t z = 1; z <= std::min<std::int64_t>(p_max, 10); ++z) {
        IdentityResult shift_res, ladder_res;
        shift_res.identity = "shift-height";
        ladder_res.identity = "shift-ladder";
        shift_res.p = ladder_res.p = z;
        for (const auto& w : enumerate_bridges(z)) {
            Path h = height_from_walk(w);
            for (std::int64_t n = 0; n <= z; ++n) {
                Path hs = height_from_walk(shift_path(w, n));
                Path rev = reverse_path(w, n);
                Path lad = ladder_counts(rev);
                std::int64_t window_min = h[n];
                for (std::int64_t m = 0; n + m <= z; ++m) {
                    window_min = std::min(window_min, h[n + m]);
                    ++shift_res.atoms;
                    if (h[n + m] - window_min != hs[m])
                        shift_res.mismatches.push_back(detail::path_text(w) + " n=" + std::to_string(n) +
                                                       " m=" + std::to_string(m));
                    ++ladder_res.atoms;
                    std::int64_t b = beta_split(w, n, m);
                    if (window_min != lad[n] - lad[b])
                        ladder_res.mismatches.push_back(detail::path_text(w) + " n=" + std::to_string(n) +
                                                        " m=" + std::to_string(m));
                }
            }
        }
        shift_res.pass = shift_res.mismatches.empty();
        ladder_res.pass = ladder_res.mismatches.empty();
        rep.results.push_back(std::move(shift_res));
        rep.results.push_back(std::move(ladder_res));
    }

    // coding round-trips
    for (std::int64_t p = 1; p <= std::min<std::int64_t>(p_max, 10); ++p) {
        IdentityResult res;
        res.identity = "roundtrip";
        res.p = p;
        for (const auto& t : enumerate_trees(p)) {
            ++res.atoms;
            if (tree_from_height(height_process(t)).children != t.children ||
                tree_from_walk(lukasiewicz_walk(t)).children != t.children ||
                contour_from_height(height_process(t)) != contour_process(t))
                res.mismatches.push_back(tree_to_text(t));
        }
        res.pass = res.mismatches.empty();
        rep.results.push_back(std::move(res));
    }

    // reduced-skeleton probabilities sum to 1 at this law's stable index
    Rational alpha = law.kind() == OffspringKind::Stable ? law.alpha() : Rational(2);
    for (int k = 2; k <= 5; ++k) {
        IdentityResult res;
        res.identity = "skeleton-sum";
        res.p = k;
        Rational total = 0;
        for (const auto& sk : enumerate_ordered_skeletons(k)) {
            ++res.atoms;
            total += skeleton_probability(sk, alpha);
        }
        if (total != 1) res.mismatches.push_back("sum=" + to_string(total));
        res.pass = res.mismatches.empty();
        rep.results.push_back(std::move(res));
    }

    return rep;
}

}  // namespace stabletree
