#pragma once

// Path calculus for skip-free-downward lattice walks: ladder counts, time
// reversal, first passage, the discrete Vervaat rotation, and the ladder
// complement process M used to rebuild a conditioned height process from a
// bridge.
//
// Convention: a path is a vector (w(0), ..., w(z)) with w(0) = 0; first
// passage returns z+1 when the level is never reached.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "stabletree/ordered_tree.hpp"

namespace stabletree {

inline std::int64_t path_duration(const Path& w) {
    if (w.empty() || w[0] != 0) throw std::invalid_argument("path: must start at 0");
    return static_cast<std::int64_t>(w.size()) - 1;
}

inline bool is_skip_free(const Path& w) {
    for (std::size_t k = 0; k + 1 < w.size(); ++k)
        if (w[k + 1] - w[k] < -1) return false;
    return true;
}

// L_n = Card{ 0 < j <= n : w(j) = max_{0<=k<=j} w(k) }, for every n.
inline Path ladder_counts(const Path& w) {
    const std::int64_t z = path_duration(w);
    Path l(w.size(), 0);
    std::int64_t run_max = 0;
    for (std::int64_t j = 1; j <= z; ++j) {
        l[j] = l[j - 1] + (w[j] >= run_max ? 1 : 0);
        run_max = std::max(run_max, w[j]);
    }
    return l;
}

// w^(n)(k) = w(n+k) - w(n).
inline Path shift_path(const Path& w, std::int64_t n) {
    const std::int64_t z = path_duration(w);
    if (n < 0 || n > z) throw std::invalid_argument("shift_path: n out of range");
    Path out(static_cast<std::size_t>(z - n) + 1);
    for (std::int64_t k = 0; k <= z - n; ++k) out[k] = w[n + k] - w[n];
    return out;
}

// Reversed path over [0, n]: what(k) = w(n) - w(n-k).
inline Path reverse_path(const Path& w, std::int64_t n) {
    if (n < 0 || n > path_duration(w)) throw std::invalid_argument("reverse_path: n out of range");
    Path out(static_cast<std::size_t>(n) + 1);
    for (std::int64_t k = 0; k <= n; ++k) out[k] = w[n] - w[n - k];
    return out;
}

// First passage to level >= a; z+1 when never reached.
inline std::int64_t first_passage(const Path& w, std::int64_t a) {
    const std::int64_t z = path_duration(w);
    for (std::int64_t k = 0; k <= z; ++k)
        if (w[k] >= a) return k;
    return z + 1;
}

// beta(n, m) = n /\ (t - 1)_+ where t is the first passage of the reversal
// what^n to -inf_{0<=k<=m} w^(n)(k); never-reached collapses to n.
inline std::int64_t beta_split(const Path& w, std::int64_t n, std::int64_t m) {
    const std::int64_t z = path_duration(w);
    if (n < 0 || n > z || m < 0 || n + m > z) throw std::invalid_argument("beta_split: indices out of range");
    std::int64_t inf_fwd = 0;
    for (std::int64_t k = 0; k <= m; ++k) inf_fwd = std::min(inf_fwd, w[n + k] - w[n]);
    Path rev = reverse_path(w, n);
    std::int64_t t = first_passage(rev, -inf_fwd);
    if (t > n) return n;
    return std::min(n, std::max<std::int64_t>(t - 1, 0));
}

// Index of the first minimum of w over [0, z].
inline std::int64_t first_argmin(const Path& w) {
    std::int64_t best = 0;
    for (std::size_t k = 1; k < w.size(); ++k)
        if (w[k] < w[best]) best = static_cast<std::int64_t>(k);
    return best;
}

// Cyclic rotation at the first minimum: V(w)(k) = w(g + k mod z) - w(g)
// adjusted by the bridge terminal value on wrap-around.
inline Path vervaat_rotate(const Path& w) {
    const std::int64_t z = path_duration(w);
    const std::int64_t g = first_argmin(w);
    Path out(w.size());
    for (std::int64_t k = 0; k <= z; ++k) {
        std::int64_t j = g + k;
        out[k] = (j <= z) ? w[j] - w[g] : w[j - z] - w[g] + w[z];
    }
    return out;
}

// Height of the walk: H_n = Card{ 0 <= j < n : w(j) = min_{j<=k<=n} w(k) }.
// Maintains the increasing stack of future-minimum candidates, O(z) total.
inline Path height_from_walk(const Path& w) {
    const std::int64_t z = path_duration(w);
    Path h(w.size(), 0);
    std::vector<std::int64_t> stack;  // values w(j) of active indices, strictly increasing
    for (std::int64_t n = 0; n <= z; ++n) {
        while (!stack.empty() && stack.back() > w[n]) stack.pop_back();
        h[n] = static_cast<std::int64_t>(stack.size());
        stack.push_back(w[n]);
    }
    return h;
}

// Literal quadratic form of the same definition; kept as a cross-check.
inline Path height_from_walk_reference(const Path& w) {
    const std::int64_t z = path_duration(w);
    Path h(w.size(), 0);
    for (std::int64_t n = 0; n <= z; ++n) {
        std::int64_t count = 0;
        for (std::int64_t j = 0; j < n; ++j) {
            std::int64_t m = w[j];
            for (std::int64_t k = j; k <= n; ++k) m = std::min(m, w[k]);
            if (w[j] == m) ++count;
        }
        h[n] = count;
    }
    return h;
}

// Ladder complement M_k = L_p(what^p) - L_{gamma_p(k)}(what^p), where
// gamma_p(k) = p /\ (t(-inf_{0<=i<=k} w(i), what^p) - 1)_+.  All first
// passages of the reversal are read off one precomputed running-max sweep.
inline Path m_process(const Path& w) {
    const std::int64_t p = path_duration(w);
    Path rev = reverse_path(w, p);
    Path lad = ladder_counts(rev);
    Path run_max(rev.size());
    run_max[0] = rev[0];
    for (std::int64_t j = 1; j <= p; ++j) run_max[j] = std::max(run_max[j - 1], rev[j]);

    Path m(w.size());
    std::int64_t inf_w = 0;
    std::int64_t t = 0;  // first passage of rev to level >= -inf_w
    for (std::int64_t k = 0; k <= p; ++k) {
        inf_w = std::min(inf_w, w[k]);
        while (t <= p && run_max[t] < -inf_w) ++t;
        std::int64_t gamma = (t > p) ? p : std::min(p, std::max<std::int64_t>(t - 1, 0));
        m[k] = lad[p] - lad[gamma];
    }
    return m;
}

// Rotation with period z (no terminal correction): out(k) = s(g+k) - s(g),
// indices taken mod z on [0, z).  Used for sequences that are not bridges,
// e.g. the ladder complement plus walk height.
inline Path cyclic_shift_at(const Path& s, std::int64_t g) {
    const std::int64_t z = static_cast<std::int64_t>(s.size()) - 1;
    if (g < 0 || g > z) throw std::invalid_argument("cyclic_shift_at: index out of range");
    Path out(s.size());
    for (std::int64_t k = 0; k <= z; ++k) {
        std::int64_t j = g + k;
        out[k] = (j <= z ? s[j] : s[j - z]) - s[g];
    }
    return out;
}

inline Path add_paths(const Path& a, const Path& b) {
    if (a.size() != b.size()) throw std::invalid_argument("add_paths: length mismatch");
    Path out(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] + b[k];
    return out;
}

}  // namespace stabletree
