#pragma once

// Finite-dimensional marginals of the stable continuum tree: the subordinator
// density q(s, u) with int e^{-l u} q(s, u) du = exp(-s l^rho), rho = 1 - 1/a;
// exact rational probabilities of the ordered skeleton spanned by k sampled
// points; reduced trees of discrete height sequences and of grid paths; and
// the joint density of the skeleton's edge lengths.
//
// A skeleton is an ordered tree with no unary vertex, identified by its
// children-count text.  Its probability under index a in (1, 2] is
//
//   k! / prod_v k_v!  *  prod_{internal v} |(1-a)(2-a)...(k_v-1-a)|
//                      / |(a-1)(2a-1)...((k-1)a-1)|,
//
// k the number of leaves.  At a = 2 every vertex with three or more children
// kills the product and the law is uniform on ordered binary shapes.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "stabletree/detail/quadrature.hpp"
#include "stabletree/grid_path.hpp"
#include "stabletree/ordered_tree.hpp"
#include "stabletree/rational.hpp"

namespace stabletree {

// One-sided stable subordinator marginal: q(s, u) du has Laplace transform
// exp(-s l^rho) in l, rho = 1 - 1/alpha in (0, 1/2].
class Subordinator {
public:
    explicit Subordinator(double alpha) {
        if (!(alpha > 1.0) || alpha > 2.0) throw std::invalid_argument("subordinator: alpha must lie in (1, 2]");
        rho_ = 1.0 - 1.0 / alpha;
    }

    double rho() const { return rho_; }

    // Density of the standard law (s = 1) via the single-integral
    // representation g(x) = r/(1-r) x^{-1/(1-r)} int_0^1 A(v) e^{-A(v) xp} dv,
    // xp = x^{-r/(1-r)},
    // A(v) = sin(r pi v)^{r/(1-r)} sin((1-r) pi v) / sin(pi v)^{1/(1-r)}.
    double standard_density(double x) const {
        if (x <= 0.0) return 0.0;
        const double r = rho_;
        const double xp = std::pow(x, -r / (1.0 - r));
        const double log_xp = std::log(xp);
        auto integrand = [&](double v) {
            if (v <= 0.0 || v >= 1.0) return 0.0;
            double loga = (r / (1.0 - r)) * std::log(std::sin(r * std::numbers::pi * v)) +
                          std::log(std::sin((1.0 - r) * std::numbers::pi * v)) -
                          (1.0 / (1.0 - r)) * std::log(std::sin(std::numbers::pi * v));
            if (loga > 690.0 || loga + log_xp > 690.0) return 0.0;
            return std::exp(loga - std::exp(loga) * xp);
        };
        double val = detail::integrate(integrand, 0.0, 1.0, 1e-12);
        return r / (1.0 - r) * std::pow(x, -1.0 / (1.0 - r)) * val;
    }

    double density(double s, double u) const {
        if (s <= 0.0) throw std::invalid_argument("subordinator: s must be positive");
        double scale = std::pow(s, -1.0 / rho_);
        return scale * standard_density(scale * u);
    }

    // Convergent series: q(s, u) = (1/pi) sum_k (-1)^{k-1} G(1+k r)/k!
    // sin(k pi r) s^k u^{-1-k r}.  Useful for moderate s u^{-r}; kept as an
    // independent cross-check of the integral form.
    double series_density(double s, double u, int max_terms = 400) const {
        double sum = 0.0, log_s = std::log(s), log_u = std::log(u);
        int quiet = 0;
        for (int k = 1; k <= max_terms; ++k) {
            double lt = std::lgamma(1.0 + k * rho_) - std::lgamma(k + 1.0) + k * log_s - (1.0 + k * rho_) * log_u;
            double term = std::exp(lt) * std::sin(k * std::numbers::pi * rho_);
            if (k % 2 == 0) term = -term;
            sum += term;
            quiet = std::abs(term) < 1e-17 * std::max(1.0, std::abs(sum)) ? quiet + 1 : 0;
            if (quiet >= 3 && k > 8) break;
        }
        return sum / std::numbers::pi;
    }

    // int_U^inf q(s, u) du = (1/pi) sum_k (-1)^{k-1} G(k r) sin(k pi r) s^k U^{-k r} / k!
    double upper_tail(double s, double U, int max_terms = 400) const {
        double sum = 0.0, log_s = std::log(s), log_U = std::log(U);
        int quiet = 0;
        for (int k = 1; k <= max_terms; ++k) {
            double lt = std::lgamma(k * rho_) - std::lgamma(k + 1.0) + k * log_s - k * rho_ * log_U;
            double term = std::exp(lt) * std::sin(k * std::numbers::pi * rho_);
            if (k % 2 == 0) term = -term;
            sum += term;
            quiet = std::abs(term) < 1e-17 * std::max(1.0, std::abs(sum)) ? quiet + 1 : 0;
            if (quiet >= 3 && k > 8) break;
        }
        return sum / std::numbers::pi;
    }

private:
    double rho_;
};

inline std::int64_t skeleton_leaves(const OrderedTree& s) {
    std::int64_t n = 0;
    for (std::int64_t c : s.children)
        if (c == 0) ++n;
    return n;
}

inline void validate_skeleton(const OrderedTree& s) {
    validate_tree(s);
    for (std::size_t i = 0; i < s.children.size(); ++i)
        if (s.children[i] == 1) throw std::invalid_argument("skeleton: unary vertex at index " + std::to_string(i));
}

// All ordered skeletons with exactly k leaves; there are 1, 1, 3, 11, 45, ...
// of them for k = 1, 2, 3, 4, 5.
inline std::vector<OrderedTree> enumerate_ordered_skeletons(int k) {
    if (k < 1) throw std::invalid_argument("enumerate_ordered_skeletons: need at least one leaf");
    std::vector<std::vector<OrderedTree>> memo(static_cast<std::size_t>(k) + 1);
    memo[1] = {OrderedTree{{0}}};
    for (int n = 2; n <= k; ++n) {
        std::vector<int> parts;  // composition of n into root subtree leaf counts
        auto emit = [&]() {
            std::vector<std::size_t> pick(parts.size(), 0);
            for (;;) {
                OrderedTree t;
                t.children.push_back(static_cast<std::int64_t>(parts.size()));
                for (std::size_t i = 0; i < parts.size(); ++i) {
                    const auto& sub = memo[static_cast<std::size_t>(parts[i])][pick[i]].children;
                    t.children.insert(t.children.end(), sub.begin(), sub.end());
                }
                memo[static_cast<std::size_t>(n)].push_back(std::move(t));
                std::size_t i = 0;
                while (i < pick.size()) {
                    if (++pick[i] < memo[static_cast<std::size_t>(parts[i])].size()) break;
                    pick[i] = 0;
                    ++i;
                }
                if (i == pick.size()) break;
            }
        };
        auto rec = [&](auto&& self, int remaining) -> void {
            if (remaining == 0) {
                if (parts.size() >= 2) emit();
                return;
            }
            for (int p = 1; p <= remaining; ++p) {
                parts.push_back(p);
                self(self, remaining - p);
                parts.pop_back();
            }
        };
        rec(rec, n);
    }
    return memo[static_cast<std::size_t>(k)];
}

inline Rational skeleton_probability(const OrderedTree& skel, const Rational& alpha) {
    validate_skeleton(skel);
    const std::int64_t k = skeleton_leaves(skel);
    if (k < 2) throw std::invalid_argument("skeleton_probability: need at least two leaves");
    auto abs_r = [](Rational x) { return x < 0 ? Rational(-x) : x; };
    Rational num = 1;
    for (std::int64_t j = 2; j <= k; ++j) num *= j;  // k!
    for (std::int64_t c : skel.children) {
        for (std::int64_t j = 2; j <= c; ++j) num /= j;  // k_v!
        for (std::int64_t i = 1; i < c; ++i) num *= abs_r(Rational(i) - alpha);
    }
    Rational den = 1;
    for (std::int64_t j = 1; j < k; ++j) den *= abs_r(Rational(j) * alpha - 1);
    return num / den;
}

// Skeleton together with the lifetime (stem edge length) of every vertex in
// preorder; the root's stem descends from the ancestral point of the marks.
struct MarkedTree {
    OrderedTree skeleton;
    std::vector<double> lifetimes;
};

inline double total_length(const MarkedTree& t) {
    double s = 0.0;
    for (double v : t.lifetimes) s += v;
    return s;
}

// Root with the given stem lifetime over the parts, in order.
inline MarkedTree concat_marked(const std::vector<MarkedTree>& parts, double stem) {
    if (parts.empty()) throw std::invalid_argument("concat_marked: empty part list");
    MarkedTree out;
    out.skeleton.children.push_back(static_cast<std::int64_t>(parts.size()));
    out.lifetimes.push_back(stem);
    for (const auto& p : parts) {
        out.skeleton.children.insert(out.skeleton.children.end(), p.skeleton.children.begin(), p.skeleton.children.end());
        out.lifetimes.insert(out.lifetimes.end(), p.lifetimes.begin(), p.lifetimes.end());
    }
    return out;
}

namespace detail {

// Shared reduction recursion: leaf_h[i] is the path level at mark i, gap[i]
// the ancestor level between marks i and i+1.  Splits at every gap achieving
// the running minimum of its group.
template <class Num>
MarkedTree reduce_build(const std::vector<Num>& leaf_h, const std::vector<Num>& gap) {
    auto build = [&](auto&& self, int lo, int hi, Num base) -> MarkedTree {
        if (lo == hi) return MarkedTree{OrderedTree{{0}}, {double(leaf_h[static_cast<std::size_t>(lo)] - base)}};
        Num dm = gap[static_cast<std::size_t>(lo)];
        for (int i = lo + 1; i < hi; ++i) dm = std::min(dm, gap[static_cast<std::size_t>(i)]);
        std::vector<MarkedTree> parts;
        int start = lo;
        for (int i = lo; i < hi; ++i) {
            if (gap[static_cast<std::size_t>(i)] == dm) {
                parts.push_back(self(self, start, i, dm));
                start = i + 1;
            }
        }
        parts.push_back(self(self, start, hi, dm));
        return concat_marked(parts, double(dm - base));
    };
    return build(build, 0, static_cast<int>(leaf_h.size()) - 1, Num(0));
}

}  // namespace detail

// Reduced tree spanned by sample times of a discrete height sequence.  The
// ancestor level between consecutive marks s < t is min_{s < j <= t} h_j - 1
// (the depth of the last common ancestor); coincident marks sit at their own
// level.  Times must be sorted; the k-th leaf is the k-th time.
inline MarkedTree reduce_from_path(const Path& h, const std::vector<std::int64_t>& times) {
    if (times.empty()) throw std::invalid_argument("reduce_from_path: no sample times");
    const std::int64_t n = static_cast<std::int64_t>(h.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < 0 || times[i] >= n) throw std::invalid_argument("reduce_from_path: time out of range");
        if (i > 0 && times[i - 1] > times[i]) throw std::invalid_argument("reduce_from_path: times must be sorted");
    }
    const int k = static_cast<int>(times.size());
    std::vector<std::int64_t> leaf_h(times.size()), gap(times.size() - 1);
    for (int i = 0; i < k; ++i) leaf_h[static_cast<std::size_t>(i)] = h[static_cast<std::size_t>(times[static_cast<std::size_t>(i)])];
    for (int i = 0; i + 1 < k; ++i) {
        std::int64_t a = times[static_cast<std::size_t>(i)], b = times[static_cast<std::size_t>(i) + 1];
        if (a == b) {
            gap[static_cast<std::size_t>(i)] = h[static_cast<std::size_t>(a)];
            continue;
        }
        std::int64_t m = h[static_cast<std::size_t>(a) + 1];
        for (std::int64_t j = a + 2; j <= b; ++j) m = std::min(m, h[static_cast<std::size_t>(j)]);
        gap[static_cast<std::size_t>(i)] = m - 1;
    }
    return detail::reduce_build(leaf_h, gap);
}

// Same reduction for a grid path at real times: ancestor levels are inclusive
// minima over the grid between the marks, and ties split at exact equality.
inline MarkedTree reduce_from_path(const GridPath& x, const std::vector<double>& times) {
    if (times.empty()) throw std::invalid_argument("reduce_from_path: no sample times");
    const int k = static_cast<int>(times.size());
    std::vector<std::int64_t> idx(times.size());
    for (int i = 0; i < k; ++i) {
        if (i > 0 && times[static_cast<std::size_t>(i) - 1] > times[static_cast<std::size_t>(i)])
            throw std::invalid_argument("reduce_from_path: times must be sorted");
        idx[static_cast<std::size_t>(i)] = grid_index(x, times[static_cast<std::size_t>(i)]);
    }
    std::vector<double> leaf_h(times.size()), gap(times.size() - 1);
    for (int i = 0; i < k; ++i) leaf_h[static_cast<std::size_t>(i)] = x.values[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
    for (int i = 0; i + 1 < k; ++i) {
        double m = x.values[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
        for (std::int64_t j = idx[static_cast<std::size_t>(i)] + 1; j <= idx[static_cast<std::size_t>(i) + 1]; ++j)
            m = std::min(m, x.values[static_cast<std::size_t>(j)]);
        gap[static_cast<std::size_t>(i)] = m;
    }
    return detail::reduce_build(leaf_h, gap);
}

// Reduced tree spanned by distinct vertices, built from the tree structure
// itself (depths and last common ancestors).  Independent of the path
// recursion; the two agree on height sequences.
inline MarkedTree discrete_reduced_tree(const OrderedTree& t, std::vector<std::int64_t> vertices) {
    if (vertices.empty()) throw std::invalid_argument("discrete_reduced_tree: no vertices");
    std::sort(vertices.begin(), vertices.end());
    for (std::size_t i = 0; i + 1 < vertices.size(); ++i)
        if (vertices[i] == vertices[i + 1]) throw std::invalid_argument("discrete_reduced_tree: vertices must be distinct");
    for (std::int64_t v : vertices)
        if (v < 0 || v >= t.size()) throw std::invalid_argument("discrete_reduced_tree: vertex out of range");
    const Path depth = height_process(t);
    const int k = static_cast<int>(vertices.size());
    std::vector<std::int64_t> anc(vertices.size() > 1 ? vertices.size() - 1 : 0);
    for (int i = 0; i + 1 < k; ++i)
        anc[static_cast<std::size_t>(i)] = common_ancestor(t, vertices[static_cast<std::size_t>(i)], vertices[static_cast<std::size_t>(i) + 1]);

    auto build = [&](auto&& self, int lo, int hi, std::int64_t base) -> MarkedTree {
        if (lo == hi)
            return MarkedTree{OrderedTree{{0}}, {double(depth[static_cast<std::size_t>(vertices[static_cast<std::size_t>(lo)])] - base)}};
        std::int64_t g = anc[static_cast<std::size_t>(lo)];
        for (int i = lo + 1; i < hi; ++i)
            if (depth[static_cast<std::size_t>(anc[static_cast<std::size_t>(i)])] < depth[static_cast<std::size_t>(g)])
                g = anc[static_cast<std::size_t>(i)];
        std::vector<MarkedTree> parts;
        int start = lo;
        for (int i = lo; i < hi; ++i) {
            if (anc[static_cast<std::size_t>(i)] == g) {
                parts.push_back(self(self, start, i, depth[static_cast<std::size_t>(g)]));
                start = i + 1;
            }
        }
        parts.push_back(self(self, start, hi, depth[static_cast<std::size_t>(g)]));
        return concat_marked(parts, double(depth[static_cast<std::size_t>(g)] - base));
    };
    return build(build, 0, k - 1, 0);
}

// Joint density of the lifetimes given the skeleton, at index a in (1, 2):
//
//   Gamma(k - 1/a) / Gamma(delta) * a^m * int_0^1 u^{delta-1} q(a S, 1-u) du,
//
// m = #vertices, S = sum of lifetimes, delta = k - (1 - 1/a) m - 1/a.  The
// u-singularity is removed by u = v^{1/delta}.
inline double mark_density(const OrderedTree& skel, const std::vector<double>& lifetimes, double alpha) {
    validate_skeleton(skel);
    if (!(alpha > 1.0) || alpha >= 2.0)
        throw std::invalid_argument("mark_density: requires alpha in (1, 2); the length law degenerates at alpha = 2");
    const std::int64_t k = skeleton_leaves(skel);
    if (k < 2) throw std::invalid_argument("mark_density: need at least two leaves");
    if (lifetimes.size() != skel.children.size())
        throw std::invalid_argument("mark_density: lifetimes misaligned with skeleton " + tree_to_text(skel));
    const double m = double(skel.size());
    const double delta = double(k) - (1.0 - 1.0 / alpha) * m - 1.0 / alpha;
    if (delta <= 0.0)
        throw std::invalid_argument("mark_density: nonpositive exponent delta for skeleton " + tree_to_text(skel));
    double total = 0.0;
    for (double v : lifetimes) {
        if (v < 0.0) return 0.0;
        total += v;
    }
    if (total <= 0.0) return 0.0;
    Subordinator sub(alpha);
    const double s = alpha * total;
    double integral = detail::integrate(
                          [&](double v) {
                              if (v <= 0.0) return 0.0;
                              double u = std::pow(v, 1.0 / delta);
                              if (u >= 1.0) u = 1.0 - 1e-14;
                              return sub.density(s, 1.0 - u);
                          },
                          0.0, 1.0, 1e-10) /
                      delta;
    return std::exp(std::lgamma(double(k) - 1.0 / alpha) - std::lgamma(delta) + m * std::log(alpha)) * integral;
}

// Tree pseudo-metric read off a coding path:
// d(s, t) = path(s) + path(t) - 2 inf over [s ^ t, s v t], endpoints included.
inline std::int64_t crt_distance(const Path& h, std::int64_t s, std::int64_t t) {
    const std::int64_t n = static_cast<std::int64_t>(h.size());
    if (s < 0 || t < 0 || s >= n || t >= n) throw std::invalid_argument("crt_distance: index out of range");
    std::int64_t lo = std::min(s, t), hi = std::max(s, t);
    std::int64_t m = h[static_cast<std::size_t>(lo)];
    for (std::int64_t j = lo + 1; j <= hi; ++j) m = std::min(m, h[static_cast<std::size_t>(j)]);
    return h[static_cast<std::size_t>(s)] + h[static_cast<std::size_t>(t)] - 2 * m;
}

inline double crt_distance(const GridPath& p, double s, double t) {
    std::int64_t a = grid_index(p, std::min(s, t)), b = grid_index(p, std::max(s, t));
    double m = p.values[static_cast<std::size_t>(a)];
    for (std::int64_t j = a + 1; j <= b; ++j) m = std::min(m, p.values[static_cast<std::size_t>(j)]);
    return value_at(p, s) + value_at(p, t) - 2.0 * m;
}

// Marginal density of the total edge length S for a skeleton with k leaves
// and m vertices under index a in (1, 2): the joint density above times the
// simplex volume S^{m-1}/(m-1)!.  Integrates to one over S > 0 for every
// admissible (k, m).
class LengthDensity {
public:
    LengthDensity(double alpha, int k, int m) : sub_(alpha), alpha_(alpha), k_(k), m_(m) {
        if (alpha >= 2.0) throw std::invalid_argument("length density: requires alpha < 2");
        delta_ = k - (1.0 - 1.0 / alpha) * m - 1.0 / alpha;
        if (delta_ <= 0.0) throw std::invalid_argument("length density: delta must be positive");
        log_front_ = std::lgamma(k - 1.0 / alpha) - std::lgamma(delta_) + m * std::log(alpha) -
                     std::lgamma(double(m));
    }

    double delta() const { return delta_; }

    double operator()(double total) const {
        if (total <= 0.0) return 0.0;
        double s = alpha_ * total;
        double integral = detail::integrate(
                              [&](double v) {
                                  if (v <= 0.0) return 0.0;
                                  double u = std::pow(v, 1.0 / delta_);
                                  if (u >= 1.0) u = 1.0 - 1e-14;
                                  return sub_.density(s, 1.0 - u);
                              },
                              0.0, 1.0, 1e-10) /
                          delta_;
        return std::exp(log_front_ + (m_ - 1) * std::log(total)) * integral;
    }

    // Cumulative trapezoid table of the density on [0, hi], cells+1 nodes.
    std::vector<double> cdf_grid(double hi, int cells) const {
        double hstep = hi / double(cells);
        std::vector<double> grid(cells + 1, 0.0);
        double prev = (*this)(0.0);
        for (int i = 1; i <= cells; ++i) {
            double cur = (*this)(i * hstep);
            grid[i] = grid[i - 1] + 0.5 * hstep * (prev + cur);
            prev = cur;
        }
        return grid;
    }

private:
    Subordinator sub_;
    double alpha_;
    int k_, m_;
    double delta_;
    double log_front_;
};

// Linear interpolation into a uniform table on [0, hi]; clamps outside.
inline double grid_interp(const std::vector<double>& grid, double hi, double x) {
    if (x <= 0.0) return grid.front();
    if (x >= hi) return grid.back();
    double pos = x / hi * double(grid.size() - 1);
    std::size_t i = static_cast<std::size_t>(pos);
    double f = pos - double(i);
    return grid[i] * (1.0 - f) + grid[i + 1] * f;
}

}  // namespace stabletree
