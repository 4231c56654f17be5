#pragma once

// Ordered rooted trees stored as preorder children-count sequences, plus the
// three classical codings (height process, contour, Lukasiewicz walk) and
// conversions between them.

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace stabletree {

using Path = std::vector<std::int64_t>;

struct OrderedTree {
    std::vector<std::int64_t> children;  // preorder children counts

    std::int64_t size() const { return static_cast<std::int64_t>(children.size()); }
};

inline void validate_tree(const OrderedTree& t) {
    if (t.children.empty()) throw std::invalid_argument("tree: empty children-count sequence");
    std::int64_t sum = 0;
    const std::int64_t z = t.size();
    for (std::int64_t i = 0; i < z; ++i) {
        if (t.children[i] < 0) throw std::invalid_argument("tree: negative children count at index " + std::to_string(i));
        sum += t.children[i] - 1;
        if (i + 1 < z && sum < 0) throw std::invalid_argument("tree: sequence terminates early at index " + std::to_string(i));
    }
    if (sum != -1) throw std::invalid_argument("tree: children counts do not close the tree (checksum " + std::to_string(sum) + ")");
}

inline std::vector<std::int64_t> parent_array(const OrderedTree& t) {
    std::vector<std::int64_t> parent(t.children.size(), -1);
    std::vector<std::pair<std::int64_t, std::int64_t>> stack;  // (vertex, remaining children)
    for (std::int64_t n = 0; n < t.size(); ++n) {
        if (n > 0) {
            while (!stack.empty() && stack.back().second == 0) stack.pop_back();
            if (stack.empty()) throw std::invalid_argument("tree: vertex " + std::to_string(n) + " has no parent");
            parent[n] = stack.back().first;
            --stack.back().second;
        }
        stack.emplace_back(n, t.children[n]);
    }
    return parent;
}

inline Path height_process(const OrderedTree& t) {
    validate_tree(t);
    Path h(t.children.size(), 0);
    std::vector<std::pair<std::int64_t, std::int64_t>> stack;  // (depth, remaining children)
    for (std::int64_t n = 0; n < t.size(); ++n) {
        if (n > 0) {
            while (!stack.empty() && stack.back().second == 0) stack.pop_back();
            h[n] = stack.back().first + 1;
            --stack.back().second;
        }
        stack.emplace_back(h[n], t.children[n]);
    }
    return h;
}

inline OrderedTree tree_from_height(const Path& h) {
    if (h.empty()) throw std::invalid_argument("tree_from_height: empty sequence");
    if (h[0] != 0) throw std::invalid_argument("tree_from_height: H_0 != 0");
    OrderedTree t;
    t.children.assign(h.size(), 0);
    std::vector<std::int64_t> chain{0};  // ancestor chain, depths 0..top
    for (std::size_t n = 1; n < h.size(); ++n) {
        if (h[n] < 1 || h[n] > h[n - 1] + 1)
            throw std::invalid_argument("tree_from_height: invalid increment at index " + std::to_string(n));
        chain.resize(static_cast<std::size_t>(h[n]));
        ++t.children[chain.back()];
        chain.push_back(static_cast<std::int64_t>(n));
    }
    validate_tree(t);
    return t;
}

inline Path lukasiewicz_walk(const OrderedTree& t) {
    validate_tree(t);
    Path w(t.children.size() + 1, 0);
    for (std::int64_t n = 0; n < t.size(); ++n) w[n + 1] = w[n] + t.children[n] - 1;
    return w;
}

inline OrderedTree tree_from_walk(const Path& w) {
    if (w.size() < 2) throw std::invalid_argument("tree_from_walk: need at least one step");
    if (w[0] != 0) throw std::invalid_argument("tree_from_walk: W_0 != 0");
    OrderedTree t;
    t.children.reserve(w.size() - 1);
    for (std::size_t n = 0; n + 1 < w.size(); ++n) {
        std::int64_t step = w[n + 1] - w[n];
        if (step < -1) throw std::invalid_argument("tree_from_walk: step below -1 at index " + std::to_string(n));
        bool last = (n + 2 == w.size());
        if ((w[n + 1] == -1) != last)
            throw std::invalid_argument("tree_from_walk: walk hits -1 at index " + std::to_string(n + 1) + (last ? " only" : " before the end"));
        t.children.push_back(step + 1);
    }
    validate_tree(t);
    return t;
}

// Contour sampled at integer times; length 2(zeta-1)+1, and (0) for the
// single-vertex tree.
inline Path contour_process(const OrderedTree& t) {
    Path depth = height_process(t);
    Path c;
    c.push_back(0);
    for (std::int64_t n = 0; n + 1 < t.size(); ++n) {
        std::int64_t a = depth[n + 1] - 1;  // depth of u(n+1)'s parent, an ancestor of u(n)
        for (std::int64_t d = depth[n] - 1; d >= a; --d) c.push_back(d);
        c.push_back(a + 1);
    }
    for (std::int64_t d = depth.back() - 1; d >= 0; --d) c.push_back(d);
    return c;
}

inline Path contour_from_height(const Path& h) {
    if (h.empty()) throw std::invalid_argument("contour_from_height: empty sequence");
    const std::int64_t zeta = static_cast<std::int64_t>(h.size());
    auto b = [&](std::int64_t n) { return n < zeta ? 2 * n - h[n] : 2 * (zeta - 1); };
    Path c(static_cast<std::size_t>(2 * (zeta - 1) + 1), 0);
    for (std::int64_t n = 0; n + 1 < zeta; ++n) {
        for (std::int64_t tme = b(n); tme < b(n + 1); ++tme)
            c[tme] = (tme < b(n + 1) - 1) ? h[n] - (tme - b(n)) : tme - b(n + 1) + h[n + 1];
    }
    for (std::int64_t tme = b(zeta - 1); tme <= 2 * (zeta - 1); ++tme) c[tme] = h[zeta - 1] - (tme - b(zeta - 1));
    return c;
}

inline OrderedTree concat_trees(const std::vector<OrderedTree>& parts) {
    OrderedTree t;
    t.children.push_back(static_cast<std::int64_t>(parts.size()));
    for (const auto& part : parts) {
        validate_tree(part);
        t.children.insert(t.children.end(), part.children.begin(), part.children.end());
    }
    return t;
}

// Index of the last common ancestor of vertices u and v (lexicographic indices).
inline std::int64_t common_ancestor(const OrderedTree& t, std::int64_t u, std::int64_t v) {
    if (u < 0 || v < 0 || u >= t.size() || v >= t.size()) throw std::invalid_argument("common_ancestor: vertex index out of range");
    Path depth = height_process(t);
    auto parent = parent_array(t);
    while (depth[u] > depth[v]) u = parent[u];
    while (depth[v] > depth[u]) v = parent[v];
    while (u != v) {
        u = parent[u];
        v = parent[v];
    }
    return u;
}

struct ForestCoding {
    Path height;
    Path walk;
    Path contour;
};

inline ForestCoding forest_encode(const std::vector<OrderedTree>& forest) {
    if (forest.empty()) throw std::invalid_argument("forest_encode: empty forest");
    ForestCoding f;
    f.walk.push_back(0);
    f.contour.push_back(0);
    std::int64_t base = 0;
    for (const auto& t : forest) {
        Path h = height_process(t);
        f.height.insert(f.height.end(), h.begin(), h.end());
        Path w = lukasiewicz_walk(t);
        for (std::size_t k = 1; k < w.size(); ++k) f.walk.push_back(w[k] + base);
        base -= 1;
        Path c = contour_process(t);
        f.contour.insert(f.contour.end(), c.begin() + 1, c.end());
    }
    return f;
}

inline std::string tree_to_text(const OrderedTree& t) {
    std::ostringstream os;
    for (std::size_t i = 0; i < t.children.size(); ++i) {
        if (i) os << ',';
        os << t.children[i];
    }
    return os.str();
}

inline OrderedTree tree_from_text(const std::string& line) {
    OrderedTree t;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        t.children.push_back(std::stoll(item));
    }
    validate_tree(t);
    return t;
}

}  // namespace stabletree
