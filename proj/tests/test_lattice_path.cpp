#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "stabletree/lattice_path.hpp"
#include "stabletree/oracle.hpp"
#include "stabletree/rng.hpp"

using namespace stabletree;

namespace {

// All paths from 0 with steps in [-1, max_step] and duration exactly z.
template <class Fn>
void for_each_path(int max_step, std::int64_t z, Fn&& fn) {
    std::vector<std::int64_t> step(static_cast<std::size_t>(z), -1);
    for (;;) {
        Path w(static_cast<std::size_t>(z) + 1, 0);
        for (std::int64_t k = 0; k < z; ++k) w[k + 1] = w[k] + step[k];
        fn(w);
        std::size_t i = 0;
        while (i < step.size() && step[i] == max_step) step[i++] = -1;
        if (i == step.size()) return;
        ++step[i];
    }
}

Path random_path(RandomStream& rng, std::int64_t z_max, std::int64_t step_max) {
    std::int64_t z = 1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(z_max)));
    Path w(static_cast<std::size_t>(z) + 1, 0);
    for (std::int64_t k = 0; k < z; ++k)
        w[k + 1] = w[k] + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(step_max + 2))) - 1;
    return w;
}

}  // namespace

TEST_CASE("ladder counts record weak running maxima") {
    CHECK(ladder_counts({0, -1, 0, -1}) == Path{0, 0, 1, 1});
    CHECK(ladder_counts({0, 1, 2, 3}) == Path{0, 1, 2, 3});
    CHECK(ladder_counts({0, -1, -2, -3}) == Path{0, 0, 0, 0});
    // ties count: revisiting the maximum is a ladder epoch
    CHECK(ladder_counts({0, 1, 0, 1}) == Path{0, 1, 1, 2});
}

TEST_CASE("path helpers validate their inputs") {
    CHECK_THROWS_AS(path_duration({1, 0}), std::invalid_argument);
    CHECK_THROWS_AS(shift_path({0, 1}, 2), std::invalid_argument);
    CHECK_THROWS_AS(reverse_path({0, 1}, -1), std::invalid_argument);
    CHECK_THROWS_AS(beta_split({0, 1, 0}, 1, 2), std::invalid_argument);
    CHECK_THROWS_AS(cyclic_shift_at({0, 1, 0}, 3), std::invalid_argument);
    CHECK_THROWS_AS(add_paths({0, 1}, {0, 1, 2}), std::invalid_argument);
    CHECK(is_skip_free(Path{0, 2, 1, 0, -1}));
    CHECK_FALSE(is_skip_free(Path{0, 1, -1}));
}

TEST_CASE("shift and reversal") {
    Path w{0, 1, 2, 1, 2, 1, 0, -1};
    CHECK(shift_path(w, 0) == w);
    CHECK(shift_path(w, 3) == Path{0, 1, 0, -1, -2});
    CHECK(reverse_path({0, -1, 0, -1}, 3) == Path{0, -1, 0, -1});
    CHECK(reverse_path(w, 4) == Path{0, 1, 0, 1, 2});
    // reversing twice over the full span is the identity
    for_each_path(2, 5, [](const Path& v) {
        std::int64_t z = path_duration(v);
        CHECK(reverse_path(reverse_path(v, z), z) == v);
    });
}

TEST_CASE("first passage uses level crossings with an off-the-end sentinel") {
    CHECK(first_passage({0, -1, 0, -1}, 1) == 4);
    CHECK(first_passage({0, -1, 0, -1}, 0) == 0);
    CHECK(first_passage({0, 2, 1, 0, -1}, 2) == 1);
    CHECK(first_passage({0, 2, 1, 0, -1}, 3) == 5);
}

TEST_CASE("height pins") {
    CHECK(height_from_walk({0, 1, 2, 1, 2, 1, 0, -1}) == Path{0, 1, 2, 2, 3, 3, 1, 0});
    CHECK(height_from_walk({0, -1, 0, -1}) == Path{0, 0, 1, 1});
    CHECK(height_from_walk({0, 0, 0, 0}) == Path{0, 1, 2, 3});
    CHECK(height_from_walk({0}) == Path{0});
}

TEST_CASE("stack height matches the quadratic reference") {
    for_each_path(2, 7, [](const Path& w) { REQUIRE(height_from_walk(w) == height_from_walk_reference(w)); });
    RandomStream rng(11, 0);
    for (int i = 0; i < 2000; ++i) {
        Path w = random_path(rng, 40, 6);
        REQUIRE(height_from_walk(w) == height_from_walk_reference(w));
    }
}

TEST_CASE("height equals the ladder count of the reversed prefix") {
    for_each_path(2, 7, [](const Path& w) {
        Path h = height_from_walk(w);
        for (std::int64_t n = 0; n <= path_duration(w); ++n) {
            Path rev = reverse_path(w, n);
            REQUIRE(h[n] == ladder_counts(rev)[n]);
        }
    });
}

TEST_CASE("height window identities against shift, reversal, and the split index") {
    auto check = [](const Path& w) {
        const std::int64_t z = path_duration(w);
        Path h = height_from_walk(w);
        for (std::int64_t n = 0; n <= z; ++n) {
            Path hs = height_from_walk(shift_path(w, n));
            Path lad = ladder_counts(reverse_path(w, n));
            std::int64_t window_min = h[n];
            for (std::int64_t m = 0; n + m <= z; ++m) {
                window_min = std::min(window_min, h[n + m]);
                REQUIRE(h[n + m] - window_min == hs[m]);
                REQUIRE(window_min == lad[n] - lad[beta_split(w, n, m)]);
            }
        }
    };
    for_each_path(2, 7, check);
    RandomStream rng(12, 0);
    for (int i = 0; i < 1500; ++i) check(random_path(rng, 24, 9));
}

TEST_CASE("split index stays inside its window and collapses at the borders") {
    // an empty forward window targets level 0, reached by the reversal at
    // once, so the split lands at 0; a window that undercuts everything the
    // reversal can reach collapses to n
    for_each_path(2, 6, [](const Path& w) {
        const std::int64_t z = path_duration(w);
        for (std::int64_t n = 0; n <= z; ++n) {
            REQUIRE(beta_split(w, n, 0) == 0);
            for (std::int64_t m = 0; n + m <= z; ++m) {
                std::int64_t b = beta_split(w, n, m);
                REQUIRE(b >= 0);
                REQUIRE(b <= n);
            }
        }
    });
    CHECK(beta_split({0, 0, -1, -2}, 1, 2) == 1);
}

TEST_CASE("rotation at the first minimum") {
    CHECK(first_argmin(Path{0, -1, 0, -1}) == 1);
    CHECK(first_argmin(Path{0, 1, 2}) == 0);
    CHECK(vervaat_rotate({0, -1, 0, -1}) == Path{0, 1, 0, -1});
    // minimum first attained at the endpoint: rotation is the identity
    CHECK(vervaat_rotate({0, 1, 0, -1}) == Path{0, 1, 0, -1});
    // increments are cyclically permuted, so their multiset survives
    RandomStream rng(13, 0);
    for (int i = 0; i < 2000; ++i) {
        Path w = random_path(rng, 30, 5);
        Path v = vervaat_rotate(w);
        std::multiset<std::int64_t> a, b;
        for (std::size_t k = 0; k + 1 < w.size(); ++k) {
            a.insert(w[k + 1] - w[k]);
            b.insert(v[k + 1] - v[k]);
        }
        REQUIRE(a == b);
    }
}

TEST_CASE("rotation maps bridges onto nonnegative-before-the-end paths") {
    for (std::int64_t p = 1; p <= 8; ++p) {
        std::map<std::string, std::int64_t> image;
        std::int64_t bridges = 0;
        for (const Path& w : enumerate_bridges(p)) {
            ++bridges;
            Path v = vervaat_rotate(w);
            REQUIRE(v.back() == -1);
            for (std::size_t k = 0; k + 1 < v.size(); ++k) REQUIRE(v[k] >= 0);
            ++image[detail::path_text(v)];
        }
        // cycle lemma: every excursion is hit by exactly p distinct bridges
        REQUIRE(static_cast<std::int64_t>(image.size()) * p == bridges);
        for (const auto& [key, hits] : image) REQUIRE(hits == p);
    }
}

TEST_CASE("ladder complement of a bridge") {
    CHECK(m_process({0, -1, 0, -1}) == Path{1, 0, 0, 0});

    Path w{0, -1, 0, -1};
    Path sum = add_paths(height_from_walk(w), m_process(w));
    CHECK(sum == Path{1, 0, 1, 1});
    CHECK(cyclic_shift_at(sum, first_argmin(w)) == Path{0, 1, 1, 0});

    for (std::int64_t p = 1; p <= 8; ++p) {
        for (const Path& w2 : enumerate_bridges(p)) {
            Path m = m_process(w2);
            Path h = height_from_walk(w2);
            std::int64_t g = first_argmin(w2);
            Path s = add_paths(h, m);
            // nonnegative, vanishing exactly where the bridge bottoms out
            for (std::int64_t k = 0; k <= p; ++k) REQUIRE(m[k] >= 0);
            REQUIRE(s[g] == 0);
            // rotating the sum reproduces the height of the rotated walk
            REQUIRE(cyclic_shift_at(s, g) == height_from_walk(vervaat_rotate(w2)));
        }
    }
}

TEST_CASE("ladder complement vanishes on excursion inputs") {
    // when the walk already is an excursion, the complement process is zero
    // after time 0 and the rotated sum is the height itself
    for_each_path(2, 6, [](const Path& w) {
        if (w.back() != -1) return;
        for (std::size_t k = 0; k + 1 < w.size(); ++k)
            if (w[k] < 0) return;
        Path m = m_process(w);
        for (std::size_t k = 1; k < m.size(); ++k) REQUIRE(m[k] == 0);
        REQUIRE(cyclic_shift_at(add_paths(height_from_walk(w), m), first_argmin(w)) == height_from_walk(w));
    });
}
