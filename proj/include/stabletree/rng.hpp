#pragma once

// Counter-based RNG (Philox4x32-10). Every draw is addressed by
// (seed, stream, counter), so replicate r of a study can run on any thread
// and still produce the same bytes.

#include <cmath>
#include <cstdint>

namespace stabletree {

class Philox4x32 {
public:
    Philox4x32(std::uint64_t seed, std::uint64_t stream) : key0_(static_cast<std::uint32_t>(seed)), key1_(static_cast<std::uint32_t>(seed >> 32)) {
        ctr_[0] = 0;
        ctr_[1] = 0;
        ctr_[2] = static_cast<std::uint32_t>(stream);
        ctr_[3] = static_cast<std::uint32_t>(stream >> 32);
        refill();
    }

    std::uint32_t next_u32() {
        if (pos_ == 4) {
            advance_counter();
            refill();
        }
        return out_[pos_++];
    }

    std::uint64_t next_u64() {
        std::uint64_t lo = next_u32();
        std::uint64_t hi = next_u32();
        return (hi << 32) | lo;
    }

    // Uniform on the open interval (0,1); safe under log().
    double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    double exponential() { return -std::log(uniform()); }

    // Box-Muller; draws two uniforms per pair, caches the second value.
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = uniform(), u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

    // k uniform in {0,...,n-1}, unbiased via rejection of the tail block.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) return 0;
        std::uint64_t limit = ~std::uint64_t(0) - (~std::uint64_t(0) % n + 1) % n;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x > limit);
        return x % n;
    }

private:
    static std::uint32_t mulhi(std::uint32_t a, std::uint32_t b) { return static_cast<std::uint32_t>((static_cast<std::uint64_t>(a) * b) >> 32); }
    static std::uint32_t mullo(std::uint32_t a, std::uint32_t b) { return a * b; }

    void advance_counter() {
        if (++ctr_[0] == 0)
            if (++ctr_[1] == 0)
                if (++ctr_[2] == 0) ++ctr_[3];
    }

    void refill() {
        std::uint32_t x0 = ctr_[0], x1 = ctr_[1], x2 = ctr_[2], x3 = ctr_[3];
        std::uint32_t k0 = key0_, k1 = key1_;
        for (int round = 0; round < 10; ++round) {
            std::uint32_t hi0 = mulhi(0xD2511F53u, x0), lo0 = mullo(0xD2511F53u, x0);
            std::uint32_t hi1 = mulhi(0xCD9E8D57u, x2), lo1 = mullo(0xCD9E8D57u, x2);
            std::uint32_t y0 = hi1 ^ x1 ^ k0, y1 = lo1, y2 = hi0 ^ x3 ^ k1, y3 = lo0;
            x0 = y0;
            x1 = y1;
            x2 = y2;
            x3 = y3;
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        out_[0] = x0;
        out_[1] = x1;
        out_[2] = x2;
        out_[3] = x3;
        pos_ = 0;
    }

    std::uint32_t key0_, key1_;
    std::uint32_t ctr_[4];
    std::uint32_t out_[4];
    int pos_ = 0;
    bool have_cached_ = false;
    double cached_ = 0.0;
};

using RandomStream = Philox4x32;

}  // namespace stabletree
