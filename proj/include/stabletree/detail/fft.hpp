#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace stabletree::detail {

inline void fft_in_place(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    const double pi = 3.14159265358979323846264338327950288;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        double ang = 2 * pi / static_cast<double>(len) * (inverse ? -1 : 1);
        std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                std::complex<double> u = a[i + j];
                std::complex<double> v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse) {
        for (auto& x : a) x /= static_cast<double>(n);
    }
}

// Linear convolution of nonnegative sequences; negative roundoff is clamped.
inline std::vector<double> convolve(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.empty() || y.empty()) return {};
    const std::size_t out_len = x.size() + y.size() - 1;
    if (static_cast<double>(x.size()) * static_cast<double>(y.size()) <= 4.0e6) {
        std::vector<double> out(out_len, 0.0);
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i] == 0.0) continue;
            for (std::size_t j = 0; j < y.size(); ++j) out[i + j] += x[i] * y[j];
        }
        return out;
    }
    std::size_t n = 1;
    while (n < out_len) n <<= 1;
    std::vector<std::complex<double>> fa(n), fb(n);
    for (std::size_t i = 0; i < x.size(); ++i) fa[i] = x[i];
    for (std::size_t i = 0; i < y.size(); ++i) fb[i] = y[i];
    fft_in_place(fa, false);
    fft_in_place(fb, false);
    for (std::size_t i = 0; i < n; ++i) fa[i] *= fb[i];
    fft_in_place(fa, true);
    std::vector<double> out(out_len);
    for (std::size_t i = 0; i < out_len; ++i) out[i] = fa[i].real() < 0.0 ? 0.0 : fa[i].real();
    return out;
}

}  // namespace stabletree::detail
