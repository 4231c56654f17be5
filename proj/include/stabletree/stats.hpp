#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

namespace stabletree {

// Survival function of the Kolmogorov distribution, Q(lambda) = 2 sum (-1)^{j-1} exp(-2 j^2 lambda^2).
inline double kolmogorov_sf(double lambda) {
    if (lambda <= 0.0) return 1.0;
    double total = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 200; ++j) {
        double term = std::exp(-2.0 * j * j * lambda * lambda);
        total += sign * term;
        sign = -sign;
        if (term < 1e-16) break;
    }
    return std::min(1.0, std::max(0.0, 2.0 * total));
}

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

// Two-sample KS with the Stephens small-sample correction for the p-value.
inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    double ne = std::sqrt(na * nb / (na + nb));
    double lambda = (ne + 0.12 + 0.11 / ne) * d;
    return {d, kolmogorov_sf(lambda)};
}

inline KsResult ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf) {
    if (sample.empty()) throw std::invalid_argument("ks_one_sample: empty sample");
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t k = 0; k < sample.size(); ++k) {
        double c = cdf(sample[k]);
        d = std::max(d, std::abs(c - static_cast<double>(k) / n));
        d = std::max(d, std::abs(static_cast<double>(k + 1) / n - c));
    }
    double sn = std::sqrt(n);
    double lambda = (sn + 0.12 + 0.11 / sn) * d;
    return {d, kolmogorov_sf(lambda)};
}

struct Chi2Result {
    double statistic = 0.0;
    double p_value = 1.0;
    int dof = 0;
};

inline double chi2_sf(double x, int dof) {
    if (x <= 0.0) return 1.0;
    return boost::math::gamma_q(0.5 * dof, 0.5 * x);
}

inline Chi2Result chi2_goodness_of_fit(const std::vector<std::int64_t>& counts, const std::vector<double>& probs) {
    if (counts.size() != probs.size() || counts.empty()) throw std::invalid_argument("chi2_goodness_of_fit: size mismatch");
    double n = 0.0;
    for (auto c : counts) n += static_cast<double>(c);
    double stat = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        double expected = n * probs[i];
        if (expected <= 0.0) throw std::invalid_argument("chi2_goodness_of_fit: zero expected cell");
        double diff = static_cast<double>(counts[i]) - expected;
        stat += diff * diff / expected;
    }
    int dof = static_cast<int>(counts.size()) - 1;
    return {stat, chi2_sf(stat, dof), dof};
}

// Two-sample homogeneity test over matched category counts.
inline Chi2Result chi2_two_sample(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
    if (a.size() != b.size() || a.empty()) throw std::invalid_argument("chi2_two_sample: size mismatch");
    double na = 0.0, nb = 0.0;
    for (auto c : a) na += static_cast<double>(c);
    for (auto c : b) nb += static_cast<double>(c);
    double stat = 0.0;
    int dof = -1;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double tot = static_cast<double>(a[i] + b[i]);
        if (tot == 0.0) continue;
        double ea = tot * na / (na + nb), eb = tot * nb / (na + nb);
        double da = static_cast<double>(a[i]) - ea, db = static_cast<double>(b[i]) - eb;
        stat += da * da / ea + db * db / eb;
        ++dof;
    }
    if (dof < 1) throw std::invalid_argument("chi2_two_sample: fewer than two populated cells");
    return {stat, chi2_sf(stat, dof), dof};
}

template <typename K>
double tv_distance(const std::map<K, double>& p, const std::map<K, double>& q) {
    double d = 0.0;
    auto it = p.begin();
    auto jt = q.begin();
    while (it != p.end() || jt != q.end()) {
        if (jt == q.end() || (it != p.end() && it->first < jt->first)) {
            d += std::abs(it->second);
            ++it;
        } else if (it == p.end() || jt->first < it->first) {
            d += std::abs(jt->second);
            ++jt;
        } else {
            d += std::abs(it->second - jt->second);
            ++it;
            ++jt;
        }
    }
    return 0.5 * d;
}

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
};

inline SlopeFit least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("least_squares_slope: need >= 2 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return {slope, (sy - slope * sx) / n};
}

struct Summary {
    double mean = 0.0;
    double stderr_mean = 0.0;
    std::size_t n = 0;
};

inline Summary summarize(const std::vector<double>& xs) {
    Summary s;
    s.n = xs.size();
    if (xs.empty()) return s;
    double m = 0.0;
    for (double x : xs) m += x;
    m /= static_cast<double>(xs.size());
    double v = 0.0;
    for (double x : xs) v += (x - m) * (x - m);
    v = xs.size() > 1 ? v / static_cast<double>(xs.size() - 1) : 0.0;
    s.mean = m;
    s.stderr_mean = std::sqrt(v / static_cast<double>(xs.size()));
    return s;
}

inline double empirical_quantile(std::vector<double> xs, double q) {
    if (xs.empty()) throw std::invalid_argument("empirical_quantile: empty sample");
    std::sort(xs.begin(), xs.end());
    double pos = q * static_cast<double>(xs.size() - 1);
    std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= xs.size()) return xs.back();
    double frac = pos - static_cast<double>(lo);
    return xs[lo] * (1.0 - frac) + xs[lo + 1] * frac;
}

}  // namespace stabletree
