#pragma once

// Critical offspring laws: the geometric law mu(k) = 2^-(k+1), the family with
// generating function g(s) = s + (1-s)^alpha / alpha for alpha in (1, 2], and
// finite user-supplied tables.  Masses are exact rationals; partial sums of
// mass and mean have closed-form tails used to certify criticality without
// truncation error.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "stabletree/rational.hpp"
#include "stabletree/rng.hpp"

namespace stabletree {

enum class OffspringKind { Geometric, Stable, Table };

class OffspringLaw {
public:
    static OffspringLaw geometric() {
        OffspringLaw law;
        law.kind_ = OffspringKind::Geometric;
        law.alpha_ = 2;
        return law;
    }

    // g(s) = s + (1-s)^alpha / alpha:  mu(0) = 1/alpha, mu(1) = 0,
    // mu(j) = (-1)^j binom(alpha, j) / alpha.
    static OffspringLaw stable(const Rational& alpha) {
        if (alpha <= 1 || alpha > 2) throw std::invalid_argument("offspring: alpha must lie in (1, 2]");
        OffspringLaw law;
        law.kind_ = OffspringKind::Stable;
        law.alpha_ = alpha;
        law.build_stable_cumulative();
        return law;
    }

    static OffspringLaw table(std::vector<Rational> probs) {
        OffspringLaw law;
        law.kind_ = OffspringKind::Table;
        law.alpha_ = 2;
        law.table_ = std::move(probs);
        Rational total = 0;
        for (const auto& q : law.table_) {
            if (q < 0) throw std::invalid_argument("offspring: negative table mass");
            total += q;
        }
        if (total != 1) throw std::invalid_argument("offspring: table masses must sum to 1");
        double c = 0;
        for (const auto& q : law.table_) {
            c += to_double(q);
            law.cumulative_.push_back(c);
        }
        law.cumulative_.back() = 1.0;
        return law;
    }

    OffspringKind kind() const { return kind_; }
    const Rational& alpha() const { return alpha_; }

    Rational pmf(std::int64_t k) const {
        if (k < 0) return 0;
        switch (kind_) {
            case OffspringKind::Geometric: {
                Rational r(BigInt(1), BigInt(1) << static_cast<unsigned>(k + 1));
                return r;
            }
            case OffspringKind::Stable: {
                if (k == 0) return Rational(1) / alpha_;
                if (k == 1) return 0;
                Rational b = rational_binom(alpha_, static_cast<int>(k));
                if (k % 2) b = -b;
                return b / alpha_;
            }
            case OffspringKind::Table:
                return k < static_cast<std::int64_t>(table_.size()) ? table_[k] : Rational(0);
        }
        return 0;
    }

    double pmf_double(std::int64_t k) const { return to_double(pmf(k)); }

    // Step law of the associated walk: nu(s) = mu(s + 1), s >= -1.
    Rational step_pmf(std::int64_t s) const { return pmf(s + 1); }

    // sum_{j > K} mu(j), in closed form.
    Rational mass_tail(std::int64_t K) const {
        if (K < 0) return 1;
        switch (kind_) {
            case OffspringKind::Geometric:
                return Rational(BigInt(1), BigInt(1) << static_cast<unsigned>(K + 1));
            case OffspringKind::Stable: {
                if (K == 0) return 1 - Rational(1) / alpha_;
                Rational b = rational_binom(alpha_ - 1, static_cast<int>(K));
                if (K % 2 == 0) b = -b;
                return b / alpha_;
            }
            case OffspringKind::Table: {
                Rational s = 0;
                for (std::int64_t j = K + 1; j < static_cast<std::int64_t>(table_.size()); ++j) s += table_[j];
                return s;
            }
        }
        return 0;
    }

    // sum_{j > K} j mu(j), in closed form.
    Rational mean_tail(std::int64_t K) const {
        if (K < 0) return 1;
        switch (kind_) {
            case OffspringKind::Geometric:
                return Rational(BigInt(K + 2), BigInt(1) << static_cast<unsigned>(K + 1));
            case OffspringKind::Stable: {
                if (K == 0) return 1;
                Rational b = rational_binom(alpha_ - 2, static_cast<int>(K - 1));
                if (K % 2 == 0) b = -b;
                return b;
            }
            case OffspringKind::Table: {
                Rational s = 0;
                for (std::int64_t j = K + 1; j < static_cast<std::int64_t>(table_.size()); ++j) s += Rational(j) * table_[j];
                return s;
            }
        }
        return 0;
    }

    Rational partial_mass(std::int64_t K) const {
        Rational s = 0;
        for (std::int64_t j = 0; j <= K; ++j) s += pmf(j);
        return s;
    }

    // Exact mean, head sum plus closed-form tail.  1 for both built-in
    // families: criticality is recomputed, not a constructor flag.
    Rational mean() const { return partial_mean(0) + mean_tail(0); }

    // gcd{k >= 1 : mu(k) > 0} == 1.  The alpha = 2 member of the stable
    // family has support {0, 2} and is the one periodic law here.
    bool is_aperiodic() const {
        std::int64_t cap = max_support() >= 0 ? max_support() : 64;
        std::int64_t g = 0;
        for (std::int64_t k = 1; k <= cap; ++k) {
            if (pmf(k) == 0) continue;
            g = std::gcd(g, k);
            if (g == 1) return true;
        }
        return g == 1;
    }

    Rational partial_mean(std::int64_t K) const {
        Rational s = 0;
        for (std::int64_t j = 0; j <= K; ++j) s += Rational(j) * pmf(j);
        return s;
    }

    // 2 for every finite-variance law; alpha for the heavy-tailed family.
    double stable_index() const {
        if (kind_ == OffspringKind::Stable) return to_double(alpha_);
        return 2.0;
    }

    bool has_finite_variance() const {
        return kind_ != OffspringKind::Stable || alpha_ == 2;
    }

    double variance() const {
        switch (kind_) {
            case OffspringKind::Geometric:
                return 2.0;
            case OffspringKind::Stable:
                if (alpha_ == 2) return 1.0;  // mu = {0: 1/2, 2: 1/2}
                throw std::logic_error("offspring: infinite variance");
            case OffspringKind::Table: {
                double m2 = 0;
                for (std::size_t k = 0; k < table_.size(); ++k) m2 += double(k) * double(k) * to_double(table_[k]);
                return m2 - 1.0;
            }
        }
        return 0;
    }

    // Walk normalizer a_p: (p/alpha)^(1/alpha) in the heavy-tailed case,
    // sqrt(sigma^2 p / 2) when the variance is finite.
    double scaling(std::int64_t p) const {
        if (kind_ == OffspringKind::Stable && alpha_ != 2) {
            double a = to_double(alpha_);
            return std::pow(double(p) / a, 1.0 / a);
        }
        return std::sqrt(variance() * double(p) / 2.0);
    }

    // Height and contour normalizer p / a_p.  Coincides with a_p only when
    // sigma^2 = 2.
    double height_scaling(std::int64_t p) const { return double(p) / scaling(p); }

    std::int64_t max_support() const {
        if (kind_ == OffspringKind::Table) return static_cast<std::int64_t>(table_.size()) - 1;
        if (kind_ == OffspringKind::Stable && alpha_ == 2) return 2;
        return -1;
    }

    std::int64_t sample(RandomStream& rng) const {
        switch (kind_) {
            case OffspringKind::Geometric: {
                std::int64_t k = 0;
                for (;;) {
                    std::uint64_t u = rng.next_u64();
                    int ones = std::countr_one(u);
                    k += ones;
                    if (ones < 64) return k;
                }
            }
            case OffspringKind::Stable:
            case OffspringKind::Table: {
                double u = rng.uniform();
                auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
                if (it != cumulative_.end()) return static_cast<std::int64_t>(it - cumulative_.begin());
                if (kind_ == OffspringKind::Table) return static_cast<std::int64_t>(table_.size()) - 1;
                return stable_tail_quantile(1.0 - u);
            }
        }
        return 0;
    }

    // Step pmf as doubles for s in [-1, cap], indexed by s + 1.
    std::vector<double> step_pmf_table(std::int64_t cap) const {
        std::vector<double> nu(static_cast<std::size_t>(cap) + 2, 0.0);
        if (kind_ == OffspringKind::Stable && alpha_ != 2) {
            double a = to_double(alpha_);
            nu[0] = 1.0 / a;                // s = -1
            nu[1] = 0.0;                    // s = 0
            double term = to_double(pmf(2));  // mu(2) = alpha(alpha-1)/2 / alpha
            for (std::int64_t j = 2; j <= cap + 1; ++j) {
                nu[j - 1 + 1] = term;
                term *= (double(j) - a) / double(j + 1);
            }
        } else if (kind_ == OffspringKind::Geometric) {
            double term = 0.5;
            for (std::int64_t j = 0; j <= cap + 1; ++j) {
                nu[j] = term;  // mu(j) at step s = j - 1
                term *= 0.5;
            }
        } else if (kind_ == OffspringKind::Stable) {  // alpha == 2
            nu[0] = 0.5;
            if (cap >= 1) nu[2] = 0.5;
        } else {
            for (std::int64_t j = 0; j < static_cast<std::int64_t>(table_.size()) && j <= cap + 1; ++j)
                nu[j] = to_double(table_[j]);
        }
        return nu;
    }

private:
    OffspringLaw() = default;

    void build_stable_cumulative() {
        if (alpha_ == 2) {
            cumulative_ = {0.5, 0.5, 1.0};
            return;
        }
        const std::int64_t cap = 1 << 16;
        double a = to_double(alpha_);
        cumulative_.reserve(cap + 1);
        cumulative_.push_back(1.0 / a);          // mu(0)
        cumulative_.push_back(1.0 / a);          // mu(1) = 0
        double term = to_double(pmf(2));
        double c = 1.0 / a;
        for (std::int64_t j = 2; j <= cap; ++j) {
            c += term;
            cumulative_.push_back(c);
            term *= (double(j) - a) / double(j + 1);
        }
        cumulative_.back() = 1.0 - stable_tail_double(cap);
    }

    double stable_tail_double(std::int64_t K) const {
        double a = to_double(alpha_);
        // sum_{j>K} mu(j) = Gamma(K+1-a) / (a K! |Gamma(1-a)|)
        double lg = std::lgamma(double(K) + 1.0 - a) - std::lgamma(double(K) + 1.0);
        return std::exp(lg) / (a * std::abs(std::tgamma(1.0 - a)));
    }

    std::int64_t stable_tail_quantile(double tail_target) const {
        std::int64_t lo = static_cast<std::int64_t>(cumulative_.size()) - 1;
        std::int64_t hi = lo * 2;
        while (stable_tail_double(hi) > tail_target) {
            lo = hi;
            hi *= 2;
        }
        while (lo < hi) {
            std::int64_t mid = lo + (hi - lo) / 2;
            if (stable_tail_double(mid) <= tail_target)
                hi = mid;
            else
                lo = mid + 1;
        }
        return lo;
    }

    OffspringKind kind_ = OffspringKind::Geometric;
    Rational alpha_ = 2;
    std::vector<Rational> table_;
    std::vector<double> cumulative_;
};

// Convolution table f(m, k) = P(W_m = k) for the step law nu, m <= n.  Steps
// are truncated at value n-1; that is exact for events like {W_n = -1}, where
// no single step of a contributing path can exceed n-2.  The dropped step
// mass is tracked so each row satisfies  row sum + lost == 1  exactly in
// rational mode; float mode truncates at step tail mass 1e-15 instead and
// reports it.
class WalkLawTable {
public:
    static WalkLawTable exact(const OffspringLaw& law, std::int64_t n) {
        WalkLawTable t(n, true);
        std::int64_t max_step = n - 1;
        std::vector<Rational> nu(static_cast<std::size_t>(max_step) + 2);
        for (std::int64_t s = -1; s <= max_step; ++s) nu[s + 1] = law.step_pmf(s);
        t.step_tail_exact_ = law.mass_tail(max_step + 1);
        t.rows_exact_.resize(static_cast<std::size_t>(n) + 1);
        t.rows_exact_[0] = {Rational(1)};
        for (std::int64_t m = 1; m <= n; ++m) {
            auto& prev = t.rows_exact_[m - 1];
            auto& row = t.rows_exact_[m];
            row.assign(prev.size() + nu.size() - 1, Rational(0));
            for (std::size_t i = 0; i < prev.size(); ++i) {
                if (prev[i] == 0) continue;
                for (std::size_t j = 0; j < nu.size(); ++j)
                    if (nu[j] != 0) row[i + j] += prev[i] * nu[j];
            }
        }
        return t;
    }

    // Float mode keeps (nearly) the whole step support: all of it for finite
    // laws, tail below 1e-15 for the geometric, and a hard cap for the
    // power-tailed family, whose dropped mass is reported, not hidden.
    static WalkLawTable floating(const OffspringLaw& law, std::int64_t n) {
        WalkLawTable t(n, false);
        std::int64_t max_step;
        if (law.max_support() >= 0)
            max_step = law.max_support() - 1;
        else if (law.kind() == OffspringKind::Geometric)
            max_step = 60;  // step tail 2^-62
        else
            max_step = 4096;
        std::vector<double> nu = law.step_pmf_table(max_step);
        double kept = 0.0;
        for (double v : nu) kept += v;
        t.step_tail_float_ = std::max(0.0, 1.0 - kept);
        t.rows_float_.resize(static_cast<std::size_t>(n) + 1);
        t.rows_float_[0] = {1.0};
        for (std::int64_t m = 1; m <= n; ++m) {
            auto& prev = t.rows_float_[m - 1];
            auto& row = t.rows_float_[m];
            row.assign(prev.size() + nu.size() - 1, 0.0);
            for (std::size_t i = 0; i < prev.size(); ++i) {
                if (prev[i] == 0.0) continue;
                for (std::size_t j = 0; j < nu.size(); ++j) row[i + j] += prev[i] * nu[j];
            }
        }
        return t;
    }

    std::int64_t horizon() const { return n_; }
    bool is_exact() const { return exact_; }
    double truncation_error() const { return exact_ ? to_double(step_tail_exact_) : step_tail_float_; }

    // P(W_m = k); zero outside the stored range.
    Rational exact_value(std::int64_t m, std::int64_t k) const {
        check_row(m);
        if (!exact_) throw std::logic_error("walk table: float mode has no exact values");
        const auto& row = rows_exact_[static_cast<std::size_t>(m)];
        std::int64_t idx = k + m;
        if (idx < 0 || idx >= static_cast<std::int64_t>(row.size())) return 0;
        return row[static_cast<std::size_t>(idx)];
    }

    double value(std::int64_t m, std::int64_t k) const {
        if (exact_) return to_double(exact_value(m, k));
        check_row(m);
        const auto& row = rows_float_[static_cast<std::size_t>(m)];
        std::int64_t idx = k + m;
        if (idx < 0 || idx >= static_cast<std::int64_t>(row.size())) return 0.0;
        return row[static_cast<std::size_t>(idx)];
    }

    Rational exact_row_sum(std::int64_t m) const {
        check_row(m);
        if (!exact_) throw std::logic_error("walk table: float mode has no exact values");
        Rational s = 0;
        for (const auto& q : rows_exact_[static_cast<std::size_t>(m)]) s += q;
        return s;
    }

    // Mass lost to the step truncation after m steps: 1 - (1 - tail)^m.
    Rational exact_lost(std::int64_t m) const {
        check_row(m);
        if (!exact_) throw std::logic_error("walk table: float mode has no exact values");
        Rational keep = 1;
        Rational per_step = 1 - step_tail_exact_;
        for (std::int64_t i = 0; i < m; ++i) keep *= per_step;
        return 1 - keep;
    }

private:
    WalkLawTable(std::int64_t n, bool ex) : n_(n), exact_(ex) {
        if (n < 0) throw std::invalid_argument("walk table: negative horizon");
    }
    void check_row(std::int64_t m) const {
        if (m < 0 || m > n_) throw std::out_of_range("walk table: row out of range");
    }

    std::int64_t n_ = 0;
    bool exact_ = true;
    std::vector<std::vector<Rational>> rows_exact_;
    std::vector<std::vector<double>> rows_float_;
    Rational step_tail_exact_ = 0;
    double step_tail_float_ = 0;
};

}  // namespace stabletree
