#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace stabletree {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt catalan_number(int n) {
    if (n < 0) throw std::invalid_argument("catalan_number: n must be >= 0");
    BigInt num = 1, den = 1;
    for (int k = 2; k <= n; ++k) {
        num *= (n + k);
        den *= k;
    }
    return num / den;
}

// Generalized binomial binom(a, j) for rational a, exact.
inline Rational rational_binom(const Rational& a, int j) {
    if (j < 0) throw std::invalid_argument("rational_binom: j must be >= 0");
    Rational r = 1;
    for (int i = 0; i < j; ++i) {
        r *= (a - i);
        r /= (i + 1);
    }
    return r;
}

// Parses "3/4", "-1/2", "0.25", "2" exactly. Finite decimals are exact rationals.
inline Rational parse_rational(const std::string& text) {
    std::string s = text;
    auto bad = [&]() { throw std::invalid_argument("parse_rational: cannot parse '" + text + "'"); };
    if (s.empty()) bad();
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        BigInt num(s.substr(0, slash));
        BigInt den(s.substr(slash + 1));
        if (den == 0) bad();
        return Rational(num, den);
    }
    auto dot = s.find('.');
    auto exp_pos = s.find_first_of("eE");
    long exp10 = 0;
    if (exp_pos != std::string::npos) {
        exp10 = std::stol(s.substr(exp_pos + 1));
        s = s.substr(0, exp_pos);
        dot = s.find('.');
    }
    std::string digits = s;
    long frac_len = 0;
    if (dot != std::string::npos) {
        frac_len = static_cast<long>(s.size() - dot - 1);
        digits = s.substr(0, dot) + s.substr(dot + 1);
    }
    if (digits.empty() || digits == "-" || digits == "+") bad();
    BigInt num(digits);
    Rational r(num, 1);
    long shift = exp10 - frac_len;
    BigInt ten = 10;
    if (shift > 0) {
        for (long i = 0; i < shift; ++i) r *= ten;
    } else {
        for (long i = 0; i < -shift; ++i) r /= ten;
    }
    return r;
}

inline double to_double(const Rational& r) { return static_cast<double>(r); }

inline std::string to_string(const Rational& r) { return r.str(); }

}  // namespace stabletree
