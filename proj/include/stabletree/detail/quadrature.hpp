#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace stabletree::detail {

// Adaptive Gauss-Kronrod 7-15.
template <typename F>
double gk15(F&& f, double a, double b, double* err_out = nullptr) {
    static const double xgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                  0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                  0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
                                  0.207784955007898467600689403773245, 0.0};
    static const double wgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                  0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                  0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                  0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
    static const double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                 0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double fc = f(c);
    double res_g = wg[3] * fc;
    double res_k = wgk[7] * fc;
    for (int i = 0; i < 7; ++i) {
        double x = h * xgk[i];
        double f1 = f(c - x), f2 = f(c + x);
        res_k += wgk[i] * (f1 + f2);
        if (i % 2 == 1) res_g += wg[i / 2] * (f1 + f2);
    }
    if (err_out) *err_out = std::abs((res_k - res_g) * h);
    return res_k * h;
}

template <typename F>
double integrate(F&& f, double a, double b, double abs_tol = 1e-11, int max_depth = 52) {
    struct Seg {
        double a, b;
        int depth;
    };
    double total = 0.0;
    std::vector<Seg> stack{{a, b, 0}};
    while (!stack.empty()) {
        Seg s = stack.back();
        stack.pop_back();
        double err = 0.0;
        double v = gk15(f, s.a, s.b, &err);
        if (err <= abs_tol * 0.5 || s.depth >= max_depth || !(s.b - s.a > 0)) {
            total += v;
            continue;
        }
        double m = 0.5 * (s.a + s.b);
        stack.push_back({s.a, m, s.depth + 1});
        stack.push_back({m, s.b, s.depth + 1});
    }
    return total;
}

// Integral over [a, infinity) via t -> a + t/(1-t).
template <typename F>
double integrate_upper(F&& f, double a, double abs_tol = 1e-11) {
    auto g = [&](double t) {
        double one_minus = 1.0 - t;
        double x = a + t / one_minus;
        return f(x) / (one_minus * one_minus);
    };
    return integrate(g, 0.0, 1.0, abs_tol);
}

}  // namespace stabletree::detail
