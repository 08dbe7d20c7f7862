#pragma once

#include <cmath>
#include <cstddef>

namespace pyroscale {

namespace detail {

template <typename F>
double adaptive_simpson_rec(const F& f, double a, double b, double fa,
                            double fm, double fb, double whole, double eps,
                            int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    // Standard Richardson acceptance test: Simpson error shrinks 15x per
    // halving, so |delta| < 15 eps certifies the requested tolerance.
    if (depth <= 0 || std::fabs(delta) <= 15.0 * eps) {
        return left + right + delta / 15.0;
    }
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, eps / 2.0,
                                depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, eps / 2.0,
                                depth - 1);
}

} // namespace detail

// Adaptive Simpson quadrature of f over [a,b] to absolute tolerance eps.
template <typename F>
double integrate(const F& f, double a, double b, double eps = 1e-12) {
    if (!(b > a)) return 0.0;
    const double fa = f(a);
    const double fb = f(b);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, eps, 52);
}

// Improper integral of f over [a, infinity).  The head [a, b] with
// b = max(a, 0) + 1 is integrated directly; the rest is integrated in log
// space (s = e^y), where power decay becomes exponential, exponential decay
// stays exponential, and even logarithmic decay like 1/(s ln^2 s) becomes a
// plain power law in y — all of which the rational map y = y0 + x/(1-x)
// then resolves on [0,1).  A single rational map without the log step
// silently loses mass for slowly decaying tails whose bulk sits beyond
// s ~ 1e16.
template <typename F>
double integrate_tail(const F& f, double a, double eps = 1e-12) {
    const double b = std::max(a, 0.0) + 1.0;
    const double head = integrate(f, a, b, eps / 2.0);
    const double y0 = std::log(b);
    auto g = [&](double x) {
        if (x >= 1.0) return 0.0;
        const double om = 1.0 - x;
        const double y = y0 + x / om;
        const double s = std::exp(y);
        if (!std::isfinite(s)) return 0.0;
        const double v = f(s) * s / (om * om);
        return std::isfinite(v) ? v : 0.0;
    };
    return head + integrate(g, 0.0, 1.0, eps / 2.0);
}

} // namespace pyroscale
