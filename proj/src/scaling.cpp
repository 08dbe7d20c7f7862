#include "pyroscale/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pyroscale {

double compute_a_lambda(const law_spec& law, double lambda) {
    if (!(lambda > 0.0) || lambda > 1.0)
        throw std::invalid_argument("a_lambda: lambda must lie in (0,1]");
    if (law.regime() == tail_regime::bounded_support) return law.support_sup();

    // g(a) = lambda*a - nu_tail(a) is strictly increasing with g(0) = -1,
    // so a sign change is guaranteed; bracket by doubling then bisect.
    auto g = [&](double a) { return lambda * a - law.tail_nu(a); };
    double lo = 0.0, hi = 1.0;
    int iter = 0;
    while (g(hi) < 0.0) {
        lo = hi;
        hi *= 2.0;
        if (++iter > 200)
            throw std::runtime_error("a_lambda: bracket expansion failed");
    }
    for (iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-15 * hi) break;
    }
    const double a = 0.5 * (lo + hi);
    if (!(std::fabs(lambda * a - law.tail_nu(a)) <= 1e-12 * lambda * a))
        throw std::runtime_error("a_lambda: residual above tolerance");
    return a;
}

std::int64_t compute_n_lambda(const law_spec& law, double lambda) {
    const double a = compute_a_lambda(law, lambda);
    return static_cast<std::int64_t>(std::floor(1.0 / (lambda * a)));
}

std::int64_t compute_m_lambda(const law_spec& law, double lambda,
                              double epsilon) {
    if (!(epsilon > 0.0) || epsilon >= 1.0)
        throw std::invalid_argument("m_lambda: epsilon must lie in (0,1)");
    const tail_regime reg = law.regime();
    if (reg == tail_regime::bounded_support)
        return std::max<std::int64_t>(
            1, static_cast<std::int64_t>(std::floor(std::sqrt(1.0 / lambda))));
    if (reg != tail_regime::superpolynomial)
        throw regime_error("m_lambda: defined for bounded-support and "
                           "super-polynomial regimes only");
    const double a = compute_a_lambda(law, lambda);
    const std::int64_t n = compute_n_lambda(law, lambda);
    const double tail = law.tail_nu(a * (1.0 - epsilon));
    double m = std::floor(1.0 / tail);
    if (!std::isfinite(m)) m = static_cast<double>(n);
    return std::clamp<std::int64_t>(static_cast<std::int64_t>(m), 1, n - 1);
}

scale_set compute_scales(const law_spec& law, double lambda, double epsilon) {
    scale_set s;
    s.lambda = lambda;
    s.a_lambda = compute_a_lambda(law, lambda);
    s.n_lambda = compute_n_lambda(law, lambda);
    s.regime = law.regime();
    switch (s.regime) {
        case tail_regime::bounded_support:
        case tail_regime::superpolynomial:
            s.m_lambda = compute_m_lambda(law, lambda, epsilon);
            break;
        default:
            // No window recipe in the polynomial/logarithmic regimes; the
            // density observable is not part of those limit constructions.
            s.m_lambda = 0;
            break;
    }
    return s;
}

regime_diagnostic classify_regime(const law_spec& law) {
    regime_diagnostic d{law.regime(), 0.0, false};
    if (d.tag == tail_regime::bounded_support) return d;

    d.diagnostic_run = true;
    const double xs[3] = {1e2, 1e3, 1e4};
    double sum_r = 0.0, sum_w = 0.0, sum_rw = 0.0, sum_w2 = 0.0;
    for (double x : xs) {
        const double t1 = law.tail_nu(x);
        const double t2 = law.tail_nu(2.0 * x);
        if (!(t2 > 0.0) || !(t1 > 0.0)) {
            // Tail underflowed double precision: faster than any polynomial.
            d.beta_hat = std::numeric_limits<double>::infinity();
            return d;
        }
        const double r = std::log2(t1 / t2);
        const double w = 1.0 / std::log(x);
        sum_r += r;
        sum_w += w;
        sum_rw += r * w;
        sum_w2 += w * w;
    }
    // Least-squares fit r = beta + c/ln(x); the intercept extrapolates the
    // finite-x ratio toward its limit.
    const int n = 3;
    const double denom = n * sum_w2 - sum_w * sum_w;
    const double c = (n * sum_rw - sum_w * sum_r) / denom;
    d.beta_hat = (sum_r - c * sum_w) / n;
    return d;
}

} // namespace pyroscale
