#pragma once

#include "pyroscale/law.hpp"

#include <cstdint>

namespace pyroscale {

// The time / space / mesoscopic-window scales under which the discrete
// process converges, for one match rate lambda.
struct scale_set {
    double lambda = 0.0;
    double a_lambda = 0.0;   // time acceleration: lambda * a = nu-tail(a)
    std::int64_t n_lambda = 0;  // space unit: floor(1 / (lambda a))
    std::int64_t m_lambda = 0;  // density-window half-width
    tail_regime regime = tail_regime::superpolynomial;
};

// Bounded support: a = T_S.  Otherwise the unique root of the strictly
// monotone map a -> lambda*a - nu-tail(a), found by doubling bracket +
// bisection with a 200-iteration cap; relative residual below 1e-12.
double compute_a_lambda(const law_spec& law, double lambda);

std::int64_t compute_n_lambda(const law_spec& law, double lambda);

// Bounded support: floor(sqrt(1/lambda)).  Super-polynomial:
// floor(1 / nu-tail(a_lambda (1-epsilon))), clamped to [1, n_lambda - 1].
// epsilon is a diagnostic knob; the scaling theory only requires a window
// that grows while staying space-unit-negligible, which any fixed epsilon
// delivers at finite lambda.
std::int64_t compute_m_lambda(const law_spec& law, double lambda,
                              double epsilon = 0.1);

scale_set compute_scales(const law_spec& law, double lambda,
                         double epsilon = 0.1);

// Numeric tail-regime diagnostic.  beta_hat extrapolates the dyadic
// log-ratio r(x) = log2[nu-tail(x) / nu-tail(2x)] sampled at x = 1e2, 1e3,
// 1e4 by regressing r against 1/ln(x) and reporting the intercept; the ratio
// converges to beta for polynomial tails, to 0 for logarithmic ones, and
// blows up (here: +inf once the tail underflows) for super-polynomial ones.
// Bounded-support laws skip the diagnostic.
struct regime_diagnostic {
    tail_regime tag;
    double beta_hat;
    bool diagnostic_run;
};

regime_diagnostic classify_regime(const law_spec& law);

} // namespace pyroscale
