#include "pyroscale/law.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <cstdio>
#include <limits>

namespace pyroscale {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();
constexpr double euler_e = 2.718281828459045235360287471352662498;

// Invert a strictly decreasing map f with f(0+) = 1 and f -> 0, solving
// f(t) = u.  Bracket by doubling, then fixed-count bisection; 100 halvings
// land within one ulp of the root for every range met in practice.
template <typename F>
double invert_decreasing(const F& f, double u) {
    double lo = 0.0, hi = 1.0;
    int guard = 0;
    while (f(hi) > u) {
        lo = hi;
        hi *= 2.0;
        if (++guard > 2000) return inf;
    }
    for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) > u)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

law_spec::law_spec(law_kind k, double p) : kind_(k), param_(p), mean_(0.0) {
    switch (kind_) {
        case law_kind::dirac:
            mean_ = param_;
            break;
        case law_kind::exponential:
            mean_ = 1.0;
            break;
        case law_kind::weibull_tail:
            // integral of exp(-t^alpha) over (0,inf)
            mean_ = std::tgamma(1.0 + 1.0 / param_);
            table_ = std::make_shared<weibull_quantile_table>(param_);
            break;
        case law_kind::pareto_tail:
            // integral of (1+t/beta)^{-beta-1} = beta/beta = 1 exactly
            mean_ = 1.0;
            break;
        case law_kind::log_tail:
            // integral of e (e+t)^{-1} log(e+t)^{-2} = e exactly
            mean_ = euler_e;
            break;
    }
}

law_spec law_spec::dirac(double t_s) {
    if (!(t_s > 0.0)) throw std::invalid_argument("dirac: T_S must be > 0");
    return law_spec(law_kind::dirac, t_s);
}
law_spec law_spec::exponential() { return law_spec(law_kind::exponential, 1.0); }
law_spec law_spec::weibull_tail(double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("weibull: alpha must be > 0");
    return law_spec(law_kind::weibull_tail, alpha);
}
law_spec law_spec::pareto_tail(double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("pareto: beta must be > 0");
    return law_spec(law_kind::pareto_tail, beta);
}
law_spec law_spec::log_tail() { return law_spec(law_kind::log_tail, 0.0); }

double law_spec::support_sup() const {
    return kind_ == law_kind::dirac ? param_ : inf;
}

tail_regime law_spec::regime() const {
    switch (kind_) {
        case law_kind::dirac: return tail_regime::bounded_support;
        case law_kind::exponential: return tail_regime::superpolynomial;
        case law_kind::weibull_tail: return tail_regime::superpolynomial;
        case law_kind::pareto_tail: return tail_regime::polynomial;
        case law_kind::log_tail: return tail_regime::logarithmic;
    }
    return tail_regime::superpolynomial;
}

double law_spec::tail_mu(double t) const {
    if (t <= 0.0) return 1.0;
    switch (kind_) {
        case law_kind::dirac:
            return t < param_ ? 1.0 : 0.0;
        case law_kind::exponential:
            return std::exp(-t);
        case law_kind::weibull_tail:
            return std::exp(-std::pow(t, param_));
        case law_kind::pareto_tail:
            return std::pow(1.0 + t / param_, -param_ - 1.0);
        case law_kind::log_tail: {
            const double l = std::log(euler_e + t);
            return euler_e / ((euler_e + t) * l * l);
        }
    }
    return 0.0;
}

double law_spec::tail_nu(double t) const {
    if (t <= 0.0) return 1.0;
    switch (kind_) {
        case law_kind::dirac:
            return t >= param_ ? 0.0 : 1.0 - t / param_;
        case law_kind::exponential:
            return std::exp(-t);
        case law_kind::weibull_tail:
            // m^{-1} integral of exp(-s^alpha) over (t,inf) equals the
            // regularized upper incomplete gamma Q(1/alpha, t^alpha)
            // (substitute x = s^alpha; unit tests re-derive this by
            // quadrature).
            return boost::math::gamma_q(1.0 / param_, std::pow(t, param_));
        case law_kind::pareto_tail:
            return std::pow(1.0 + t / param_, -param_);
        case law_kind::log_tail:
            return 1.0 / std::log(euler_e + t);
    }
    return 0.0;
}

double law_spec::zeta_tail(double t) const {
    if (t <= 0.0) return 1.0;
    if (kind_ == law_kind::dirac) return t < param_ ? 1.0 : 0.0;
    return tail_nu(t) + t * tail_mu(t) / mean_;
}

double law_spec::quantile_mu(double u) const {
    switch (kind_) {
        case law_kind::dirac:
            return param_;
        case law_kind::exponential:
            return -std::log(u);
        case law_kind::weibull_tail:
            return std::pow(-std::log(u), 1.0 / param_);
        case law_kind::pareto_tail:
            return param_ * (std::pow(u, -1.0 / (param_ + 1.0)) - 1.0);
        case law_kind::log_tail:
            return invert_decreasing([this](double t) { return tail_mu(t); }, u);
    }
    return 0.0;
}

double law_spec::quantile_nu(double u) const {
    switch (kind_) {
        case law_kind::dirac:
            return param_ * (1.0 - u);
        case law_kind::exponential:
            return -std::log(u);
        case law_kind::weibull_tail:
            return table_->quantile_nu(u);
        case law_kind::pareto_tail:
            return param_ * (std::pow(u, -1.0 / param_) - 1.0);
        case law_kind::log_tail:
            // exp(1/u) overflows below u ~ 1/709; the capped value (~1e304)
            // still exceeds every finite horizon, and perturbs tail CDFs by
            // at most ~1.5e-3 in the sub-overflow region.
            return std::exp(std::min(1.0 / u, 700.0)) - euler_e;
    }
    return 0.0;
}

double law_spec::quantile_zeta(double u) const {
    if (kind_ == law_kind::dirac) return param_;
    return invert_decreasing([this](double t) { return zeta_tail(t); }, u);
}

std::string law_spec::name() const {
    char buf[64];
    switch (kind_) {
        case law_kind::dirac:
            std::snprintf(buf, sizeof buf, "dirac(%g)", param_);
            break;
        case law_kind::exponential:
            std::snprintf(buf, sizeof buf, "exponential");
            break;
        case law_kind::weibull_tail:
            std::snprintf(buf, sizeof buf, "weibull(%g)", param_);
            break;
        case law_kind::pareto_tail:
            std::snprintf(buf, sizeof buf, "pareto(%g)", param_);
            break;
        case law_kind::log_tail:
            std::snprintf(buf, sizeof buf, "log");
            break;
    }
    return buf;
}

double psi_s(const law_spec& law, double z) {
    if (z < 0.0) throw std::invalid_argument("psi_s: z must be >= 0");
    switch (law.regime()) {
        case tail_regime::bounded_support:
            return z >= 1.0 ? law.support_sup() : law.support_sup() * z;
        case tail_regime::superpolynomial:
            if (z >= 1.0) return inf;
            if (z == 0.0) return 0.0;
            if (law.kind() == law_kind::exponential) return -std::log1p(-z);
            return law.quantile_nu(1.0 - z);
        default:
            throw regime_error("psi_s: defined for bounded-support and "
                               "super-polynomial regimes only");
    }
}

double phi_s(const law_spec& law, double z) {
    if (law.regime() == tail_regime::bounded_support)
        throw regime_error("phi_s: undefined for bounded-support laws");
    if (!(z > 0.0)) return 0.0;
    // t / tail_nu(t) increases strictly from 0; reuse the decreasing-map
    // inversion on its reciprocal-like transform via negation of the order.
    double lo = 0.0, hi = 1.0;
    int guard = 0;
    while (hi / law.tail_nu(hi) < z) {
        lo = hi;
        hi *= 2.0;
        if (++guard > 2000) return inf;
    }
    for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid / law.tail_nu(mid) < z)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double weibull_quantile_table::x_at(int i) const {
    const double s = static_cast<double>(i) / (knots - 1);
    return x_max_ * s * s;
}

weibull_quantile_table::weibull_quantile_table(double alpha)
    : alpha_(alpha), x_max_(-std::log(u_floor)), x_head_(0.0), x_tail_(0.0),
      max_err_(0.0), t_(new double[knots]) {
    for (int i = 0; i < knots; ++i) {
        t_[i] = exact(std::exp(-x_at(i)));
        if (i > 0 && !(t_[i] >= t_[i - 1]))
            throw std::logic_error("weibull quantile table not monotone");
    }
    // Certify each panel at its quarter points.  The error is mixed
    // absolute/relative: the quantile spans many orders of magnitude (up to
    // ~1e16 near the table floor for small alpha), where only relative
    // accuracy is meaningful or even representable.
    const int panels = knots - 1;
    std::vector<double> panel_err(panels, 0.0);
    for (int i = 0; i < panels; ++i) {
        const double x0 = x_at(i), x1 = x_at(i + 1);
        for (const double frac : {0.25, 0.5, 0.75}) {
            const double x = x0 + frac * (x1 - x0);
            const double approx = t_[i] + frac * (t_[i + 1] - t_[i]);
            const double ex = exact(std::exp(-x));
            const double err =
                std::fabs(approx - ex) / std::max(1.0, std::fabs(ex));
            if (err > panel_err[i]) panel_err[i] = err;
        }
    }
    // Keep the longest contiguous certified run; everything outside it is
    // served exactly.  An empty run leaves the window inverted so every
    // query takes the exact path — slower but still correct.
    int best_lo = 0, best_hi = 0, run_lo = 0;
    for (int i = 0; i <= panels; ++i) {
        if (i == panels || panel_err[i] >= tolerance) {
            if (i - run_lo > best_hi - best_lo) { best_lo = run_lo; best_hi = i; }
            run_lo = i + 1;
        }
    }
    if (best_hi > best_lo) {
        x_head_ = x_at(best_lo);
        x_tail_ = x_at(best_hi);
        for (int i = best_lo; i < best_hi; ++i)
            max_err_ = std::max(max_err_, panel_err[i]);
    } else {
        x_head_ = x_max_ + 1.0;
        x_tail_ = 0.0;
    }
}

double weibull_quantile_table::exact(double u) const {
    if (u >= 1.0) return 0.0;
    return std::pow(boost::math::gamma_q_inv(1.0 / alpha_, u), 1.0 / alpha_);
}

double weibull_quantile_table::quantile_nu(double u) const {
    if (u >= 1.0) return 0.0;
    if (u <= u_floor) return exact(u);
    const double x = -std::log(u);
    if (x < x_head_ || x > x_tail_) return exact(u);
    // Invert the graded mesh analytically: i(x) = (knots-1) * sqrt(x/x_max).
    const double pos = (knots - 1) * std::sqrt(x / x_max_);
    const int k = std::min(static_cast<int>(pos), knots - 2);
    const double x0 = x_at(k), x1 = x_at(k + 1);
    const double frac = (x - x0) / (x1 - x0);
    return t_[k] + frac * (t_[k + 1] - t_[k]);
}

} // namespace pyroscale
