#pragma once

#include <memory>
#include <stdexcept>
#include <string>

namespace pyroscale {

// The five gap-law variants driving seed/match renewal streams.  Each one
// ships closed-form tails; the names reflect the decay of the gap tail.
enum class law_kind { dirac, exponential, weibull_tail, pareto_tail, log_tail };

// Tail regime of the stationary-delay law nu: decides which limit process
// the rescaled lattice process approaches as the match rate vanishes.
enum class tail_regime {
    bounded_support,  // gaps bounded by T_S
    polynomial,       // nu tail ~ t^{-beta}
    superpolynomial,  // nu tail decays faster than any polynomial
    logarithmic,      // nu tail ~ 1/log t
};

struct regime_error : std::domain_error {
    using std::domain_error::domain_error;
};

class weibull_quantile_table;

// Immutable description of a gap law on (0, infinity) with unit-free closed
// forms for:
//   tail_mu(t)  = P[gap > t]
//   tail_nu(t)  = m^{-1} * integral of tail_mu over (t, inf)   (stationary delay)
//   zeta_tail(t) = tail_nu(t) + t * tail_mu(t) / m             (size-biased gap)
// The zeta identity follows from integrating t' mu(dt')/m by parts, and turns
// size-biased sampling into plain quantile inversion for every variant.
class law_spec {
public:
    static law_spec dirac(double t_s = 1.0);
    static law_spec exponential();
    static law_spec weibull_tail(double alpha);
    static law_spec pareto_tail(double beta);
    static law_spec log_tail();

    law_kind kind() const { return kind_; }
    double param() const { return param_; }

    double mean_gap() const { return mean_; }
    double support_sup() const;  // T_S for dirac, +inf otherwise
    tail_regime regime() const;

    double tail_mu(double t) const;
    double tail_nu(double t) const;
    double cum_nu(double t) const { return 1.0 - tail_nu(t); }
    double zeta_tail(double t) const;

    // Quantiles parameterized by the tail value u in (0,1): tail(result) = u.
    // Feeding uniform u gives exact samples of the corresponding law.
    double quantile_mu(double u) const;
    double quantile_nu(double u) const;
    double quantile_zeta(double u) const;

    std::string name() const;

private:
    law_spec(law_kind k, double p);

    law_kind kind_;
    double param_;
    double mean_;
    std::shared_ptr<const weibull_quantile_table> table_;
};

// Inverse of t -> nu((0,t)).  Defined for the bounded-support and
// super-polynomial regimes (elsewhere the map is not the scaling tool the
// limit construction uses).  z >= 1 returns T_S under bounded support and the
// +infinity sentinel otherwise; other regimes raise regime_error.
double psi_s(const law_spec& law, double z);

// Inverse of t -> t / tail_nu(t), strictly increasing from 0.  Defined for
// every regime except bounded support (raises regime_error for dirac).
double phi_s(const law_spec& law, double z);

// Precomputed monotone quantile table for the WeibullTail stationary-delay
// law, whose inverse has no closed form.  4096 knots placed on a
// quadratically graded mesh in x = -ln(tail) (dense near x = 0, where the
// inverse carries a fractional-power x^(1+alpha) term whose curvature blows
// up), with linear interpolation inside each panel and O(1) panel lookup.
// Construction certifies a mixed interpolation error
// |approx - exact| <= 1e-6 * max(1, exact) at the quarter points of every
// panel and keeps the longest contiguous run of certified panels; queries
// outside that window — a head near u -> 1 where the fractional-power term
// defeats interpolation, and for extreme alpha a sliver near the table floor
// where the quantile's log-slope explodes — fall back to the exact inverse,
// as do queries below the floor itself.  For alpha >~ 0.5 the window covers
// everything and each query in (u_floor, 1) is a table lookup; as alpha -> 0
// the window shrinks and evaluation degrades gracefully toward exact (slow
// but correct).
class weibull_quantile_table {
public:
    explicit weibull_quantile_table(double alpha);

    double quantile_nu(double u) const;
    double max_interp_error() const { return max_err_; }
    // Certified window in x = -ln(u): queries with x outside
    // [exact_head_x, exact_tail_x] bypass the table.
    double exact_head_x() const { return x_head_; }
    double exact_tail_x() const { return x_tail_; }

    static constexpr int knots = 4096;
    static constexpr double u_floor = 1e-9;
    static constexpr double tolerance = 1e-6;

private:
    double exact(double u) const;
    double x_at(int i) const;

    double alpha_;
    double x_max_;
    double x_head_;
    double x_tail_;
    double max_err_;
    std::unique_ptr<double[]> t_;
};

} // namespace pyroscale
