#pragma once

#include "pyroscale/law.hpp"
#include "pyroscale/rng.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <utility>
#include <vector>

namespace pyroscale {

// -------------------------------------------------------------------------
// Match marks
// -------------------------------------------------------------------------

// One match mark: time, position, and an attached uniform value consumed if
// the mark erects a barrier.  The value is drawn for every mark regardless of
// use, so trajectories driven by different height rules share bit-identical
// mark streams.
struct lff_mark {
    double t, x, v;
};

// Poisson(2*A*T) marks, i.i.d. uniform on [0,T] x [-A,A] x [0,1], sorted by
// time.
std::vector<lff_mark> poisson_marks(double half_width, double horizon,
                                    counter_rng& rng);

struct lff_event {
    double t;
    double x;      // mark position
    bool macro;    // true: fire destroyed [left,right]; false: barrier of `height`
    double left, right;
    double height;
};

// -------------------------------------------------------------------------
// Barrier heights
// -------------------------------------------------------------------------

// Joint law of (cluster ignition, regrowth delay) for a bounded-support seed
// law with gap supremum T: g(t, s) is the probability that a stationary seed
// stream has an epoch in (0, T*t] and another in (T*t, T*(t+s)].  Closed form
// for the degenerate (fixed-gap) law; throws regime_error otherwise.  (The
// fixed-gap law is the only bounded-support variant in the menu; a future one
// would route through mc_g_s below.)
double g_s(const law_spec& law, double t, double s);

struct mc_estimate {
    double value;
    double std_error;
};

// Monte Carlo estimate of the same probability by direct stream simulation,
// with its binomial standard error.  Works for any bounded-support law; used
// as the independent oracle for the closed form.
mc_estimate mc_g_s(const law_spec& law, double t, double s, std::int64_t n,
                   counter_rng& rng);

// Law of the regrowth delay after burning the cluster grown from empty for
// time T*u: an atom at 0 of mass nu((T u, T)) plus a continuous part,
//   cdf(h) = w + (w / (1 - g(u,h)))^2 * g(u,h),     w = nu((T u, T)).
double theta_cdf(const law_spec& law, double u, double h);

// Generalized inverse of theta_cdf in h (bisection; exact atom handling).
double theta_quantile(const law_spec& law, double u, double v);

enum class theta_method {
    cdf_inversion,  // u = uniform -> quantile
    regeneration,   // simulate the lattice experiment the law comes from
};

// Draw from the regrowth-delay law by either method.  The regeneration
// method grows an empty lattice with i.i.d. stationary seed streams for time
// T*u, burns the cluster of site 0, and returns (time until every burnt site
// is re-seeded) / T; site 0 vacant gives 0.
double sample_theta(const law_spec& law, double u, theta_method method,
                    counter_rng& rng);

// -------------------------------------------------------------------------
// Barrier-type limit processes (bounded-support and heavy-everywhere cases)
// -------------------------------------------------------------------------

enum class barrier_height_rule {
    current_level,  // barrier height = local level z at the mark
    theta_draw,     // barrier height = theta_quantile(law, z, mark value)
};

// Piecewise-linear field process on [-A,A] x [0,T]:
//   - Z(x,.) grows at slope 1 from 0 while < 1;
//   - a mark at (t,x) with Z(x,t-) = 1 destroys the cluster D(x,t-): Z is
//     zeroed on its interior, and at each endpoint exactly when Z = 1 there;
//   - a mark with Z(x,t-) < 1 erects a barrier whose height H decreases at
//     slope 1 and blocks while > 0;
//   - D(x,t) = [L,R] with L/R the nearest positions (sup/inf) where Z < 1 or
//     H > 0, clipped to the box; D = {x} where x itself is blocked.
// Queries replay the mark list, so any (x,t) is exact; values at event times
// are the post-event (right-continuous) ones.
class lff_trajectory {
public:
    lff_trajectory(double half_width, double horizon,
                   std::vector<lff_mark> marks, barrier_height_rule rule,
                   std::optional<law_spec> law = std::nullopt);

    // Heavy-everywhere limit: heights equal the local level.
    static lff_trajectory simulate_inf(double half_width, double horizon,
                                       std::uint64_t key);
    // Bounded-support limit: heights drawn from the regrowth-delay law.
    // force_identity_heights short-circuits the draw to the local level while
    // keeping the exact same mark stream and control flow (degeneration
    // check).
    static lff_trajectory simulate_bs(double half_width, double horizon,
                                      const law_spec& law, std::uint64_t key,
                                      bool force_identity_heights = false);

    double half_width() const { return half_width_; }
    double horizon() const { return horizon_; }
    const std::vector<lff_mark>& marks() const { return marks_; }
    const std::vector<lff_event>& events() const { return events_; }

    double z(double x, double t) const;
    double h(double x, double t) const;
    std::pair<double, double> d(double x, double t) const;

    struct point_state {
        double z;
        double h;
        std::pair<double, double> d;
    };
    point_state query(double x, double t) const;

private:
    struct field_state;
    void check_range(double x, double t) const;
    double height(double z_level, double v) const;
    void apply_mark(field_state& st, const lff_mark& m,
                    std::vector<lff_event>* log) const;
    field_state replay(double t) const;

    double half_width_, horizon_;
    std::vector<lff_mark> marks_;
    barrier_height_rule rule_;
    std::optional<law_spec> law_;
    std::vector<lff_event> events_;
};

// Event CSV: time, kind in {match_micro, match_macro}, position,
// destroyed_left, destroyed_right, barrier_height.
void write_events_csv(const lff_trajectory& traj, std::ostream& out);

// -------------------------------------------------------------------------
// Vacancy-cloud limit process (polynomial-tail case)
// -------------------------------------------------------------------------

struct cloud_point {
    double x;
    double death;  // vacant until this time
};

// Vacancy points left on an interval regrown from time `birth`: positions
// Poisson(dx), residual lifetimes with density beta*u^(-beta-1) du on
// [delta, inf).  The number alive at time birth+u is Poisson(len * u^-beta)
// for u >= delta.  Points are generated lazily in decreasing death order via
// the change of variable v = (death - birth)^(-beta), under which they form
// a homogeneous Poisson stream of rate len in v; the first k points are a
// fixed function of the substream, so shrinking delta only appends points.
class vacancy_cloud {
public:
    vacancy_cloud(double lo, double hi, double birth, double beta,
                  double delta, counter_rng rng);

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    double birth() const { return birth_; }

    // Queries below time birth+delta miss truncated points.
    bool approximate_at(double t) const { return t < birth_ + delta_; }

    // Points alive at t (death > t), any position.
    std::int64_t alive_count(double t);
    // Nearest alive point at or left/right of x within [bound_lo, bound_hi].
    std::optional<double> nearest_left(double x, double t, double bound_lo,
                                       double bound_hi);
    std::optional<double> nearest_right(double x, double t, double bound_lo,
                                        double bound_hi);

    // All generated points with death > t, for export.
    std::vector<cloud_point> alive_points(double t);

private:
    void extend(double t);

    double lo_, hi_, birth_, beta_, delta_;
    counter_rng rng_;
    double v_cum_ = 0.0;
    bool exhausted_ = false;
    std::vector<cloud_point> points_;  // decreasing death
};

struct beta_fire {
    double t;
    double x;      // match position
    double left, right;
};

// Polynomial-tail limit process.  Space splits into cells at positions that
// stay vacant through the whole window (Poisson, rate T^-beta, extended
// outward until they bracket [-A,A]).  Within a cell every match burns the
// interval between the nearest alive vacancy points (or cell boundaries) and
// replaces its vacancy cloud with a fresh one born at the match time.
// Everything below residual lifetime delta is truncated: queries within
// delta of a region's birth are flagged approximate, all others are exact.
class lff_beta_trajectory {
public:
    lff_beta_trajectory(double half_width, double horizon, double beta,
                        double delta, std::uint64_t key);
    // Scripted variant: explicit cell boundaries (must bracket [-A,A]) and
    // time-ordered matches; clouds still come from `key`.
    lff_beta_trajectory(double half_width, double horizon, double beta,
                        double delta, std::vector<double> cells,
                        std::vector<lff_mark> matches, std::uint64_t key);

    double half_width() const { return half_width_; }
    double horizon() const { return horizon_; }
    double beta() const { return beta_; }
    double delta() const { return delta_; }
    const std::vector<double>& cells() const { return cells_; }
    const std::vector<beta_fire>& fires() const { return fires_; }

    struct cluster_result {
        double left, right;
        bool approximate;  // touched a cloud within delta of its birth
    };
    cluster_result d(double x, double t);

    // Vacancy-cloud export rows: kind in {cell_boundary, vacancy}.
    void write_cloud_csv(double t, std::ostream& out);

private:
    struct region {
        double lo, hi;
        std::shared_ptr<vacancy_cloud> cloud;
    };
    void init(std::uint64_t key);
    double auto_delta() const;
    void burn(double t, double left, double right,
              std::shared_ptr<vacancy_cloud> cloud);
    cluster_result scan(double x, double t);

    double half_width_, horizon_, beta_, delta_;
    std::vector<double> cells_;
    std::vector<lff_mark> matches_;
    std::map<double, region> regions_;  // key = region lo
    std::vector<beta_fire> fires_;
    std::uint64_t cloud_key_;
    std::int64_t fire_counter_ = 0;
};

// -------------------------------------------------------------------------
// Degenerate limit process (light-tail case)
// -------------------------------------------------------------------------

// Space splits at Poisson(1) marks bracketing [-A,A]; the cluster of x is
// the closed interval between its neighbouring marks, constant in time.
class lff_zero_state {
public:
    lff_zero_state(double half_width, std::uint64_t key);
    explicit lff_zero_state(std::vector<double> marks);

    const std::vector<double>& marks() const { return marks_; }
    std::pair<double, double> d(double x) const;

private:
    std::vector<double> marks_;  // ascending, first < -A, last > A
};

} // namespace pyroscale
