#include "pyroscale/limit_lff.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace pyroscale {

namespace {

void csv_number(std::ostream& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    out << buf;
}

} // namespace

// -------------------------------------------------------------------------
// Match marks
// -------------------------------------------------------------------------

std::vector<lff_mark> poisson_marks(double half_width, double horizon,
                                    counter_rng& rng) {
    if (!(half_width > 0.0) || !(horizon > 0.0))
        throw std::invalid_argument("poisson_marks: need positive box");
    const std::int64_t count = rng.poisson(2.0 * half_width * horizon);
    std::vector<lff_mark> marks(static_cast<std::size_t>(count));
    for (auto& m : marks) {
        m.t = horizon * rng.uniform01();
        m.x = half_width * (2.0 * rng.uniform01() - 1.0);
        m.v = rng.uniform01();
    }
    std::sort(marks.begin(), marks.end(),
              [](const lff_mark& a, const lff_mark& b) { return a.t < b.t; });
    return marks;
}

// -------------------------------------------------------------------------
// Barrier heights
// -------------------------------------------------------------------------

double g_s(const law_spec& law, double t, double s) {
    if (law.regime() != tail_regime::bounded_support)
        throw regime_error("g_s: seed law must have bounded gap support");
    if (t < 0.0 || s < 0.0)
        throw std::invalid_argument("g_s: arguments must be nonnegative");
    // Fixed-gap streams place exactly one epoch in every half-open window of
    // one gap length, so the first-epoch event has probability min(t,1) and a
    // window of length s >= 1 always contains a second epoch.  For s < 1 both
    // events need the (uniform) first epoch inside an overlap of length
    // min(t,1)+s-1.
    const double first = std::min(t, 1.0);
    if (s >= 1.0) return first;
    return std::max(0.0, first + s - 1.0);
}

mc_estimate mc_g_s(const law_spec& law, double t, double s, std::int64_t n,
                   counter_rng& rng) {
    if (law.regime() != tail_regime::bounded_support)
        throw regime_error("mc_g_s: seed law must have bounded gap support");
    if (n <= 0) throw std::invalid_argument("mc_g_s: need n > 0");
    const double ts = law.support_sup();
    std::int64_t hits = 0;
    for (std::int64_t i = 0; i < n; ++i) {
        double e = law.quantile_nu(rng.uniform01());
        if (e > ts * t) continue;  // no epoch in (0, T t]
        while (e <= ts * t) e += law.quantile_mu(rng.uniform01());
        if (e <= ts * (t + s)) ++hits;
    }
    const double p = static_cast<double>(hits) / static_cast<double>(n);
    return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(n))};
}

double theta_cdf(const law_spec& law, double u, double h) {
    if (law.regime() != tail_regime::bounded_support)
        throw regime_error("theta_cdf: seed law must have bounded gap support");
    if (u < 0.0 || u >= 1.0)
        throw std::invalid_argument("theta_cdf: u must lie in [0,1)");
    if (h < 0.0) return 0.0;
    if (h >= 1.0) return 1.0;
    const double ts = law.support_sup();
    const double w = law.tail_nu(ts * u);  // atom at 0
    const double g = g_s(law, u, h);
    const double ratio = w / (1.0 - g);
    return w + ratio * ratio * g;
}

double theta_quantile(const law_spec& law, double u, double v) {
    const double w = law.tail_nu(law.support_sup() * u);
    if (v <= theta_cdf(law, u, 0.0) || w >= 1.0) return 0.0;
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (theta_cdf(law, u, mid) >= v)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

double sample_theta(const law_spec& law, double u, theta_method method,
                    counter_rng& rng) {
    if (law.regime() != tail_regime::bounded_support)
        throw regime_error("sample_theta: seed law must have bounded gap support");
    if (!(u > 0.0) || !(u < 1.0))
        throw std::invalid_argument("sample_theta: u must lie in (0,1)");
    if (method == theta_method::cdf_inversion)
        return theta_quantile(law, u, rng.uniform01());

    // Regeneration experiment: grow an empty lattice with i.i.d. stationary
    // seed streams for time T*u, burn the occupied run through site 0, and
    // wait until every burnt site is seeded again.
    const double ts = law.support_sup();
    const double horizon = ts * u;
    std::vector<double> first_seeds;
    const double f0 = law.quantile_nu(rng.uniform01());
    if (f0 > horizon) return 0.0;  // site 0 vacant: nothing burns
    first_seeds.push_back(f0);
    for (int dir = 0; dir < 2; ++dir) {
        for (;;) {
            const double f = law.quantile_nu(rng.uniform01());
            if (f > horizon) break;  // first vacant site ends the run
            first_seeds.push_back(f);
        }
    }
    double worst = 0.0;
    for (const double f : first_seeds) {
        double e = f;
        while (e <= horizon) e += law.quantile_mu(rng.uniform01());
        worst = std::max(worst, e - horizon);
    }
    return worst / ts;
}

// -------------------------------------------------------------------------
// Barrier-type trajectory
// -------------------------------------------------------------------------

// Field state at a fixed time, replayed from the mark list.  The level field
// is piecewise "reset at time tau" (Z = min(t - tau, 1)): `piece` maps a
// region's left edge to its reset time, and `pt` carries the isolated
// positions (fire endpoints) whose personal reset time differs from their
// surrounding region.  `barrier` maps a position to its expiry time
// (H = max(expiry - t, 0)).
struct lff_trajectory::field_state {
    std::map<double, double> piece;
    std::map<double, double> pt;
    std::map<double, double> barrier;
    double half_width = 0.0;

    double region_reset(double x) const {
        auto it = piece.upper_bound(x);
        --it;  // the leftmost key is -half_width <= x
        return it->second;
    }
    double reset_time(double x) const {
        auto p = pt.find(x);
        return p != pt.end() ? p->second : region_reset(x);
    }
    double z_at(double x, double t) const {
        return std::min(t - reset_time(x), 1.0);
    }
    double h_at(double x, double t) const {
        auto b = barrier.find(x);
        return b == barrier.end() ? 0.0 : std::max(b->second - t, 0.0);
    }
    bool blocked(double x, double t) const {
        return z_at(x, t) < 1.0 || h_at(x, t) > 0.0;
    }

    // D(x,t) = [sup blocked positions <= x, inf blocked positions >= x],
    // clipped to the box; {x} if x itself is blocked.  A region with reset
    // time tau is blocked throughout iff t - tau < 1, so its contribution to
    // the sup (inf) is its right (left) edge.
    std::pair<double, double> cluster(double x, double t) const {
        if (blocked(x, t)) return {x, x};
        double left = -half_width;
        for (auto it = piece.upper_bound(x); it != piece.begin();) {
            --it;
            if (t - it->second < 1.0) {
                auto nx = std::next(it);
                const double sup =
                    nx == piece.end() ? half_width : nx->first;
                left = std::max(left, std::min(sup, x));
                break;
            }
        }
        for (auto it = pt.upper_bound(x); it != pt.begin();) {
            --it;
            if (t - it->second < 1.0) {
                left = std::max(left, it->first);
                break;
            }
        }
        for (auto it = barrier.upper_bound(x); it != barrier.begin();) {
            --it;
            if (it->second > t) {
                left = std::max(left, it->first);
                break;
            }
        }

        double right = half_width;
        {
            auto it = piece.upper_bound(x);
            --it;
            for (;;) {
                if (t - it->second < 1.0) {
                    right = std::min(right, std::max(it->first, x));
                    break;
                }
                ++it;
                if (it == piece.end()) break;
            }
        }
        for (auto it = pt.lower_bound(x); it != pt.end(); ++it) {
            if (t - it->second < 1.0) {
                right = std::min(right, it->first);
                break;
            }
        }
        for (auto it = barrier.lower_bound(x); it != barrier.end(); ++it) {
            if (it->second > t) {
                right = std::min(right, it->first);
                break;
            }
        }
        return {left, right};
    }
};

lff_trajectory::lff_trajectory(double half_width, double horizon,
                               std::vector<lff_mark> marks,
                               barrier_height_rule rule,
                               std::optional<law_spec> law)
    : half_width_(half_width), horizon_(horizon), marks_(std::move(marks)),
      rule_(rule), law_(std::move(law)) {
    if (!(half_width_ > 0.0) || !(horizon_ > 0.0))
        throw std::invalid_argument("lff_trajectory: need positive box");
    if (rule_ == barrier_height_rule::theta_draw) {
        if (!law_)
            throw std::invalid_argument(
                "lff_trajectory: theta_draw rule needs a seed law");
        if (law_->regime() != tail_regime::bounded_support)
            throw regime_error(
                "lff_trajectory: theta_draw needs a bounded-support law");
    }
    std::sort(marks_.begin(), marks_.end(),
              [](const lff_mark& a, const lff_mark& b) { return a.t < b.t; });
    field_state st;
    st.half_width = half_width_;
    st.piece.emplace(-half_width_, 0.0);
    for (const auto& m : marks_) apply_mark(st, m, &events_);
}

lff_trajectory lff_trajectory::simulate_inf(double half_width, double horizon,
                                            std::uint64_t key) {
    counter_rng rng(derive_key(key, stream_tag::marks));
    return lff_trajectory(half_width, horizon,
                          poisson_marks(half_width, horizon, rng),
                          barrier_height_rule::current_level);
}

lff_trajectory lff_trajectory::simulate_bs(double half_width, double horizon,
                                           const law_spec& law,
                                           std::uint64_t key,
                                           bool force_identity_heights) {
    counter_rng rng(derive_key(key, stream_tag::marks));
    auto marks = poisson_marks(half_width, horizon, rng);
    if (force_identity_heights)
        return lff_trajectory(half_width, horizon, std::move(marks),
                              barrier_height_rule::current_level, law);
    return lff_trajectory(half_width, horizon, std::move(marks),
                          barrier_height_rule::theta_draw, law);
}

double lff_trajectory::height(double z_level, double v) const {
    if (rule_ == barrier_height_rule::current_level) return z_level;
    return theta_quantile(*law_, z_level, v);
}

void lff_trajectory::apply_mark(field_state& st, const lff_mark& m,
                                std::vector<lff_event>* log) const {
    const double zx = st.z_at(m.x, m.t);
    if (zx >= 1.0) {
        const auto [a, b] = st.cluster(m.x, m.t);
        if (a == b) {
            // Blocked singleton (a barrier sits on x, or blocked regions
            // pinch it): only the point itself resets.
            st.pt.insert_or_assign(a, m.t);
            if (log) log->push_back({m.t, m.x, true, a, b, 0.0});
            return;
        }
        const double za = st.z_at(a, m.t);
        const double zb = st.z_at(b, m.t);
        const double region_at_b = st.region_reset(b);
        const double personal_a = st.reset_time(a);
        const double personal_b = st.reset_time(b);

        st.pt.erase(st.pt.upper_bound(a), st.pt.lower_bound(b));
        st.piece.erase(st.piece.upper_bound(a), st.piece.lower_bound(b));
        // Re-key so the region right of b keeps its old reset time, then
        // reset the destroyed interior.
        if (!st.piece.count(b)) st.piece.emplace(b, region_at_b);
        st.piece.insert_or_assign(a, m.t);
        // An endpoint resets exactly when its level equals 1.
        if (za >= 1.0)
            st.pt.erase(a);
        else
            st.pt.insert_or_assign(a, personal_a);
        if (zb >= 1.0)
            st.pt.insert_or_assign(b, m.t);
        else if (personal_b != region_at_b)
            st.pt.insert_or_assign(b, personal_b);
        else
            st.pt.erase(b);
        if (log) log->push_back({m.t, m.x, true, a, b, 0.0});
    } else {
        const double hh = height(zx, m.v);
        if (hh > 0.0) st.barrier.insert_or_assign(m.x, m.t + hh);
        if (log) log->push_back({m.t, m.x, false, m.x, m.x, hh});
    }
}

lff_trajectory::field_state lff_trajectory::replay(double t) const {
    field_state st;
    st.half_width = half_width_;
    st.piece.emplace(-half_width_, 0.0);
    for (const auto& m : marks_) {
        if (m.t > t) break;
        apply_mark(st, m, nullptr);
    }
    return st;
}

void lff_trajectory::check_range(double x, double t) const {
    if (std::abs(x) > half_width_ || t < 0.0 || t > horizon_)
        throw std::out_of_range("lff_trajectory: query outside box");
}

double lff_trajectory::z(double x, double t) const {
    check_range(x, t);
    return replay(t).z_at(x, t);
}

double lff_trajectory::h(double x, double t) const {
    check_range(x, t);
    return replay(t).h_at(x, t);
}

std::pair<double, double> lff_trajectory::d(double x, double t) const {
    check_range(x, t);
    return replay(t).cluster(x, t);
}

lff_trajectory::point_state lff_trajectory::query(double x, double t) const {
    check_range(x, t);
    const field_state st = replay(t);
    return {st.z_at(x, t), st.h_at(x, t), st.cluster(x, t)};
}

void write_events_csv(const lff_trajectory& traj, std::ostream& out) {
    out << "time,kind,position,destroyed_left,destroyed_right,barrier_height\n";
    for (const auto& ev : traj.events()) {
        csv_number(out, ev.t);
        out << (ev.macro ? ",match_macro," : ",match_micro,");
        csv_number(out, ev.x);
        out << ',';
        csv_number(out, ev.left);
        out << ',';
        csv_number(out, ev.right);
        out << ',';
        csv_number(out, ev.height);
        out << '\n';
    }
}

// -------------------------------------------------------------------------
// Vacancy cloud
// -------------------------------------------------------------------------

vacancy_cloud::vacancy_cloud(double lo, double hi, double birth, double beta,
                             double delta, counter_rng rng)
    : lo_(lo), hi_(hi), birth_(birth), beta_(beta), delta_(delta), rng_(rng) {
    if (!(hi_ > lo_)) throw std::invalid_argument("vacancy_cloud: empty span");
    if (!(beta_ > 0.0) || !(delta_ > 0.0))
        throw std::invalid_argument("vacancy_cloud: beta, delta must be > 0");
}

void vacancy_cloud::extend(double t) {
    const double floor_death = std::max(t, birth_ + delta_);
    const double len = hi_ - lo_;
    while (!exhausted_ &&
           (points_.empty() || points_.back().death > floor_death)) {
        v_cum_ += rng_.exponential(len);
        const double death = birth_ + std::pow(v_cum_, -1.0 / beta_);
        if (death <= birth_ + delta_) {
            exhausted_ = true;  // everything below the truncation is dropped
            break;
        }
        points_.push_back({lo_ + len * rng_.uniform01(), death});
    }
}

std::int64_t vacancy_cloud::alive_count(double t) {
    if (t < birth_)
        throw std::logic_error("vacancy_cloud: query before birth");
    extend(t);
    auto it = std::partition_point(
        points_.begin(), points_.end(),
        [t](const cloud_point& p) { return p.death > t; });
    return it - points_.begin();
}

std::optional<double> vacancy_cloud::nearest_left(double x, double t,
                                                  double bound_lo,
                                                  double bound_hi) {
    const std::int64_t alive = alive_count(t);
    std::optional<double> best;
    for (std::int64_t i = 0; i < alive; ++i) {
        const double p = points_[static_cast<std::size_t>(i)].x;
        if (p <= x && p >= bound_lo && p <= bound_hi &&
            (!best || p > *best))
            best = p;
    }
    return best;
}

std::optional<double> vacancy_cloud::nearest_right(double x, double t,
                                                   double bound_lo,
                                                   double bound_hi) {
    const std::int64_t alive = alive_count(t);
    std::optional<double> best;
    for (std::int64_t i = 0; i < alive; ++i) {
        const double p = points_[static_cast<std::size_t>(i)].x;
        if (p >= x && p >= bound_lo && p <= bound_hi &&
            (!best || p < *best))
            best = p;
    }
    return best;
}

std::vector<cloud_point> vacancy_cloud::alive_points(double t) {
    const std::int64_t alive = alive_count(t);
    return std::vector<cloud_point>(
        points_.begin(), points_.begin() + static_cast<std::size_t>(alive));
}

// -------------------------------------------------------------------------
// Polynomial-tail trajectory
// -------------------------------------------------------------------------

lff_beta_trajectory::lff_beta_trajectory(double half_width, double horizon,
                                         double beta, double delta,
                                         std::uint64_t key)
    : half_width_(half_width), horizon_(horizon), beta_(beta), delta_(delta),
      cloud_key_(key) {
    if (!(half_width_ > 0.0) || !(horizon_ > 0.0) || !(beta_ > 0.0))
        throw std::invalid_argument("lff_beta_trajectory: bad parameters");
    // Cell boundaries: positions vacant through the whole window form a
    // Poisson process of rate T^-beta; extend until they bracket the box.
    const double rate = std::pow(horizon_, -beta_);
    counter_rng brng(derive_key(key, stream_tag::cell_boundary));
    // Stationary layout around the box: the nearest boundary below -A sits
    // at an exponential distance, and by memorylessness the stream above -A
    // restarts at the box edge (continuing from the below-box point would
    // shorten the leftmost cells).
    cells_.push_back(-half_width_ - brng.exponential(rate));
    double b = -half_width_ + brng.exponential(rate);
    cells_.push_back(b);
    while (b <= half_width_) {
        b += brng.exponential(rate);
        cells_.push_back(b);
    }
    // Matches: unit space-time rate over each full cell.
    for (std::size_t i = 0; i + 1 < cells_.size(); ++i) {
        counter_rng mrng(derive_key(key, stream_tag::match,
                                    static_cast<std::uint64_t>(i)));
        const double len = cells_[i + 1] - cells_[i];
        const std::int64_t count = mrng.poisson(len * horizon_);
        for (std::int64_t k = 0; k < count; ++k) {
            lff_mark m;
            m.t = horizon_ * mrng.uniform01();
            m.x = cells_[i] + len * mrng.uniform01();
            m.v = mrng.uniform01();
            matches_.push_back(m);
        }
    }
    std::sort(matches_.begin(), matches_.end(),
              [](const lff_mark& a, const lff_mark& b2) { return a.t < b2.t; });
    init(key);
}

lff_beta_trajectory::lff_beta_trajectory(double half_width, double horizon,
                                         double beta, double delta,
                                         std::vector<double> cells,
                                         std::vector<lff_mark> matches,
                                         std::uint64_t key)
    : half_width_(half_width), horizon_(horizon), beta_(beta), delta_(delta),
      cells_(std::move(cells)), matches_(std::move(matches)),
      cloud_key_(key) {
    if (cells_.size() < 2 || cells_.front() >= -half_width_ ||
        cells_.back() <= half_width_)
        throw std::invalid_argument(
            "lff_beta_trajectory: cells must bracket the box");
    std::sort(matches_.begin(), matches_.end(),
              [](const lff_mark& a, const lff_mark& b) { return a.t < b.t; });
    init(key);
}

double lff_beta_trajectory::auto_delta() const {
    // Half the smallest gap between consecutive event times within a cell
    // (counting time 0), so no fire ever reads a cloud inside its truncation
    // window.
    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < cells_.size(); ++i) {
        double prev = 0.0;
        for (const auto& m : matches_) {
            if (m.x < cells_[i] || m.x >= cells_[i + 1]) continue;
            min_gap = std::min(min_gap, m.t - prev);
            prev = m.t;
        }
    }
    const double half = min_gap * 0.5;
    return std::min(1e-3, half > 0.0 ? half : 1e-3);
}

void lff_beta_trajectory::init(std::uint64_t key) {
    if (delta_ <= 0.0) delta_ = auto_delta();
    // Initial clouds, one per cell, born at time 0.
    regions_.clear();
    for (std::size_t i = 0; i + 1 < cells_.size(); ++i) {
        auto cloud = std::make_shared<vacancy_cloud>(
            cells_[i], cells_[i + 1], 0.0, beta_, delta_,
            counter_rng(derive_key(key, stream_tag::initial_cloud,
                                   static_cast<std::uint64_t>(i))));
        regions_.emplace(cells_[i], region{cells_[i], cells_[i + 1], cloud});
    }
    // One forward pass fixes every fire; queries replay from the same data.
    for (const auto& m : matches_) {
        const cluster_result c = scan(m.x, m.t);
        auto cloud = std::make_shared<vacancy_cloud>(
            c.left, c.right, m.t, beta_, delta_,
            counter_rng(derive_key(cloud_key_, stream_tag::regen_cloud,
                                   static_cast<std::uint64_t>(fire_counter_))));
        ++fire_counter_;
        burn(m.t, c.left, c.right, cloud);
        fires_.push_back({m.t, m.x, c.left, c.right});
    }
}

void lff_beta_trajectory::burn(double, double left, double right,
                               std::shared_ptr<vacancy_cloud> cloud) {
    auto it = regions_.upper_bound(left);
    --it;  // region containing `left`
    const region first = it->second;
    if (first.lo < left) {
        it->second.hi = left;  // left remnant keeps its cloud
        if (first.hi > right)
            regions_.emplace(right, region{right, first.hi, first.cloud});
        ++it;
    }
    while (it != regions_.end() && it->first < right) {
        const region rg = it->second;
        it = regions_.erase(it);
        if (rg.hi > right)
            regions_.emplace(right, region{right, rg.hi, rg.cloud});
    }
    regions_.emplace(left, region{left, right, std::move(cloud)});
}

namespace {
bool is_boundary(const std::vector<double>& cells, double x) {
    return std::binary_search(cells.begin(), cells.end(), x);
}
} // namespace

lff_beta_trajectory::cluster_result lff_beta_trajectory::scan(double x,
                                                              double t) {
    cluster_result res{0.0, 0.0, false};
    auto base = regions_.upper_bound(x);
    --base;  // region containing x
    for (auto it = base;;) {
        region& rg = it->second;
        res.approximate = res.approximate || rg.cloud->approximate_at(t);
        if (auto p = rg.cloud->nearest_left(x, t, rg.lo, rg.hi)) {
            res.left = *p;
            break;
        }
        if (is_boundary(cells_, rg.lo)) {
            res.left = rg.lo;
            break;
        }
        --it;
    }
    for (auto it = base;;) {
        region& rg = it->second;
        res.approximate = res.approximate || rg.cloud->approximate_at(t);
        if (auto p = rg.cloud->nearest_right(x, t, rg.lo, rg.hi)) {
            res.right = *p;
            break;
        }
        if (is_boundary(cells_, rg.hi)) {
            res.right = rg.hi;
            break;
        }
        ++it;
    }
    return res;
}

lff_beta_trajectory::cluster_result lff_beta_trajectory::d(double x,
                                                           double t) {
    if (std::abs(x) > half_width_ || t < 0.0 || t > horizon_)
        throw std::out_of_range("lff_beta_trajectory: query outside box");
    // Rebuild the region map as of time t from the precomputed fire list;
    // clouds are shared, so their lazily generated points are reused.
    regions_.clear();
    for (std::size_t i = 0; i + 1 < cells_.size(); ++i) {
        // Initial clouds are regenerated deterministically from the key.
        auto cloud = std::make_shared<vacancy_cloud>(
            cells_[i], cells_[i + 1], 0.0, beta_, delta_,
            counter_rng(derive_key(cloud_key_, stream_tag::initial_cloud,
                                   static_cast<std::uint64_t>(i))));
        regions_.emplace(cells_[i], region{cells_[i], cells_[i + 1], cloud});
    }
    for (std::size_t k = 0; k < fires_.size(); ++k) {
        if (fires_[k].t > t) break;
        auto cloud = std::make_shared<vacancy_cloud>(
            fires_[k].left, fires_[k].right, fires_[k].t, beta_, delta_,
            counter_rng(derive_key(cloud_key_, stream_tag::regen_cloud,
                                   static_cast<std::uint64_t>(k))));
        burn(fires_[k].t, fires_[k].left, fires_[k].right, cloud);
    }
    return scan(x, t);
}

void lff_beta_trajectory::write_cloud_csv(double t, std::ostream& out) {
    out << "kind,x,birth,death\n";
    for (const double c : cells_) {
        out << "cell_boundary,";
        csv_number(out, c);
        out << ",0,inf\n";
    }
    d(0.0, t);  // rebuild regions as of t
    for (const auto& [lo, rg] : regions_) {
        (void)lo;
        for (const auto& p : rg.cloud->alive_points(t)) {
            if (p.x < rg.lo || p.x > rg.hi) continue;
            out << "vacancy,";
            csv_number(out, p.x);
            out << ',';
            csv_number(out, rg.cloud->birth());
            out << ',';
            csv_number(out, p.death);
            out << '\n';
        }
    }
}

// -------------------------------------------------------------------------
// Degenerate trajectory
// -------------------------------------------------------------------------

lff_zero_state::lff_zero_state(double half_width, std::uint64_t key) {
    if (!(half_width > 0.0))
        throw std::invalid_argument("lff_zero_state: need positive box");
    counter_rng rng(derive_key(key, stream_tag::marks));
    // Stationary unit-rate marks: nearest mark below -A, then a fresh
    // stream restarted at the box edge.  The backward distance from any x in
    // the box to its previous mark is then exactly exponential (censoring at
    // the below-box mark lands on an exponential overshoot), so the covering
    // interval has the length-biased gamma law everywhere in the box.
    marks_.push_back(-half_width - rng.exponential(1.0));
    double b = -half_width + rng.exponential(1.0);
    marks_.push_back(b);
    while (b <= half_width) {
        b += rng.exponential(1.0);
        marks_.push_back(b);
    }
}

lff_zero_state::lff_zero_state(std::vector<double> marks)
    : marks_(std::move(marks)) {
    if (marks_.size() < 2 || !std::is_sorted(marks_.begin(), marks_.end()))
        throw std::invalid_argument("lff_zero_state: need sorted marks");
}

std::pair<double, double> lff_zero_state::d(double x) const {
    if (x < marks_.front() || x >= marks_.back())
        throw std::out_of_range("lff_zero_state: query outside marked span");
    auto it = std::upper_bound(marks_.begin(), marks_.end(), x);
    return {*std::prev(it), *it};
}

} // namespace pyroscale
