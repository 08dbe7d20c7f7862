#include "pyroscale/discrete_ff.hpp"

#include <algorithm>
#include <cmath>

namespace pyroscale {

forest_fire::forest_fire(std::int64_t lo, std::int64_t hi, law_spec seed_law,
                         law_spec match_law, double lambda,
                         std::uint64_t stream_key, ff_options opt)
    : lo_(lo), hi_(hi), seed_law_(std::move(seed_law)),
      match_law_(std::move(match_law)), lambda_(lambda), opt_(opt) {
    if (hi_ < lo_) throw std::invalid_argument("forest_fire: empty box");
    if (!(lambda_ > 0.0))
        throw std::invalid_argument("forest_fire: lambda must be positive");
    const std::int64_t n = hi_ - lo_ + 1;
    if (n > opt_.site_capacity)
        throw capacity_error("forest_fire: box exceeds site capacity");

    occ_.assign(static_cast<std::size_t>(n), 0);
    seed_streams_.resize(static_cast<std::size_t>(n));
    match_streams_.resize(static_cast<std::size_t>(n));
    auto hint = vacant_.end();
    for (std::int64_t i = lo_; i <= hi_; ++i) {
        hint = vacant_.insert(hint, i);
        const auto u = static_cast<std::uint64_t>(i);
        seed_streams_[idx(i)].rng =
            counter_rng(derive_key(stream_key, stream_tag::seed, u));
        match_streams_[idx(i)].rng =
            counter_rng(derive_key(stream_key, stream_tag::match, u));
        queue_.push({next_seed_time(i), 0, i});
        queue_.push({next_match_time(i), 1, i});
    }
}

double forest_fire::next_seed_time(std::int64_t i) {
    auto& s = seed_streams_[idx(i)];
    if (!s.started) {
        s.raw_last = seed_law_.quantile_nu(s.rng.uniform01());
        s.started = true;
    } else {
        s.raw_last += seed_law_.quantile_mu(s.rng.uniform01());
    }
    return s.raw_last;
}

double forest_fire::next_match_time(std::int64_t i) {
    auto& s = match_streams_[idx(i)];
    if (!s.started) {
        s.raw_last = match_law_.quantile_nu(s.rng.uniform01());
        s.started = true;
    } else {
        s.raw_last += match_law_.quantile_mu(s.rng.uniform01());
    }
    return s.raw_last / lambda_;
}

void forest_fire::run_until(double t) {
    while (!queue_.empty() && queue_.top().t <= t) {
        const event ev = queue_.top();
        queue_.pop();
        now_ = ev.t;
        if (ev.kind == 0) {
            if (!occ_[idx(ev.site)]) {
                occ_[idx(ev.site)] = 1;
                ++occ_count_;
                vacant_.erase(ev.site);
            }
            if (opt_.record_trace)
                trace_.push_back({ev.t, trace_kind::seed, ev.site, 0, 0});
            queue_.push({next_seed_time(ev.site), 0, ev.site});
        } else {
            ++match_count_;
            if (opt_.record_trace)
                trace_.push_back({ev.t, trace_kind::match, ev.site, 0, 0});
            if (opt_.fires_enabled && occ_[idx(ev.site)]) burn(ev.t, ev.site);
            queue_.push({next_match_time(ev.site), 1, ev.site});
        }
    }
    now_ = t;
}

void forest_fire::burn(double t, std::int64_t ignition) {
    // Maximal occupied run around the ignition site, via its vacant
    // neighbours in the ordered index.
    auto right_vac = vacant_.upper_bound(ignition);
    const std::int64_t right =
        (right_vac == vacant_.end()) ? hi_ : *right_vac - 1;
    const std::int64_t left =
        (right_vac == vacant_.begin()) ? lo_ : *std::prev(right_vac) + 1;

    auto hint = vacant_.lower_bound(left);
    for (std::int64_t i = left; i <= right; ++i) {
        occ_[idx(i)] = 0;
        hint = vacant_.insert(hint, i);
        ++hint;
    }
    occ_count_ -= right - left + 1;
    fires_.push_back({t, ignition, left, right, right - left + 1});
    if (opt_.record_trace)
        trace_.push_back({t, trace_kind::fire, ignition, left, right});
}

std::optional<std::pair<std::int64_t, std::int64_t>>
forest_fire::cluster(std::int64_t i) const {
    if (i < lo_ || i > hi_ || !occ_[idx(i)]) return std::nullopt;
    auto right_vac = vacant_.upper_bound(i);
    const std::int64_t right =
        (right_vac == vacant_.end()) ? hi_ : *right_vac - 1;
    const std::int64_t left =
        (right_vac == vacant_.begin()) ? lo_ : *std::prev(right_vac) + 1;
    return std::make_pair(left, right);
}

std::vector<std::pair<std::int64_t, std::int64_t>>
forest_fire::occupied_runs() const {
    std::vector<std::pair<std::int64_t, std::int64_t>> runs;
    std::int64_t i = lo_;
    while (i <= hi_) {
        if (!occ_[idx(i)]) {
            ++i;
            continue;
        }
        std::int64_t j = i;
        while (j < hi_ && occ_[idx(j + 1)]) ++j;
        runs.emplace_back(i, j);
        i = j + 1;
    }
    return runs;
}

double window_density(const forest_fire& sim, std::int64_t center,
                      std::int64_t m) {
    const std::int64_t a = std::max(sim.lo(), center - m);
    const std::int64_t b = std::min(sim.hi(), center + m);
    if (b < a) return 0.0;
    std::int64_t occ = 0;
    for (std::int64_t i = a; i <= b; ++i) occ += sim.occupied(i) ? 1 : 0;
    return static_cast<double>(occ) / static_cast<double>(b - a + 1);
}

double local_density_z(const forest_fire& sim, const law_spec& seed_law,
                       const scale_set& scales, double x) {
    const auto center = static_cast<std::int64_t>(
        std::floor(static_cast<double>(scales.n_lambda) * x));
    const double k = window_density(sim, center, scales.m_lambda);
    if (k >= 1.0) return 1.0;
    return std::min(psi_s(seed_law, k) / scales.a_lambda, 1.0);
}

std::optional<std::pair<double, double>>
rescaled_cluster(const forest_fire& sim, const scale_set& scales, double x) {
    const auto site = static_cast<std::int64_t>(
        std::floor(static_cast<double>(scales.n_lambda) * x));
    auto run = sim.cluster(site);
    if (!run) return std::nullopt;
    const auto n = static_cast<double>(scales.n_lambda);
    return std::make_pair(static_cast<double>(run->first) / n,
                          static_cast<double>(run->second) / n);
}

std::int64_t percolation_lattice::edge_mass(std::int64_t i, double t) const {
    if (i < 0 || i + 1 >= n_)
        throw std::out_of_range("percolation: edge index out of range");
    std::int64_t l = i;
    while (l >= 0 && occupied(l, t)) --l;
    std::int64_t r = i + 1;
    while (r < n_ && occupied(r, t)) ++r;
    return r - l;
}

} // namespace pyroscale
