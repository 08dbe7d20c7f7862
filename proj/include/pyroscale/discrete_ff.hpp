#pragma once

#include "pyroscale/law.hpp"
#include "pyroscale/rng.hpp"
#include "pyroscale/scaling.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <set>
#include <stdexcept>
#include <vector>

namespace pyroscale {

struct capacity_error : std::length_error {
    using std::length_error::length_error;
};

struct fire_event {
    double time;
    std::int64_t ignition;
    std::int64_t left, right;  // destroyed run, inclusive
    std::int64_t size;
};

enum class trace_kind : std::int8_t { seed = 0, match = 1, fire = 2 };

struct trace_event {
    double time;
    trace_kind kind;
    std::int64_t site;
    std::int64_t fire_left = 0, fire_right = 0;
};

struct ff_options {
    bool fires_enabled = true;
    bool record_trace = false;
    // One ordered vacant-site index + two lazy streams per site; the cap
    // keeps worst-case memory within a desktop budget.
    std::int64_t site_capacity = std::int64_t{1} << 22;
};

// Event-driven simulation of the forest-fire process on the integer box
// [lo, hi]: seeds occupy vacant sites; a match landing on an occupied site
// instantly vacates the maximal occupied run around it.  Seed streams are
// stationary renewal processes of the seed law; match streams are stationary
// renewal processes of the match law with all times divided by lambda.
// Clusters clip at the box edges; there is no wraparound.
class forest_fire {
public:
    forest_fire(std::int64_t lo, std::int64_t hi, law_spec seed_law,
                law_spec match_law, double lambda, std::uint64_t stream_key,
                ff_options opt = ff_options{});

    // Process every event in (now, t] in time order.  Ties between a seed and
    // a match at the same instant process the seed first (fixed order keeps
    // runs reproducible; the tie itself is a measure-zero event).
    void run_until(double t);

    double now() const { return now_; }
    std::int64_t lo() const { return lo_; }
    std::int64_t hi() const { return hi_; }
    std::int64_t n_sites() const { return hi_ - lo_ + 1; }

    bool occupied(std::int64_t i) const { return occ_[idx(i)] != 0; }
    std::int64_t occupied_count() const { return occ_count_; }
    double occupied_fraction() const {
        return static_cast<double>(occ_count_) / static_cast<double>(n_sites());
    }

    // Maximal occupied run containing i, clipped to the box; empty for a
    // vacant site.
    std::optional<std::pair<std::int64_t, std::int64_t>>
    cluster(std::int64_t i) const;

    const std::vector<fire_event>& fires() const { return fires_; }
    const std::vector<trace_event>& trace() const { return trace_; }
    std::int64_t match_count() const { return match_count_; }

    // Maximal occupied runs, ascending — the snapshot export format.
    std::vector<std::pair<std::int64_t, std::int64_t>> occupied_runs() const;

private:
    struct event {
        double t;
        std::int8_t kind;  // 0 = seed, 1 = match; seeds win ties
        std::int64_t site;
    };
    struct event_after {
        bool operator()(const event& a, const event& b) const {
            if (a.t != b.t) return a.t > b.t;
            if (a.kind != b.kind) return a.kind > b.kind;
            return a.site > b.site;
        }
    };
    struct site_stream {
        counter_rng rng;
        double raw_last = 0.0;
        bool started = false;
    };

    std::size_t idx(std::int64_t i) const {
        return static_cast<std::size_t>(i - lo_);
    }
    double next_seed_time(std::int64_t i);
    double next_match_time(std::int64_t i);
    void burn(double t, std::int64_t ignition);

    std::int64_t lo_, hi_;
    law_spec seed_law_, match_law_;
    double lambda_;
    ff_options opt_;
    double now_ = 0.0;
    std::int64_t occ_count_ = 0;
    std::int64_t match_count_ = 0;
    std::vector<std::uint8_t> occ_;
    std::set<std::int64_t> vacant_;
    std::vector<site_stream> seed_streams_, match_streams_;
    std::priority_queue<event, std::vector<event>, event_after> queue_;
    std::vector<fire_event> fires_;
    std::vector<trace_event> trace_;
};

// Occupied fraction of the window [center-m, center+m] intersected with the
// box (the mesoscopic density the rescaled process is built from).
double window_density(const forest_fire& sim, std::int64_t center,
                      std::int64_t m);

// Rescaled local density Z = min(psi(K)/a_lambda, 1) at rescaled position x;
// the simulation must already be advanced to a_lambda * t.
double local_density_z(const forest_fire& sim, const law_spec& seed_law,
                       const scale_set& scales, double x);

// Cluster of rescaled position x in rescaled units: cluster(floor(n x))/n.
std::optional<std::pair<double, double>>
rescaled_cluster(const forest_fire& sim, const scale_set& scales, double x);

// Fires-off percolation lattice: site i becomes occupied at an i.i.d. time
// drawn from a survival function given by its tail-quantile.  Occupation
// times are hash-derived from the site index, so the lattice needs no
// storage and any site can be queried directly.  Edges (i, i+1) carry unit
// mass; an occupied site glues its two edges, so the particle covering an
// edge has mass r - l where l (r) is the nearest vacant site at or left of i
// (at or right of i+1).  Sites outside the box count as vacant.
class percolation_lattice {
public:
    percolation_lattice(std::int64_t n_sites,
                        std::function<double(double)> tail_quantile,
                        std::uint64_t key)
        : n_(n_sites), quantile_(std::move(tail_quantile)), key_(key) {
        if (n_ < 2)
            throw std::invalid_argument("percolation: need at least 2 sites");
    }

    std::int64_t n_sites() const { return n_; }
    std::int64_t n_edges() const { return n_ - 1; }

    double occupation_time(std::int64_t i) const {
        counter_rng rng(derive_key(key_, stream_tag::occupation,
                                   static_cast<std::uint64_t>(i)));
        return quantile_(rng.uniform01());
    }

    bool occupied(std::int64_t i, double t) const {
        if (i < 0 || i >= n_) return false;
        return occupation_time(i) <= t;
    }

    std::int64_t edge_mass(std::int64_t i, double t) const;

private:
    std::int64_t n_;
    std::function<double(double)> quantile_;
    std::uint64_t key_;
};

// Tail-quantile of the coalescent occupation toy P[T > t] = 2/(t+2).
inline double kingman_tail_quantile(double u) { return 2.0 / u - 2.0; }

} // namespace pyroscale
