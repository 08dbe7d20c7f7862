#pragma once

#include "pyroscale/law.hpp"
#include "pyroscale/rng.hpp"

#include <utility>
#include <vector>

namespace pyroscale {

// One-sided stationary renewal stream: the first emitted time is
// stationary-delay distributed, every later gap is an independent draw of
// the gap law.  An optional time_scale multiplies outputs, which is how the
// match process (gap law scaled by 1/lambda) is produced: scaling a
// stationary stream keeps it stationary for the scaled law.
class renewal_stream {
public:
    renewal_stream(law_spec law, counter_rng rng, double time_scale = 1.0)
        : law_(std::move(law)), rng_(rng), scale_(time_scale) {}

    double next() {
        const double u = rng_.uniform01();
        raw_last_ = started_ ? raw_last_ + law_.quantile_mu(u)
                             : law_.quantile_nu(u);
        started_ = true;
        return raw_last_ * scale_;
    }

    bool started() const { return started_; }
    double last() const { return raw_last_ * scale_; }

private:
    law_spec law_;
    counter_rng rng_;
    double scale_;
    double raw_last_ = 0.0;
    bool started_ = false;
};

// Two-sided stationary stream around the origin.  The gap straddling 0 is
// size-biased and split by an independent uniform: T_0 = -(1-U) X_0 and
// T_1 = U X_0, which makes T_1 stationary-delay distributed and both
// half-streams stationary.
class two_sided_stream {
public:
    two_sided_stream(law_spec law, counter_rng rng)
        : law_(std::move(law)), rng_(rng) {
        straddle_ = law_.quantile_zeta(rng_.uniform01());
        const double u = rng_.uniform01();
        right_last_ = u * straddle_;
        left_last_ = -(1.0 - u) * straddle_;
    }

    // First call returns T_1, then T_2, ... strictly increasing.
    double next_right() {
        if (!right_started_) {
            right_started_ = true;
            return right_last_;
        }
        right_last_ += law_.quantile_mu(rng_.uniform01());
        return right_last_;
    }

    // First call returns T_0 (<= 0), then T_{-1}, ... strictly decreasing.
    double next_left() {
        if (!left_started_) {
            left_started_ = true;
            return left_last_;
        }
        left_last_ -= law_.quantile_mu(rng_.uniform01());
        return left_last_;
    }

    double straddle_gap() const { return straddle_; }

private:
    law_spec law_;
    counter_rng rng_;
    double straddle_;
    double right_last_, left_last_;
    bool right_started_ = false, left_started_ = false;
};

// All events of a one-sided stationary stream in (0, horizon].
std::vector<double> stream_events(const law_spec& law, counter_rng rng,
                                  double horizon);

// Events of a two-sided stationary stream in [-horizon, 0] and (0, horizon],
// returned as (negative side ascending, positive side ascending).
std::pair<std::vector<double>, std::vector<double>>
stream_two_sided(const law_spec& law, counter_rng rng, double horizon);

} // namespace pyroscale
