#pragma once

// Deterministic SVG space-time diagrams (x horizontal, time growing
// downward) plus the trace CSV round-trip they are drawn from.  Rendering is
// visualization-only lossy: occupancy is downsampled to at most 4000
// horizontal pixels by run-length merging in pixel space.  Output is plain
// formatted text (fixed precision, no timestamps), so a fixed seed and
// version yield a byte-stable golden file.

#include "pyroscale/discrete_ff.hpp"
#include "pyroscale/limit_lff.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pyroscale {

// One row of the discrete trace CSV
// (event_time, kind in {seed, match, fire}, site, fire_left, fire_right);
// fire_left/fire_right are empty for seed and match rows.
struct trace_row {
    double time = 0.0;
    trace_kind kind = trace_kind::seed;
    std::int64_t site = 0;
    std::optional<std::int64_t> fire_left;
    std::optional<std::int64_t> fire_right;
};

// Write the recorded trace of a finished run (requires record_trace).
void write_trace_csv(const forest_fire& sim, std::ostream& out);

// Parse a trace CSV back; throws std::runtime_error naming the first bad
// line.
std::vector<trace_row> read_trace_csv(std::istream& in);

struct render_options {
    int max_width_px = 4000;  // occupancy downsample cap (run-length merged)
    int height_px = 480;      // number of time rows in discrete renders
    double bullet_radius = 3.0;
};

// Replay a discrete trace over the box [lo, hi] up to the horizon: black
// run-length rectangles per time row, bullets at effective matches (fire
// ignitions).  Matches that land on vacant sites change nothing and are not
// drawn.
std::string render_discrete(const std::vector<trace_row>& rows,
                            std::int64_t lo, std::int64_t hi, double horizon,
                            render_options opts = render_options{});

// Limit diagram for the barrier processes: every mark is a bullet, micro
// marks grow a vertical barrier segment of their height, macro marks draw
// the destroyed interval as a horizontal segment.
std::string render_limit(const lff_trajectory& traj,
                         render_options opts = render_options{});

// Limit diagram for the polynomial regime: dashed verticals at cell
// boundaries, horizontal segments for fire destructions, bullets at fires.
std::string render_limit_beta(const std::vector<double>& cells,
                              const std::vector<beta_fire>& fires,
                              double half_width, double horizon,
                              render_options opts = render_options{});

// Static diagram for the instantaneous regime: bullets at the marks on a
// horizontal axis.
std::string render_limit_zero(const std::vector<double>& marks,
                              double half_width,
                              render_options opts = render_options{});

} // namespace pyroscale
