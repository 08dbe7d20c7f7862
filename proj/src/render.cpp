#include "pyroscale/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace pyroscale {

namespace {

constexpr double margin = 20.0;

std::string f2(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string num12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

const char* kind_name(trace_kind k) {
    switch (k) {
        case trace_kind::seed: return "seed";
        case trace_kind::match: return "match";
        default: return "fire";
    }
}

struct svg_builder {
    std::ostringstream out;

    svg_builder(double w, double h, const char* tag) {
        out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
            << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f2(w)
            << "\" height=\"" << f2(h) << "\" viewBox=\"0 0 " << f2(w) << ' '
            << f2(h) << "\">\n<desc>pyroscale-svg-1 " << tag << "</desc>\n"
            << "<rect x=\"0\" y=\"0\" width=\"" << f2(w) << "\" height=\""
            << f2(h)
            << "\" fill=\"#ffffff\" stroke=\"#888888\" stroke-width=\"1\"/>\n";
    }
    void rect(double x, double y, double w, double h, const char* fill) {
        out << "<rect x=\"" << f2(x) << "\" y=\"" << f2(y) << "\" width=\""
            << f2(w) << "\" height=\"" << f2(h) << "\" fill=\"" << fill
            << "\"/>\n";
    }
    void circle(double cx, double cy, double r, const char* fill) {
        out << "<circle cx=\"" << f2(cx) << "\" cy=\"" << f2(cy)
            << "\" r=\"" << f2(r) << "\" fill=\"" << fill << "\"/>\n";
    }
    void line(double x1, double y1, double x2, double y2, const char* stroke,
              double width, bool dashed = false) {
        out << "<line x1=\"" << f2(x1) << "\" y1=\"" << f2(y1) << "\" x2=\""
            << f2(x2) << "\" y2=\"" << f2(y2) << "\" stroke=\"" << stroke
            << "\" stroke-width=\"" << f2(width) << '"';
        if (dashed) out << " stroke-dasharray=\"4 3\"";
        out << "/>\n";
    }
    std::string finish() {
        out << "</svg>\n";
        return out.str();
    }
};

} // namespace

void write_trace_csv(const forest_fire& sim, std::ostream& out) {
    out << "event_time,kind,site,fire_left,fire_right\n";
    for (const auto& ev : sim.trace()) {
        out << num12(ev.time) << ',' << kind_name(ev.kind) << ',' << ev.site
            << ',';
        if (ev.kind == trace_kind::fire)
            out << ev.fire_left << ',' << ev.fire_right;
        else
            out << ',';
        out << '\n';
    }
}

std::vector<trace_row> read_trace_csv(std::istream& in) {
    std::vector<trace_row> rows;
    std::string line;
    std::size_t line_no = 0;
    const auto fail = [&](const std::string& why) {
        throw std::runtime_error("trace csv line " + std::to_string(line_no) +
                                 ": " + why);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1) {
            if (line != "event_time,kind,site,fire_left,fire_right")
                fail("unexpected header");
            continue;
        }
        if (line.empty()) continue;
        std::vector<std::string> cols;
        std::size_t start = 0;
        for (;;) {
            const auto comma = line.find(',', start);
            cols.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (cols.size() != 5) fail("expected 5 columns");
        trace_row row;
        try {
            row.time = std::stod(cols[0]);
            row.site = std::stoll(cols[2]);
            if (!cols[3].empty()) row.fire_left = std::stoll(cols[3]);
            if (!cols[4].empty()) row.fire_right = std::stoll(cols[4]);
        } catch (const std::exception&) {
            fail("bad number");
        }
        if (cols[1] == "seed") row.kind = trace_kind::seed;
        else if (cols[1] == "match") row.kind = trace_kind::match;
        else if (cols[1] == "fire") row.kind = trace_kind::fire;
        else fail("unknown kind \"" + cols[1] + "\"");
        if (row.kind == trace_kind::fire &&
            (!row.fire_left || !row.fire_right))
            fail("fire row without bounds");
        rows.push_back(row);
    }
    return rows;
}

std::string render_discrete(const std::vector<trace_row>& rows,
                            std::int64_t lo, std::int64_t hi, double horizon,
                            render_options opts) {
    if (hi < lo || !(horizon > 0.0))
        throw std::invalid_argument("render_discrete: bad box or horizon");
    const auto n = static_cast<double>(hi - lo + 1);
    // Integer pixels per site when the box is small, run-length downsample
    // when it is wider than the pixel budget.
    const double ppx = std::max(1.0, std::floor(640.0 / n));
    const auto plot_w = static_cast<std::int64_t>(
        std::min<double>(opts.max_width_px, n * ppx));
    const int n_rows = opts.height_px;
    const double plot_h = opts.height_px;
    svg_builder svg(2 * margin + static_cast<double>(plot_w),
                    2 * margin + plot_h, "discrete");

    std::vector<char> occ(static_cast<std::size_t>(hi - lo + 1), 0);
    std::vector<std::pair<double, std::int64_t>> bullets;
    const auto to_px = [&](std::int64_t site) {
        return static_cast<std::int64_t>(
            std::floor(static_cast<double>(site - lo) *
                       static_cast<double>(plot_w) / n));
    };
    std::size_t idx = 0;
    svg.out << "<g fill=\"#000000\">\n";
    for (int r = 0; r < n_rows; ++r) {
        const double t_row =
            horizon * static_cast<double>(r + 1) / n_rows;
        for (; idx < rows.size() && rows[idx].time <= t_row; ++idx) {
            const trace_row& ev = rows[idx];
            if (ev.kind == trace_kind::seed) {
                if (ev.site >= lo && ev.site <= hi)
                    occ[static_cast<std::size_t>(ev.site - lo)] = 1;
            } else if (ev.kind == trace_kind::fire) {
                const std::int64_t a = std::max(*ev.fire_left, lo);
                const std::int64_t b = std::min(*ev.fire_right, hi);
                for (std::int64_t i = a; i <= b; ++i)
                    occ[static_cast<std::size_t>(i - lo)] = 0;
                bullets.emplace_back(ev.time, ev.site);
            }
        }
        // Occupied runs -> pixel intervals, merged where they touch.
        std::vector<std::pair<std::int64_t, std::int64_t>> px;
        for (std::int64_t i = lo; i <= hi;) {
            if (!occ[static_cast<std::size_t>(i - lo)]) {
                ++i;
                continue;
            }
            std::int64_t j = i;
            while (j < hi && occ[static_cast<std::size_t>(j + 1 - lo)]) ++j;
            std::int64_t p0 = to_px(i), p1 = to_px(j) + 1;
            if (p1 <= p0) p1 = p0 + 1;
            if (!px.empty() && p0 <= px.back().second)
                px.back().second = std::max(px.back().second, p1);
            else
                px.emplace_back(p0, p1);
            i = j + 1;
        }
        const double y = margin + plot_h * static_cast<double>(r) / n_rows;
        const double row_h = plot_h / n_rows;
        for (const auto& [p0, p1] : px)
            svg.rect(margin + static_cast<double>(p0), y,
                     static_cast<double>(p1 - p0), row_h, "#000000");
    }
    svg.out << "</g>\n<g>\n";
    for (const auto& [t, site] : bullets)
        svg.circle(margin + (static_cast<double>(site - lo) + 0.5) *
                                static_cast<double>(plot_w) / n,
                   margin + plot_h * t / horizon, opts.bullet_radius,
                   "#cc0000");
    svg.out << "</g>\n";
    return svg.finish();
}

std::string render_limit(const lff_trajectory& traj, render_options opts) {
    const double a = traj.half_width(), horizon = traj.horizon();
    const double plot_w = 960.0, plot_h = opts.height_px;
    const auto x_of = [&](double x) {
        return margin + (x + a) / (2.0 * a) * plot_w;
    };
    const auto y_of = [&](double t) { return margin + t / horizon * plot_h; };
    svg_builder svg(2 * margin + plot_w, 2 * margin + plot_h, "limit");
    for (const auto& ev : traj.events()) {
        if (ev.macro)
            svg.line(x_of(ev.left), y_of(ev.t), x_of(ev.right), y_of(ev.t),
                     "#cc0000", 2.0);
        else if (ev.height > 0.0)
            svg.line(x_of(ev.x), y_of(ev.t), x_of(ev.x),
                     y_of(std::min(ev.t + ev.height, horizon)), "#0044cc",
                     2.0);
    }
    for (const auto& m : traj.marks())
        svg.circle(x_of(m.x), y_of(m.t), opts.bullet_radius, "#000000");
    return svg.finish();
}

std::string render_limit_beta(const std::vector<double>& cells,
                              const std::vector<beta_fire>& fires,
                              double half_width, double horizon,
                              render_options opts) {
    const double plot_w = 960.0, plot_h = opts.height_px;
    const auto x_of = [&](double x) {
        return margin + (x + half_width) / (2.0 * half_width) * plot_w;
    };
    const auto y_of = [&](double t) { return margin + t / horizon * plot_h; };
    svg_builder svg(2 * margin + plot_w, 2 * margin + plot_h, "limit-beta");
    for (const double c : cells)
        if (c >= -half_width && c <= half_width)
            svg.line(x_of(c), margin, x_of(c), margin + plot_h, "#999999",
                     1.0, true);
    for (const auto& f : fires) {
        svg.line(x_of(f.left), y_of(f.t), x_of(f.right), y_of(f.t),
                 "#cc0000", 2.0);
        svg.circle(x_of(f.x), y_of(f.t), opts.bullet_radius, "#000000");
    }
    return svg.finish();
}

std::string render_limit_zero(const std::vector<double>& marks,
                              double half_width, render_options opts) {
    const double plot_w = 960.0, plot_h = 80.0;
    const auto x_of = [&](double x) {
        return margin + (x + half_width) / (2.0 * half_width) * plot_w;
    };
    svg_builder svg(2 * margin + plot_w, 2 * margin + plot_h, "limit-zero");
    const double y = margin + plot_h / 2.0;
    svg.line(margin, y, margin + plot_w, y, "#000000", 1.0);
    for (const double m : marks)
        if (m >= -half_width && m <= half_width)
            svg.circle(x_of(m), y, opts.bullet_radius, "#000000");
    return svg.finish();
}

} // namespace pyroscale
