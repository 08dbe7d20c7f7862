// pyroscale CLI: configuration-driven experiment runner for the
// renewal-driven forest-fire process, its scaling limits, and the
// statistical verification estimators.  One subcommand per mode; a JSON
// config file can seed every option and explicit flags win; PYROSCALE_SEED
// overrides every other seed source.  Exit status is 0 iff every verdict of
// the selected run passes, otherwise the number of failing report cells
// (capped), with the failures enumerated on stderr.

#include "pyroscale/cluster_stats.hpp"
#include "pyroscale/config.hpp"
#include "pyroscale/discrete_ff.hpp"
#include "pyroscale/law.hpp"
#include "pyroscale/limit_lff.hpp"
#include "pyroscale/render.hpp"
#include "pyroscale/rng.hpp"
#include "pyroscale/scaling.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace ps = pyroscale;

namespace {

bool flag_given(const CLI::App* sub, const std::string& name) {
    const auto* opt = sub->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
}

std::string num12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// Write an artifact to a file, or to stdout when the path is empty.
void write_artifact(const std::string& path,
                    const std::function<void(std::ostream&)>& writer) {
    if (path.empty()) {
        writer(std::cout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open output file \"" + path + "\"");
    writer(out);
    out.flush();
    if (!out)
        throw std::runtime_error("write failed for \"" + path + "\"");
}

const char* regime_name(ps::tail_regime r) {
    switch (r) {
        case ps::tail_regime::bounded_support: return "bounded-support";
        case ps::tail_regime::polynomial: return "polynomial";
        case ps::tail_regime::superpolynomial: return "superpolynomial";
        default: return "logarithmic";
    }
}

// Report artifact + verdict enumeration; returns the process exit code.
int finish_report(const ps::stats_report& rep, const std::string& out_path) {
    write_artifact(out_path,
                   [&](std::ostream& os) { rep.write_csv(os); });
    int failures = 0;
    for (const auto& c : rep.cells) {
        if (c.pass) continue;
        ++failures;
        std::cerr << "FAIL " << rep.estimator << " [" << c.bin
                  << "]: target " << num12(c.target) << ", empirical "
                  << num12(c.empirical) << " (stderr " << num12(c.std_error)
                  << ", N " << c.n << ")\n";
    }
    return std::min(failures, 125);
}

// Everything a subcommand can consume; filled with built-in defaults, then
// config-file values for options not given on the command line, then the
// flags themselves (CLI11 assigns only options that appear).
struct cli_state {
    std::string config_path;
    std::string law_str;
    std::string match_law_str;
    std::string mode;
    std::string estimator;
    std::string out_path;
    std::string svg_path;
    std::string cloud_path;
    std::string trace_path;
    std::vector<double> lambdas;
    double half_width = 2.5;
    double horizon = 1.0;
    double delta = 0.0;
    double epsilon = 0.1;
    double t0 = 0.2;
    double t1 = 0.7;
    double gap_l = 0.5;
    double eps = 0.05;
    double tv_tolerance = 0.05;
    std::int64_t replicas = 10000;
    std::int64_t limit_replicas = 2000;
    std::int64_t n_sites = 100000;
    std::int64_t edges = 200000;
    std::int64_t box_lo = 0;
    std::int64_t box_hi = 0;
    std::uint64_t seed = 1;
    unsigned jobs = 1;
    int kmax = 20;
    int m_max = 12;
    bool fires = true;
    bool force_identity = false;
    bool poisson_matches = false;
    bool horizon_set = false;  // --T flag or config "T" present
};

// Layer config-file values under command-line flags, then the environment
// seed on top of both.
void merge_config(cli_state& st, const CLI::App* sub,
                  const std::string& canonical_mode) {
    ps::experiment_config cfg;
    if (!st.config_path.empty()) cfg = ps::load_config(st.config_path);

    const auto lay = [&](const char* flag, auto& var, const auto& opt_val) {
        if (!flag_given(sub, flag) && opt_val.has_value()) var = *opt_val;
    };
    if (cfg.law && !flag_given(sub, "--law")) st.law_str.clear();
    if (cfg.match_law && !flag_given(sub, "--match-law"))
        st.match_law_str.clear();
    lay("--mode", st.mode, cfg.mode);
    if (!flag_given(sub, "--lambda") && !cfg.lambda_grid.empty())
        st.lambdas = cfg.lambda_grid;
    lay("--A", st.half_width, cfg.half_width);
    lay("--T", st.horizon, cfg.horizon);
    st.horizon_set = flag_given(sub, "--T") || cfg.horizon.has_value();
    lay("--replicas", st.replicas, cfg.replicas);
    lay("--limit-replicas", st.limit_replicas, cfg.limit_replicas);
    lay("--jobs", st.jobs, cfg.jobs);
    lay("--out", st.out_path, cfg.out_csv);
    lay("--svg", st.svg_path, cfg.out_svg);
    lay("--estimator", st.estimator, cfg.estimator);
    lay("--kmax", st.kmax, cfg.kmax);
    lay("--delta", st.delta, cfg.delta);
    lay("--epsilon", st.epsilon, cfg.epsilon);
    lay("--t0", st.t0, cfg.t0);
    lay("--t1", st.t1, cfg.t1);
    lay("--l", st.gap_l, cfg.gap_threshold);
    lay("--eps", st.eps, cfg.eps);
    lay("--n-sites", st.n_sites, cfg.n_sites);
    lay("--edges", st.edges, cfg.edges);
    lay("--m-max", st.m_max, cfg.m_max);
    lay("--fires", st.fires, cfg.fires);
    lay("--tv-tolerance", st.tv_tolerance, cfg.tv_tolerance);
    lay("--force-identity", st.force_identity, cfg.force_identity);

    // Seed precedence: PYROSCALE_SEED > --seed > config file > default.
    if (!flag_given(sub, "--seed") && cfg.seed) st.seed = *cfg.seed;
    if (const auto env = ps::env_seed()) st.seed = *env;

    if (cfg.mode && !canonical_mode.empty() && *cfg.mode != canonical_mode &&
        canonical_mode != "limit")
        throw ps::config_error("config: field \"mode\": \"" + *cfg.mode +
                               "\" does not match subcommand mode \"" +
                               canonical_mode + "\"");

    // Law resolution happens lazily: stash config laws back as strings only
    // when the flag was absent, so the flag always wins.
    if (cfg.law && st.law_str.empty()) st.law_str = cfg.law->name();
    if (cfg.match_law && st.match_law_str.empty())
        st.match_law_str = cfg.match_law->name();
}

ps::law_spec require_law(const cli_state& st, const std::string& what) {
    if (st.law_str.empty())
        throw ps::config_error(what +
                               ": no law given (use --law or the config "
                               "\"law\" field)");
    return ps::parse_law(st.law_str);
}

double require_one_lambda(const cli_state& st) {
    if (st.lambdas.size() != 1)
        throw ps::config_error(
            "this mode needs exactly one --lambda value");
    const double l = st.lambdas.front();
    if (!(l > 0.0) || l > 1.0)
        throw ps::config_error("lambda must lie in (0, 1]");
    return l;
}

int cmd_simulate_discrete(const cli_state& st) {
    const ps::law_spec law = require_law(st, "simulate-discrete");
    const ps::law_spec match_law =
        st.poisson_matches || st.match_law_str.empty()
            ? ps::law_spec::exponential()
            : ps::parse_law(st.match_law_str);
    const double lambda = require_one_lambda(st);
    const ps::scale_set sc = ps::compute_scales(law, lambda, st.epsilon);
    const auto span = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(std::floor(
               st.half_width * static_cast<double>(sc.n_lambda))));
    ps::ff_options opt;
    opt.record_trace = true;
    ps::forest_fire sim(-span, span, law, match_law, lambda,
                        ps::derive_key(st.seed, ps::stream_tag::generic),
                        opt);
    sim.run_until(sc.a_lambda * st.horizon);
    std::ostringstream csv;
    ps::write_trace_csv(sim, csv);
    write_artifact(st.out_path,
                   [&](std::ostream& os) { os << csv.str(); });
    if (!st.svg_path.empty()) {
        std::istringstream in(csv.str());
        const auto rows = ps::read_trace_csv(in);
        const std::string svg = ps::render_discrete(
            rows, -span, span, sc.a_lambda * st.horizon);
        write_artifact(st.svg_path, [&](std::ostream& os) { os << svg; });
    }
    return 0;
}

int cmd_simulate_limit(const cli_state& st) {
    if (st.mode == "limit-inf" || st.mode == "limit-bs") {
        ps::lff_trajectory traj =
            st.mode == "limit-inf"
                ? ps::lff_trajectory::simulate_inf(st.half_width, st.horizon,
                                                   st.seed)
                : ps::lff_trajectory::simulate_bs(
                      st.half_width, st.horizon,
                      require_law(st, "limit-bs"), st.seed,
                      st.force_identity);
        write_artifact(st.out_path, [&](std::ostream& os) {
            ps::write_events_csv(traj, os);
        });
        if (!st.svg_path.empty())
            write_artifact(st.svg_path, [&](std::ostream& os) {
                os << ps::render_limit(traj);
            });
        return 0;
    }
    if (st.mode == "limit-beta") {
        const ps::law_spec law = require_law(st, "limit-beta");
        if (law.regime() != ps::tail_regime::polynomial)
            throw ps::config_error(
                "limit-beta needs a polynomial-tail law, e.g. pareto(2)");
        ps::lff_beta_trajectory traj(st.half_width, st.horizon, law.param(),
                                     st.delta, st.seed);
        write_artifact(st.out_path, [&](std::ostream& os) {
            os << "time,kind,position,destroyed_left,destroyed_right,"
                  "barrier_height\n";
            for (const auto& f : traj.fires())
                os << num12(f.t) << ",match_macro," << num12(f.x) << ','
                   << num12(f.left) << ',' << num12(f.right) << ",0\n";
        });
        if (!st.cloud_path.empty())
            write_artifact(st.cloud_path, [&](std::ostream& os) {
                traj.write_cloud_csv(st.horizon, os);
            });
        if (!st.svg_path.empty())
            write_artifact(st.svg_path, [&](std::ostream& os) {
                os << ps::render_limit_beta(traj.cells(), traj.fires(),
                                            st.half_width, st.horizon);
            });
        return 0;
    }
    if (st.mode == "limit-zero") {
        const ps::lff_zero_state state(st.half_width, st.seed);
        write_artifact(st.out_path, [&](std::ostream& os) {
            os << "time,kind,position,destroyed_left,destroyed_right,"
                  "barrier_height\n";
            for (const double m : state.marks())
                os << "0,match_macro," << num12(m) << ',' << num12(m) << ','
                   << num12(m) << ",0\n";
        });
        if (!st.svg_path.empty())
            write_artifact(st.svg_path, [&](std::ostream& os) {
                os << ps::render_limit_zero(state.marks(), st.half_width);
            });
        return 0;
    }
    throw ps::config_error(
        "simulate-limit needs --mode limit-inf|limit-bs|limit-beta|"
        "limit-zero");
}

int cmd_stats(const cli_state& st) {
    const std::string& e = st.estimator;
    if (e == "qk-bar") {
        const ps::law_spec law = require_law(st, "qk-bar");
        ps::stats_report rep;
        rep.estimator = "qk-bar";
        rep.param = "law=" + law.name() + ";kmax=" + std::to_string(st.kmax);
        for (int k = 0; k <= st.kmax; ++k) {
            const double emp = ps::qk_bar(law, k);
            // The bounded-support averaged cluster law is parameter-free
            // (the level variable absorbs the gap length), so the
            // closed-form rationals are the target for every dirac law.
            const double target =
                k == 0 ? 0.5
                       : 2.0 * k /
                             (static_cast<double>(k + 1) * (k + 2) * (k + 3));
            rep.cells.push_back({"k=" + std::to_string(k), target, emp, 0.0,
                                 1, std::abs(emp - target) < 1e-9});
        }
        return finish_report(rep, st.out_path);
    }
    if (e == "cluster-size")
        return finish_report(
            ps::cluster_size_histogram(require_law(st, e),
                                       require_one_lambda(st), st.horizon,
                                       st.half_width, st.kmax, st.replicas,
                                       st.limit_replicas, st.fires,
                                       st.tv_tolerance, st.seed, st.jobs),
            st.out_path);
    if (e == "macro-tail-zero")
        return finish_report(ps::macro_tail_zero(st.replicas, st.seed,
                                                 st.jobs),
                             st.out_path);
    if (e == "macro-tail-inf")
        return finish_report(
            ps::macro_tail_barrier(ps::barrier_height_rule::current_level,
                                   std::nullopt, st.half_width, st.horizon,
                                   st.replicas, st.seed, st.jobs),
            st.out_path);
    if (e == "macro-tail-bs")
        return finish_report(
            ps::macro_tail_barrier(ps::barrier_height_rule::theta_draw,
                                   require_law(st, e), st.half_width,
                                   st.horizon, st.replicas, st.seed,
                                   st.jobs),
            st.out_path);
    if (e == "gap-count")
        return finish_report(
            ps::gap_count_statistic(require_law(st, e),
                                    require_one_lambda(st), st.horizon,
                                    st.gap_l, st.replicas, st.seed, st.jobs),
            st.out_path);
    if (e == "gap-count-asymptotics") {
        if (st.lambdas.empty())
            throw ps::config_error("gap-count-asymptotics needs a --lambda "
                                   "grid");
        return finish_report(
            ps::gap_count_asymptotics(require_law(st, e), st.lambdas,
                                      st.horizon, st.gap_l, st.replicas,
                                      st.seed, st.jobs),
            st.out_path);
    }
    if (e == "theta-convergence") {
        if (st.lambdas.empty())
            throw ps::config_error("theta-convergence needs a --lambda "
                                   "grid");
        return finish_report(
            ps::theta_lambda_convergence(require_law(st, e), st.lambdas,
                                         st.t0, st.t1, st.replicas, st.eps,
                                         st.seed, st.jobs),
            st.out_path);
    }
    if (e == "kingman")
        return finish_report(ps::kingman_check(st.n_sites, st.horizon,
                                               st.m_max, st.edges, st.seed),
                             st.out_path);
    throw ps::config_error(
        "unknown estimator \"" + e +
        "\" (expected qk-bar, cluster-size, macro-tail-zero, "
        "macro-tail-inf, macro-tail-bs, gap-count, gap-count-asymptotics, "
        "theta-convergence, kingman)");
}

int cmd_scales(const cli_state& st) {
    const ps::law_spec law = require_law(st, "scales");
    if (st.lambdas.empty())
        throw ps::config_error("scales needs at least one --lambda value");
    write_artifact(st.out_path, [&](std::ostream& os) {
        os << "lambda,a_lambda,n_lambda,m_lambda\n";
        for (const double l : st.lambdas) {
            const ps::scale_set sc = ps::compute_scales(law, l, st.epsilon);
            os << num12(l) << ',' << num12(sc.a_lambda) << ',' << sc.n_lambda
               << ',' << sc.m_lambda << '\n';
        }
    });
    return 0;
}

int cmd_classify(const cli_state& st) {
    const ps::law_spec law = require_law(st, "classify");
    const ps::regime_diagnostic diag = ps::classify_regime(law);
    write_artifact(st.out_path, [&](std::ostream& os) {
        os << "law,regime,beta_hat,diagnostic_run\n"
           << law.name() << ',' << regime_name(diag.tag) << ','
           << (std::isfinite(diag.beta_hat) ? num12(diag.beta_hat) : "inf")
           << ',' << (diag.diagnostic_run ? "yes" : "no") << '\n';
    });
    return 0;
}

int cmd_percolation(const cli_state& st) {
    return finish_report(ps::kingman_check(st.n_sites, st.horizon, st.m_max,
                                           st.edges, st.seed),
                         st.out_path);
}

int cmd_render(const cli_state& st) {
    if (st.trace_path.empty())
        throw ps::config_error("render needs --trace <csv>");
    if (st.box_hi < st.box_lo)
        throw ps::config_error("render needs a site box --lo <= --hi");
    std::ifstream in(st.trace_path);
    if (!in)
        throw std::runtime_error("cannot open trace \"" + st.trace_path +
                                 "\"");
    const auto rows = ps::read_trace_csv(in);
    double horizon = st.horizon_set ? st.horizon : 0.0;
    if (horizon <= 0.0) {
        for (const auto& r : rows) horizon = std::max(horizon, r.time);
        if (horizon <= 0.0) horizon = 1.0;
    }
    const std::string svg =
        ps::render_discrete(rows, st.box_lo, st.box_hi, horizon);
    write_artifact(st.svg_path.empty() ? st.out_path : st.svg_path,
                   [&](std::ostream& os) { os << svg; });
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    cli_state st;
    CLI::App app{
        "pyroscale: renewal-driven forest-fire simulation and scaling-limit "
        "verification"};
    app.require_subcommand(1);

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", st.config_path,
                        "JSON config file; explicit flags win");
        sub->add_option("--seed", st.seed,
                        "master seed (PYROSCALE_SEED overrides)")
            ->capture_default_str();
        sub->add_option("--out", st.out_path,
                        "output CSV path (default: stdout)");
    };
    const auto add_law = [&](CLI::App* sub) {
        sub->add_option(
            "--law", st.law_str,
            "gap law: dirac | dirac(x) | exponential | weibull(a) | "
            "pareto(b) | log");
    };

    auto* sd = app.add_subcommand("simulate-discrete",
                                  "run the lattice process, export a trace");
    add_common(sd);
    add_law(sd);
    sd->add_option("--match-law", st.match_law_str,
                   "match gap law (default exponential)");
    sd->add_flag("--poisson-matches", st.poisson_matches,
                 "force exponential match gaps (exactly Poisson matches) "
                 "regardless of --match-law");
    sd->add_option("--lambda", st.lambdas, "match rate in (0,1]");
    sd->add_option("--A", st.half_width, "box half-width in space units")
        ->capture_default_str();
    sd->add_option("--T", st.horizon, "horizon in rescaled time units")
        ->capture_default_str();
    sd->add_option("--epsilon", st.epsilon, "density-window knob")
        ->capture_default_str();
    sd->add_option("--svg", st.svg_path, "also render a space-time SVG");

    auto* sl = app.add_subcommand("simulate-limit",
                                  "run a limit process, export its events");
    add_common(sl);
    add_law(sl);
    sl->add_option("--mode", st.mode,
                   "limit-inf | limit-bs | limit-beta | limit-zero");
    sl->add_option("--A", st.half_width, "box half-width")
        ->capture_default_str();
    sl->add_option("--T", st.horizon, "time horizon")->capture_default_str();
    sl->add_option("--delta", st.delta,
                   "vacancy-cloud resolution (0 = automatic)")
        ->capture_default_str();
    sl->add_option("--cloud-out", st.cloud_path,
                   "vacancy-cloud CSV (limit-beta only)");
    sl->add_flag("--force-identity", st.force_identity,
                 "limit-bs: pin barrier heights to the local level");
    sl->add_option("--svg", st.svg_path, "also render a space-time SVG");

    auto* pc = app.add_subcommand("percolation",
                                  "edge-cluster mass check on the "
                                  "coalescent-tail lattice");
    add_common(pc);
    pc->add_option("--n-sites", st.n_sites, "lattice size")
        ->capture_default_str();
    pc->add_option("--T", st.horizon, "occupation time")
        ->capture_default_str();
    pc->add_option("--m-max", st.m_max, "largest tabulated edge mass")
        ->capture_default_str();
    pc->add_option("--edges", st.edges, "sampled edges")
        ->capture_default_str();

    auto* stq = app.add_subcommand("stats",
                                   "run a verification estimator, export "
                                   "the verdict report");
    add_common(stq);
    add_law(stq);
    stq->add_option("--estimator", st.estimator,
                    "qk-bar | cluster-size | macro-tail-zero | "
                    "macro-tail-inf | macro-tail-bs | gap-count | "
                    "gap-count-asymptotics | theta-convergence | kingman");
    stq->add_option("--lambda", st.lambdas, "match rate(s)");
    stq->add_option("--A", st.half_width, "box half-width")
        ->capture_default_str();
    stq->add_option("--T", st.horizon, "horizon / evaluation time")
        ->capture_default_str();
    stq->add_option("--kmax", st.kmax, "largest tabulated cluster size")
        ->capture_default_str();
    stq->add_option("--replicas", st.replicas, "Monte Carlo replicas")
        ->capture_default_str();
    stq->add_option("--limit-replicas", st.limit_replicas,
                    "replicas for the limit-side target")
        ->capture_default_str();
    stq->add_option("--jobs", st.jobs, "worker threads")
        ->capture_default_str();
    stq->add_option("--l", st.gap_l, "gap threshold in units of a_lambda")
        ->capture_default_str();
    stq->add_option("--t0", st.t0, "occupation window start")
        ->capture_default_str();
    stq->add_option("--t1", st.t1, "occupation window end")
        ->capture_default_str();
    stq->add_option("--eps", st.eps, "convergence tolerance")
        ->capture_default_str();
    stq->add_option("--n-sites", st.n_sites, "lattice size (kingman)")
        ->capture_default_str();
    stq->add_option("--edges", st.edges, "sampled edges (kingman)")
        ->capture_default_str();
    stq->add_option("--m-max", st.m_max, "largest edge mass (kingman)")
        ->capture_default_str();
    stq->add_flag("--fires,!--no-fires", st.fires,
                  "enable match-triggered destruction")
        ->capture_default_str();
    stq->add_option("--tv-tolerance", st.tv_tolerance,
                    "total-variation budget (cluster-size)")
        ->capture_default_str();

    auto* sc = app.add_subcommand("scales",
                                  "tabulate the scaling constants over a "
                                  "lambda grid");
    add_common(sc);
    add_law(sc);
    sc->add_option("--lambda", st.lambdas, "match rate grid");
    sc->add_option("--epsilon", st.epsilon, "density-window knob")
        ->capture_default_str();

    auto* cl = app.add_subcommand("classify",
                                  "report the numeric tail-regime "
                                  "diagnostic");
    add_common(cl);
    add_law(cl);

    auto* rd = app.add_subcommand("render",
                                  "render a trace CSV as a space-time SVG");
    add_common(rd);
    rd->add_option("--trace", st.trace_path, "trace CSV from "
                                             "simulate-discrete");
    rd->add_option("--lo", st.box_lo, "leftmost site of the box");
    rd->add_option("--hi", st.box_hi, "rightmost site of the box");
    rd->add_option("--T", st.horizon,
                   "time horizon (default: last event time)");
    rd->add_option("--svg", st.svg_path, "SVG output path");

    CLI11_PARSE(app, argc, argv);

    CLI::App* sub = app.get_subcommands().front();
    try {
        std::string canonical;
        if (sub == sd) canonical = "discrete";
        else if (sub == sl) canonical = "limit";
        else if (sub == pc) canonical = "percolation";
        else if (sub == stq) canonical = "stats";
        else if (sub == sc) canonical = "scales";
        else if (sub == cl) canonical = "classify";
        merge_config(st, sub, canonical);
        if (sub == sl && !st.mode.empty() &&
            st.mode.rfind("limit-", 0) != 0)
            throw ps::config_error("simulate-limit mode must be one of "
                                   "limit-inf, limit-bs, limit-beta, "
                                   "limit-zero");

        if (sub == sd) return cmd_simulate_discrete(st);
        if (sub == sl) return cmd_simulate_limit(st);
        if (sub == pc) return cmd_percolation(st);
        if (sub == stq) return cmd_stats(st);
        if (sub == sc) return cmd_scales(st);
        if (sub == cl) return cmd_classify(st);
        return cmd_render(st);
    } catch (const ps::config_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
