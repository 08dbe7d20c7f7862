#pragma once

// JSON experiment configuration: a single structured file whose fields seed
// the CLI options, with command-line flags winning on conflict.  Validation
// is strict — unknown fields are rejected by name so typos never silently
// fall back to defaults.

#include "pyroscale/law.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pyroscale {

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Compact law grammar used by flags and by JSON string values:
//   "dirac"           gap length 1
//   "dirac(2.5)"      gap length 2.5
//   "exponential"     rate-1 exponential gaps
//   "weibull(1.5)"    stretched-exponential gap tail exp(-t^1.5)
//   "pareto(2)"       polynomial gap tail t^-2
//   "log"             logarithmic gap tail 1/log t
// JSON object form spells the parameter out by name:
//   {"law": "dirac", "t_s": 2.5}, {"law": "weibull", "alpha": 1.5},
//   {"law": "pareto", "beta": 2.0}, {"law": "exponential"}, {"law": "log"}.
law_spec parse_law(const std::string& text);

// All fields optional: absent means "not set here", so the CLI can layer
// built-in default < config file < flag < PYROSCALE_SEED (seed only).
struct experiment_config {
    std::optional<std::string> mode;
    std::optional<law_spec> law;
    std::optional<law_spec> match_law;
    std::vector<double> lambda_grid;  // "lambda": one number or an array
    std::optional<double> half_width;
    std::optional<double> horizon;
    std::optional<std::int64_t> replicas;
    std::optional<std::int64_t> limit_replicas;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> jobs;
    std::optional<std::string> out_csv;
    std::optional<std::string> out_svg;
    std::optional<std::string> estimator;
    std::optional<int> kmax;
    std::optional<double> delta;
    std::optional<double> epsilon;
    std::optional<double> t0;
    std::optional<double> t1;
    std::optional<double> gap_threshold;  // "l"
    std::optional<double> eps;
    std::optional<std::int64_t> n_sites;
    std::optional<std::int64_t> edges;
    std::optional<int> m_max;
    std::optional<bool> fires;
    std::optional<double> tv_tolerance;
    std::optional<bool> force_identity;
};

// Parse a config from JSON text / from a file.  Throws config_error naming
// the offending field (unknown key, wrong type, bad law spec) or carrying
// the JSON parser's position on syntax errors.
experiment_config parse_config(const std::string& json_text);
experiment_config load_config(const std::string& path);

// PYROSCALE_SEED from the environment, if set; throws config_error when the
// variable is present but not a valid unsigned integer.
std::optional<std::uint64_t> env_seed();

} // namespace pyroscale
