#include "pyroscale/config.hpp"

#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace pyroscale {

using nlohmann::json;

namespace {

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
    throw config_error("config: field \"" + field + "\": " + why);
}

double require_number(const json& v, const std::string& field) {
    if (!v.is_number()) bad_field(field, "expected a number");
    return v.get<double>();
}

law_spec law_from_json(const json& v, const std::string& field) {
    if (v.is_string()) return parse_law(v.get<std::string>());
    if (!v.is_object())
        bad_field(field, "expected a law string or object");
    if (!v.contains("law") || !v["law"].is_string())
        bad_field(field, "law object needs a \"law\" name string");
    const std::string name = v["law"].get<std::string>();
    const auto only = [&](std::initializer_list<const char*> allowed) {
        for (const auto& [k, val] : v.items()) {
            (void)val;
            bool ok = k == "law";
            for (const char* a : allowed) ok = ok || k == a;
            if (!ok) bad_field(field + "." + k, "unknown law parameter");
        }
    };
    if (name == "dirac") {
        only({"t_s"});
        return law_spec::dirac(
            v.contains("t_s") ? require_number(v["t_s"], field + ".t_s")
                              : 1.0);
    }
    if (name == "exponential") {
        only({});
        return law_spec::exponential();
    }
    if (name == "weibull") {
        only({"alpha"});
        if (!v.contains("alpha"))
            bad_field(field, "weibull needs \"alpha\"");
        return law_spec::weibull_tail(
            require_number(v["alpha"], field + ".alpha"));
    }
    if (name == "pareto") {
        only({"beta"});
        if (!v.contains("beta")) bad_field(field, "pareto needs \"beta\"");
        return law_spec::pareto_tail(
            require_number(v["beta"], field + ".beta"));
    }
    if (name == "log") {
        only({});
        return law_spec::log_tail();
    }
    bad_field(field, "unknown law name \"" + name + "\"");
}

template <class T>
void read_scalar(const json& v, const std::string& field,
                 std::optional<T>& out) {
    if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) bad_field(field, "expected a string");
        out = v.get<std::string>();
    } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) bad_field(field, "expected true or false");
        out = v.get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer() && !v.is_number_unsigned())
            bad_field(field, "expected an integer");
        if constexpr (std::is_unsigned_v<T>) {
            if (v.is_number_integer() && v.get<std::int64_t>() < 0)
                bad_field(field, "expected a nonnegative integer");
        }
        out = v.get<T>();
    } else {
        out = static_cast<T>(require_number(v, field));
    }
}

} // namespace

law_spec parse_law(const std::string& text) {
    std::string name = text;
    std::optional<double> param;
    const auto open = text.find('(');
    if (open != std::string::npos) {
        if (text.back() != ')')
            throw config_error("law \"" + text + "\": missing ')'");
        name = text.substr(0, open);
        const std::string inner =
            text.substr(open + 1, text.size() - open - 2);
        try {
            std::size_t used = 0;
            param = std::stod(inner, &used);
            if (used != inner.size()) throw std::invalid_argument(inner);
        } catch (const std::exception&) {
            throw config_error("law \"" + text +
                               "\": bad parameter \"" + inner + "\"");
        }
    }
    const auto no_param = [&] {
        if (param)
            throw config_error("law \"" + name +
                               "\" does not take a parameter");
    };
    if (name == "dirac") return law_spec::dirac(param.value_or(1.0));
    if (name == "exponential") {
        no_param();
        return law_spec::exponential();
    }
    if (name == "weibull") {
        if (!param)
            throw config_error("law \"weibull\" needs a parameter, "
                               "e.g. weibull(1.5)");
        return law_spec::weibull_tail(*param);
    }
    if (name == "pareto") {
        if (!param)
            throw config_error("law \"pareto\" needs a parameter, "
                               "e.g. pareto(2)");
        return law_spec::pareto_tail(*param);
    }
    if (name == "log") {
        no_param();
        return law_spec::log_tail();
    }
    throw config_error("unknown law \"" + name +
                       "\" (expected dirac, exponential, weibull, pareto, "
                       "or log)");
}

experiment_config parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw config_error(std::string("config: ") + e.what());
    }
    if (!root.is_object())
        throw config_error("config: top level must be a JSON object");

    experiment_config cfg;
    for (const auto& [key, v] : root.items()) {
        if (key == "mode") read_scalar(v, key, cfg.mode);
        else if (key == "law") cfg.law = law_from_json(v, key);
        else if (key == "match_law") cfg.match_law = law_from_json(v, key);
        else if (key == "lambda") {
            if (v.is_number()) {
                cfg.lambda_grid = {v.get<double>()};
            } else if (v.is_array() && !v.empty()) {
                for (const auto& x : v)
                    cfg.lambda_grid.push_back(require_number(x, key));
            } else {
                bad_field(key, "expected a number or nonempty array");
            }
        }
        else if (key == "A") read_scalar(v, key, cfg.half_width);
        else if (key == "T") read_scalar(v, key, cfg.horizon);
        else if (key == "replicas") read_scalar(v, key, cfg.replicas);
        else if (key == "limit_replicas")
            read_scalar(v, key, cfg.limit_replicas);
        else if (key == "seed") read_scalar(v, key, cfg.seed);
        else if (key == "jobs") read_scalar(v, key, cfg.jobs);
        else if (key == "out") read_scalar(v, key, cfg.out_csv);
        else if (key == "svg") read_scalar(v, key, cfg.out_svg);
        else if (key == "estimator") read_scalar(v, key, cfg.estimator);
        else if (key == "kmax") read_scalar(v, key, cfg.kmax);
        else if (key == "delta") read_scalar(v, key, cfg.delta);
        else if (key == "epsilon") read_scalar(v, key, cfg.epsilon);
        else if (key == "t0") read_scalar(v, key, cfg.t0);
        else if (key == "t1") read_scalar(v, key, cfg.t1);
        else if (key == "l") read_scalar(v, key, cfg.gap_threshold);
        else if (key == "eps") read_scalar(v, key, cfg.eps);
        else if (key == "n_sites") read_scalar(v, key, cfg.n_sites);
        else if (key == "edges") read_scalar(v, key, cfg.edges);
        else if (key == "m_max") read_scalar(v, key, cfg.m_max);
        else if (key == "fires") read_scalar(v, key, cfg.fires);
        else if (key == "tv_tolerance")
            read_scalar(v, key, cfg.tv_tolerance);
        else if (key == "force_identity")
            read_scalar(v, key, cfg.force_identity);
        else bad_field(key, "unknown field");
    }
    return cfg;
}

experiment_config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("config: cannot open \"" + path + "\"");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::optional<std::uint64_t> env_seed() {
    const char* s = std::getenv("PYROSCALE_SEED");
    if (s == nullptr || *s == '\0') return std::nullopt;
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(s, &used);
        if (used != std::string(s).size())
            throw std::invalid_argument(s);
        return static_cast<std::uint64_t>(v);
    } catch (const std::exception&) {
        throw config_error(
            std::string("PYROSCALE_SEED: not an unsigned integer: \"") + s +
            "\"");
    }
}

} // namespace pyroscale
