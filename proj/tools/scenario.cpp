#include "scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace sica::cli {

namespace {

using nlohmann::json;

std::string join(const std::string& prefix, const std::string& key) {
    return prefix.empty() ? key : prefix + "." + key;
}

const json& require(const json& obj, const std::string& prefix, const std::string& key) {
    if (!obj.is_object() || !obj.contains(key))
        throw ConfigError("missing required key '" + join(prefix, key) + "'");
    return obj.at(key);
}

double as_number(const json& v, const std::string& path) {
    if (!v.is_number())
        throw ConfigError("key '" + path + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d))
        throw ConfigError("key '" + path + "' must be finite");
    return d;
}

std::size_t as_count(const json& v, const std::string& path) {
    if (!v.is_number_integer() || v.get<long long>() < 0)
        throw ConfigError("key '" + path + "' must be a nonnegative integer");
    return v.get<std::size_t>();
}

std::uint64_t as_seed(const json& v, const std::string& path) {
    if (!v.is_number_unsigned())
        throw ConfigError("key '" + path + "' must be a nonnegative integer");
    return v.get<std::uint64_t>();
}

template <class T, class Read>
void optional_field(const json& obj, const std::string& prefix, const std::string& key, T& out,
                    Read read) {
    if (obj.is_object() && obj.contains(key))
        out = read(obj.at(key), join(prefix, key));
}

void optional_number(const json& obj, const std::string& prefix, const std::string& key, double& out) {
    optional_field(obj, prefix, key, out, as_number);
}

void optional_count(const json& obj, const std::string& prefix, const std::string& key,
                    std::size_t& out) {
    optional_field(obj, prefix, key, out, as_count);
}

IntervalNumber as_interval(const json& v, const std::string& path) {
    if (v.is_number())
        return IntervalNumber::degenerate(as_number(v, path));
    if (!v.is_array() || v.size() != 2)
        throw ConfigError("key '" + path + "' must be a number or a [lower, upper] pair");
    try {
        return {as_number(v[0], path + "[0]"), as_number(v[1], path + "[1]")};
    } catch (const DomainError& e) {
        throw ConfigError("key '" + path + "': " + e.what());
    }
}

std::vector<double> as_number_list(const json& v, const std::string& path) {
    if (!v.is_array())
        throw ConfigError("key '" + path + "' must be an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(as_number(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

const json& section(const json& doc, const std::string& key) {
    static const json empty = json::object();
    if (!doc.contains(key))
        return empty;
    const json& s = doc.at(key);
    if (!s.is_object())
        throw ConfigError("key '" + key + "' must be an object");
    return s;
}

std::size_t line_of(const std::string& text, std::size_t byte) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i)
        if (text[i] == '\n')
            ++line;
    return line;
}

} // namespace

std::vector<double> default_k_grid() {
    std::vector<double> ks;
    for (int i = 0; i <= 20; ++i)
        ks.push_back(i / 20.0);
    return ks;
}

ControlGrid ScenarioConfig::initial_control() const { return initial_control(grid); }

ControlGrid ScenarioConfig::initial_control(const TimeGrid& g) const {
    if (u_initial)
        return ControlGrid::constant(g, *u_initial, u_lo, u_hi);
    return midpoint_control(g, u_lo, u_hi);
}

void apply_override(json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("override '" + assignment + "' must look like key.path=value");
    const std::string path = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded())
        value = text;

    json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
        if (key.empty())
            throw ConfigError("override '" + assignment + "' has an empty key segment");
        if (!node->is_object())
            throw ConfigError("override '" + path + "' descends into a non-object");
        if (dot == std::string::npos) {
            (*node)[key] = value;
            return;
        }
        node = &(*node)[key];
        if (node->is_null())
            *node = json::object();
        start = dot + 1;
    }
}

ScenarioConfig parse_scenario(const json& doc) {
    if (!doc.is_object())
        throw ConfigError("config root must be an object");
    ScenarioConfig cfg;

    const json& params = require(doc, "", "parameters");
    const auto table = rate_field_table<IntervalNumber>();
    for (const auto& [name, field] : table) {
        const std::string key(name);
        cfg.imprecise.*field = as_interval(require(params, "parameters", key), "parameters." + key);
    }

    if (doc.contains("k")) {
        cfg.k = as_number(doc.at("k"), "k");
        if (!(cfg.k >= 0.0 && cfg.k <= 1.0))
            throw ConfigError("key 'k' must lie in [0, 1]");
    }

    const json& x0 = require(doc, "", "initial_state");
    cfg.x0 = {as_number(require(x0, "initial_state", "S"), "initial_state.S"),
              as_number(require(x0, "initial_state", "I"), "initial_state.I"),
              as_number(require(x0, "initial_state", "C"), "initial_state.C"),
              as_number(require(x0, "initial_state", "A"), "initial_state.A")};
    if (!cfg.x0.is_valid())
        throw ConfigError("key 'initial_state' must have nonnegative components");

    const json& time = require(doc, "", "time");
    const double t_end = as_number(require(time, "time", "t_end"), "time.t_end");
    const std::size_t n_steps = as_count(require(time, "time", "n_steps"), "time.n_steps");
    try {
        cfg.grid = TimeGrid(t_end, n_steps);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("key 'time': ") + e.what());
    }

    const json& control = section(doc, "control");
    optional_number(control, "control", "u_lo", cfg.u_lo);
    optional_number(control, "control", "u_hi", cfg.u_hi);
    if (!(cfg.u_lo <= cfg.u_hi))
        throw ConfigError("key 'control' needs u_lo <= u_hi");
    if (control.contains("initial")) {
        cfg.u_initial = as_number(control.at("initial"), "control.initial");
        if (*cfg.u_initial < cfg.u_lo || *cfg.u_initial > cfg.u_hi)
            throw ConfigError("key 'control.initial' must lie in [u_lo, u_hi]");
    }

    const json& cost = section(doc, "cost");
    double w_I = 1.0, w_C = 0.5, w_A = 2.0, w_u = 1.0, w_T = 1.0;
    optional_number(cost, "cost", "w_I", w_I);
    optional_number(cost, "cost", "w_C", w_C);
    optional_number(cost, "cost", "w_A", w_A);
    optional_number(cost, "cost", "w_u", w_u);
    optional_number(cost, "cost", "w_T", w_T);
    try {
        cfg.weights = CostWeights(w_I, w_C, w_A, w_u, w_T);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("key 'cost': ") + e.what());
    }

    if (doc.contains("base_seed"))
        cfg.sweep.base_seed = as_seed(doc.at("base_seed"), "base_seed");
    if (doc.contains("threads"))
        cfg.threads = std::max<std::size_t>(1, as_count(doc.at("threads"), "threads"));
    if (doc.contains("output_dir")) {
        if (!doc.at("output_dir").is_string())
            throw ConfigError("key 'output_dir' must be a string");
        cfg.output_dir = doc.at("output_dir").get<std::string>();
    }

    const json& sweep = section(doc, "sweep");
    optional_number(sweep, "sweep", "rho", cfg.sweep.rho);
    optional_count(sweep, "sweep", "max_iters", cfg.sweep.max_iters);
    optional_number(sweep, "sweep", "tolerance", cfg.sweep.tolerance);
    optional_count(sweep, "sweep", "n_paths", cfg.sweep.n_paths);
    optional_count(sweep, "sweep", "n_starts", cfg.sweep.n_starts);
    optional_number(sweep, "sweep", "cell_tol", cfg.sweep.cell_tol);
    if (sweep.contains("adjoint_mode")) {
        const json& m = sweep.at("adjoint_mode");
        if (m == "certainty_equivalent")
            cfg.sweep.adjoint_mode = AdjointMode::CertaintyEquivalent;
        else if (m == "regression")
            cfg.sweep.adjoint_mode = AdjointMode::Regression;
        else
            throw ConfigError("key 'sweep.adjoint_mode' must be \"certainty_equivalent\" or \"regression\"");
    }
    try {
        cfg.sweep.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("key 'sweep': ") + e.what());
    }

    const json& sim = section(doc, "simulate");
    optional_count(sim, "simulate", "n_paths", cfg.simulate.n_paths);
    optional_number(sim, "simulate", "omega_tol_fraction", cfg.simulate.omega_tol_fraction);
    optional_number(sim, "simulate", "max_violation_fraction", cfg.simulate.max_violation_fraction);
    optional_count(sim, "simulate", "dump_paths", cfg.simulate.dump_paths);
    if (cfg.simulate.n_paths == 0)
        throw ConfigError("key 'simulate.n_paths' must be >= 1");

    const json& ver = section(doc, "verify");
    optional_count(ver, "verify", "random_checks", cfg.verify.random_checks);
    optional_count(ver, "verify", "n_paths", cfg.verify.n_paths);
    optional_number(ver, "verify", "omega_tol_fraction", cfg.verify.omega_tol_fraction);
    optional_number(ver, "verify", "max_violation_fraction", cfg.verify.max_violation_fraction);
    if (cfg.verify.n_paths == 0)
        throw ConfigError("key 'verify.n_paths' must be >= 1");

    const json& grad = section(doc, "gradcheck");
    optional_count(grad, "gradcheck", "n_cells", cfg.gradcheck.n_cells);
    optional_number(grad, "gradcheck", "fd_step", cfg.gradcheck.fd_step);
    optional_number(grad, "gradcheck", "rel_tol", cfg.gradcheck.rel_tol);
    optional_number(grad, "gradcheck", "abs_floor", cfg.gradcheck.abs_floor);
    if (cfg.gradcheck.n_cells == 0)
        throw ConfigError("key 'gradcheck.n_cells' must be >= 1");

    const json& lip = section(doc, "lipschitz");
    optional_number(lip, "lipschitz", "theta", cfg.lipschitz.theta);
    optional_number(lip, "lipschitz", "k", cfg.lipschitz.k);
    optional_count(lip, "lipschitz", "n_paths", cfg.lipschitz.n_paths);
    if (lip.contains("scales"))
        cfg.lipschitz.scales = as_number_list(lip.at("scales"), "lipschitz.scales");

    const json& ks = section(doc, "ksweep");
    cfg.k_grid = default_k_grid();
    if (ks.contains("ks")) {
        cfg.k_grid = as_number_list(ks.at("ks"), "ksweep.ks");
        for (double k : cfg.k_grid)
            if (!(k >= 0.0 && k <= 1.0))
                throw ConfigError("key 'ksweep.ks' entries must lie in [0, 1]");
    }
    return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path,
                             const std::vector<std::string>& overrides) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot read config file '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ":" + std::to_string(line_of(text, e.byte)) +
                          ": syntax error: " + e.what());
    }
    for (const auto& o : overrides)
        apply_override(doc, o);
    return parse_scenario(doc);
}

} // namespace sica::cli
