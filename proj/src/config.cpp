#include "dkg/config.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <sstream>

#include "dkg/error.hpp"

namespace dkg {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* expected) {
    fail(ErrorCategory::ConfigError, "key '" + key + "': cannot parse '" + value + "' as " + expected);
}

double parse_double(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    char* end = nullptr;
    errno = 0;
    const double d = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE || !std::isfinite(d)) {
        bad_value(key, value, "a finite number");
    }
    return d;
}

template <class I>
I parse_integer(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    I out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, value, "an integer");
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    bad_value(key, value, "a boolean");
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (trim(item).empty()) continue;
        out.push_back(parse_double(key, item));
    }
    return out;
}

std::string format_list(const std::vector<double>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += format_double(v[i]);
    }
    return s;
}

struct KeyHandler {
    ConfigKey key;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

template <class T>
KeyHandler number_key(const char* name, const char* help, T RunConfig::*member) {
    KeyHandler h{{name, help}, nullptr, nullptr};
    h.set = [member, name](RunConfig& c, const std::string& v) {
        if constexpr (std::is_floating_point_v<T>) {
            c.*member = parse_double(name, v);
        } else {
            c.*member = parse_integer<T>(name, v);
        }
    };
    h.get = [member](const RunConfig& c) {
        if constexpr (std::is_floating_point_v<T>) {
            return format_double(c.*member);
        } else {
            return std::to_string(c.*member);
        }
    };
    return h;
}

KeyHandler bool_key(const char* name, const char* help, bool RunConfig::*member) {
    return {{name, help},
            [member, name](RunConfig& c, const std::string& v) { c.*member = parse_bool(name, v); },
            [member](const RunConfig& c) { return std::string(c.*member ? "true" : "false"); }};
}

KeyHandler list_key(const char* name, const char* help, std::vector<double> RunConfig::*member) {
    return {{name, help},
            [member, name](RunConfig& c, const std::string& v) { c.*member = parse_list(name, v); },
            [member](const RunConfig& c) { return format_list(c.*member); }};
}

const std::vector<KeyHandler>& handlers() {
    static const std::vector<KeyHandler> table{
        number_key("n", "grid points per axis (power of two, >= 16)", &RunConfig::n),
        number_key("L", "box side length; the box is [-L/2, L/2)^2", &RunConfig::L),
        number_key("M", "Dirac mass", &RunConfig::M),
        number_key("m", "Klein-Gordon mass", &RunConfig::m),
        number_key("g", "coupling constant", &RunConfig::g),
        number_key("eps", "amplitude of the Gaussian initial data", &RunConfig::eps),
        number_key("width", "Gaussian width in length units (>= 4 cells)", &RunConfig::width),
        number_key("dt", "time step, at most 0.1", &RunConfig::dt),
        number_key("T_max", "final time", &RunConfig::T_max),
        number_key("snapshot_stride", "steps between stored snapshots", &RunConfig::snapshot_stride),
        number_key("sobolev_sigma_max", "largest Sobolev index reported by scatter (0..3)",
                   &RunConfig::sobolev_sigma_max),
        number_key("seed", "RNG seed for the random-field self-tests", &RunConfig::seed),
        {{"output_dir", "directory for trajectories, tables and scatter output"},
         [](RunConfig& c, const std::string& v) { c.output_dir = trim(v); },
         [](const RunConfig& c) { return c.output_dir; }},
        bool_key("normal_form_diagnostics", "compute defect norms during run", &RunConfig::normal_form_diagnostics),
        number_key("sigma", "Sobolev index of the scatter convergence curve", &RunConfig::sigma),
        number_key("transient", "start of the defect-tail window", &RunConfig::transient),
        number_key("tail_ratio", "required defect decay over the tail window", &RunConfig::tail_ratio),
        number_key("fit_start_fraction", "slope window is [fraction * T_max, T_max]",
                   &RunConfig::fit_start_fraction),
        list_key("sweep_m", "Klein-Gordon masses for resonance-sweep", &RunConfig::sweep_m),
        bool_key("sweep_simulate", "resonance-sweep also runs and scatters each row", &RunConfig::sweep_simulate),
        number_key("workers", "worker threads for resonance-sweep rows", &RunConfig::workers),
        list_key("nf_masses", "mass grid for normalform-check (all triples)", &RunConfig::nf_masses),
    };
    return table;
}

const KeyHandler& handler(const std::string& key) {
    const auto& table = handlers();
    const auto it = std::find_if(table.begin(), table.end(), [&](const KeyHandler& h) { return key == h.key.name; });
    if (it == table.end()) fail(ErrorCategory::ConfigError, "unknown key '" + key + "'");
    return *it;
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
    static const std::vector<ConfigKey> keys = [] {
        std::vector<ConfigKey> k;
        for (const auto& h : handlers()) k.push_back(h.key);
        return k;
    }();
    return keys;
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
    handler(key).set(cfg, value);
}

std::string get_config_value(const RunConfig& cfg, const std::string& key) { return handler(key).get(cfg); }

RunConfig parse_config(const std::string& text, const std::string& source) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            fail(ErrorCategory::ConfigError, source + ":" + std::to_string(lineno) + ": expected key = value");
        }
        try {
            set_config_value(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const DkgError& e) {
            fail(e.category(), source + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCategory::IoError, "cannot open config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.string());
}

std::string format_config(const RunConfig& cfg) {
    std::string out;
    for (const auto& h : handlers()) {
        out += h.key.name;
        out += " = ";
        out += h.get(cfg);
        out += '\n';
    }
    return out;
}

std::string ValidationReport::to_json() const {
    auto issues = [](const std::vector<ConfigIssue>& v) {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& i : v) a.push_back({{"key", i.key}, {"message", i.message}});
        return a;
    };
    const nlohmann::json j{{"status", ok() ? "accepted" : "rejected"},
                           {"errors", issues(errors)},
                           {"warnings", issues(warnings)}};
    return j.dump();
}

ValidationReport validate_config(const RunConfig& c) {
    ValidationReport r;
    auto error = [&](const char* key, const std::string& msg) { r.errors.push_back({key, msg}); };

    const bool n_ok = c.n >= 16 && (c.n & (c.n - 1)) == 0;
    if (!n_ok) error("n", "must be a power of two >= 16");
    if (!(c.L > 0.0)) error("L", "must be positive");
    if (!(c.M > 0.0)) error("M", "must be positive");
    if (!(c.m > 0.0)) error("m", "must be positive");
    if (!(c.eps >= 0.0)) error("eps", "must be non-negative");
    if (!(c.dt > 0.0) || c.dt > kMaxTimeStep) error("dt", "must lie in (0, 0.1]");
    if (!(c.T_max > 0.0)) error("T_max", "must be positive");
    if (c.snapshot_stride < 1) error("snapshot_stride", "must be >= 1");
    if (c.sobolev_sigma_max < 0 || c.sobolev_sigma_max > 3) error("sobolev_sigma_max", "must lie in 0..3");
    if (c.sigma < 0 || c.sigma > c.sobolev_sigma_max) error("sigma", "must lie in 0..sobolev_sigma_max");
    if (!(c.tail_ratio > 0.0 && c.tail_ratio < 1.0)) error("tail_ratio", "must lie in (0, 1)");
    if (!(c.fit_start_fraction >= 0.0 && c.fit_start_fraction < 1.0)) {
        error("fit_start_fraction", "must lie in [0, 1)");
    }
    if (!(c.transient >= 0.0) || c.transient >= c.T_max) error("transient", "must lie in [0, T_max)");
    if (c.workers < 1) error("workers", "must be >= 1");
    if (c.output_dir.empty()) error("output_dir", "must not be empty");
    for (double v : c.sweep_m)
        if (!(v > 0.0)) error("sweep_m", "masses must be positive");
    for (double v : c.nf_masses)
        if (!(v > 0.0)) error("nf_masses", "masses must be positive");

    if (c.L > 0.0 && n_ok) {
        const double dx = c.L / c.n;
        const double radius = gaussian_support_radius(c.width);
        if (!(c.width >= 4.0 * dx)) error("width", "must be at least four cells (" + format_double(4 * dx) + ")");
        if (radius > c.L / 4.0) {
            error("width", "initial support radius " + format_double(radius) + " exceeds L/4 = " +
                               format_double(c.L / 4.0));
        }
        if (c.T_max > 0.0 && c.L < 2.0 * (radius + c.T_max)) {
            r.warnings.push_back({"L", "light cone of the initial support reaches the seam before T_max (needs L >= " +
                                           format_double(2.0 * (radius + c.T_max)) +
                                           "); relying on the boundary-mass monitor"});
        }
    }
    return r;
}

SimParams to_sim_params(const RunConfig& c) {
    SimParams p;
    p.couplings = {c.M, c.m, c.g};
    p.dt = c.dt;
    p.T_max = c.T_max;
    p.snapshot_stride = c.snapshot_stride;
    return p;
}

Scenario to_scenario(const RunConfig& c) { return {c.n, c.L, c.eps, c.width, to_sim_params(c)}; }

ExtractOptions to_extract_options(const RunConfig& c) { return {c.transient, c.tail_ratio, true}; }

}  // namespace dkg
