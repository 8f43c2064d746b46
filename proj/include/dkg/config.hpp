#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dkg/scattering.hpp"
#include "dkg/solver.hpp"

namespace dkg {

/// Everything a subcommand needs. Files hold one `key = value` per line; `#`
/// starts a comment; lists are comma separated. See config_keys() for the
/// full key set.
struct RunConfig {
    int n = 128;
    double L = 80.0;
    double M = 1.0;
    double m = 1.0;
    double g = 1.0;
    double eps = 1e-2;
    double width = 5.0;
    double dt = 0.01;
    double T_max = 60.0;
    int snapshot_stride = 10;
    int sobolev_sigma_max = 2;
    std::uint64_t seed = 20240611;

    std::string output_dir = "dkg_out";
    bool normal_form_diagnostics = true;

    int sigma = 1;
    double transient = 5.0;
    double tail_ratio = 0.05;
    double fit_start_fraction = kFitWindowStartFraction;

    std::vector<double> sweep_m{1.8, 1.9, 1.95, 1.99, 2.0};
    bool sweep_simulate = false;
    int workers = 1;

    std::vector<double> nf_masses{0.5, 1.0, 2.0, 3.0};
};

struct ConfigKey {
    const char* name;
    const char* help;
};

/// Every recognised key with a one-line description, in file order.
const std::vector<ConfigKey>& config_keys();

/// Throws DkgError(ConfigError) on an unknown key or an unparsable value.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);
std::string get_config_value(const RunConfig& cfg, const std::string& key);

/// `source` names the input in error messages.
RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
/// Throws DkgError(IoError) when the file cannot be read.
RunConfig load_config(const std::filesystem::path& path);
/// Round-trips through parse_config exactly.
std::string format_config(const RunConfig& cfg);

struct ConfigIssue {
    std::string key;
    std::string message;
};

struct ValidationReport {
    std::vector<ConfigIssue> errors;
    std::vector<ConfigIssue> warnings;
    bool ok() const { return errors.empty(); }
    /// {"status": "accepted"|"rejected", "errors": [...], "warnings": [...]}
    std::string to_json() const;
};

/// Hard errors: grid, positivity, dt cap, width and the L/4 seam margin at t = 0.
/// Warning: the light cone of the initial support reaching the seam before
/// T_max (L < 2 (r + T_max)); the run then relies on the boundary-mass monitor.
ValidationReport validate_config(const RunConfig& cfg);

SimParams to_sim_params(const RunConfig& cfg);
Scenario to_scenario(const RunConfig& cfg);
ExtractOptions to_extract_options(const RunConfig& cfg);

}  // namespace dkg
