// Command-line front end: one binary, one subcommand per task.
#include <CLI11.hpp>
#include <iostream>
#include <map>
#include <string>

#include "dkg/commands.hpp"
#include "dkg/config.hpp"

namespace {

bool is_list_key(const std::string& key) { return key == "sweep_m" || key == "nf_masses"; }

std::string keys_footer() {
    std::string s = "Config keys (file: key = value, '#' comments, lists comma separated):\n";
    for (const auto& k : dkg::config_keys()) {
        const std::string name = k.name;
        s += "  " + name + std::string(name.size() < 26 ? 26 - name.size() : 1, ' ');
        s += k.help;
        if (is_list_key(k.name)) s += " (file only)";
        s += '\n';
    }
    return s;
}

struct CommonOptions {
    std::string config_path;
    std::map<std::string, std::string> overrides;
};

// Config file first, then each scalar flag that was given.
void add_common(CLI::App* sub, CommonOptions& opts) {
    sub->add_option("-c,--config", opts.config_path, "key = value configuration file");
    for (const auto& k : dkg::config_keys()) {
        if (is_list_key(k.name)) continue;
        const std::string key = k.name;
        sub->add_option_function<std::string>(
               "--" + key, [&opts, key](const std::string& v) { opts.overrides[key] = v; }, k.help)
            ->type_name("VALUE");
    }
}

dkg::RunConfig resolve(const CommonOptions& opts, const std::string& base_path = "") {
    dkg::RunConfig cfg;
    if (!base_path.empty()) cfg = dkg::load_config(base_path);
    if (!opts.config_path.empty()) cfg = dkg::load_config(opts.config_path);
    for (const auto& [k, v] : opts.overrides) dkg::set_config_value(cfg, k, v);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dirac-Klein-Gordon simulation, normal-form and scattering toolkit"};
    app.footer(keys_footer());
    app.require_subcommand(1);

    CommonOptions run_opts, nf_opts, scatter_opts, sweep_opts;
    auto* run = app.add_subcommand("run", "integrate from Gaussian data and write a trajectory directory");
    add_common(run, run_opts);

    auto* nf = app.add_subcommand("normalform-check", "normal-form coefficient and zero-mode residual table");
    add_common(nf, nf_opts);

    auto* scatter = app.add_subcommand("scatter", "extract scattering states from a trajectory directory");
    std::string trajectory;
    scatter->add_option("trajectory", trajectory, "directory written by run")->required();
    add_common(scatter, scatter_opts);

    auto* sweep = app.add_subcommand("resonance-sweep", "coefficients (and optionally slopes) across m");
    add_common(sweep, sweep_opts);

    auto* selftest = app.add_subcommand("selftest", "invariant suite: Clifford, Parseval, unitarity, residuals, dt");
    std::uint64_t seed = dkg::RunConfig{}.seed;
    selftest->add_option("--seed", seed, "RNG seed for random fields");

    CLI11_PARSE(app, argc, argv);

    return dkg::guarded(
        [&]() -> int {
            if (*run) return dkg::cmd_run(resolve(run_opts), std::cout);
            if (*nf) return dkg::cmd_normalform_check(resolve(nf_opts), std::cout);
            if (*scatter) {
                // The trajectory's own config is the base; the scatter output
                // goes next to the snapshots unless output_dir is overridden.
                return dkg::cmd_scatter(resolve(scatter_opts, trajectory + "/config.txt"), trajectory, std::cout);
            }
            if (*sweep) return dkg::cmd_resonance_sweep(resolve(sweep_opts), std::cout);
            return dkg::cmd_selftest(seed, std::cout);
        },
        std::cerr);
}
