#include "dkg/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <ostream>
#include <random>
#include <sstream>

#include "dkg/clifford.hpp"
#include "dkg/normalform.hpp"
#include "dkg/propagators.hpp"
#include "dkg/scattering.hpp"
#include "dkg/snapshot_io.hpp"

namespace fs = std::filesystem;

namespace dkg {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail(ErrorCategory::IoError, "cannot create directory " + dir.string() + ": " + ec.message());
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream f(path);
    if (!f) fail(ErrorCategory::IoError, "cannot write " + path.string());
    return f;
}

// Prints the report and throws when the configuration is rejected.
ValidationReport require_valid(const RunConfig& cfg, std::ostream& out) {
    ValidationReport report = validate_config(cfg);
    if (!report.ok()) {
        out << report.to_json() << '\n';
        fail(ErrorCategory::ConfigError, report.errors.front().key + ": " + report.errors.front().message);
    }
    return report;
}

long total_steps(const RunConfig& cfg) { return std::llround(cfg.T_max / cfg.dt); }

}  // namespace

fs::path snapshot_path(const fs::path& dir, long step, const char* field) {
    char name[64];
    std::snprintf(name, sizeof name, "step_%07ld_%s.dkg", step, field);
    return dir / "snapshots" / name;
}

int cmd_run(const RunConfig& cfg, std::ostream& out) {
    const ValidationReport report = require_valid(cfg, out);
    for (const auto& w : report.warnings) out << "warning: " << w.key << ": " << w.message << '\n';

    const fs::path dir = cfg.output_dir;
    ensure_dir(dir / "snapshots");
    open_out(dir / "config.txt") << format_config(cfg);
    open_out(dir / "validation.json") << report.to_json() << '\n';
    auto diag = open_out(dir / "diagnostics.csv");
    diag << kDiagnosticsHeader << '\n';
    auto boundary = open_out(dir / "boundary.csv");
    boundary << "t,boundary_fraction_psi,boundary_fraction_phi\n";

    const CliffordRep rep = default_rep();
    const SimParams params = to_sim_params(cfg);
    const Grid grid(cfg.n, cfg.L);
    const DkgState init = initial_data_gaussian(cfg.eps, cfg.width, grid, rep, params);

    long step = 0;
    bool warned = false;
    RunOptions ro;
    ro.normal_form_diagnostics = cfg.normal_form_diagnostics;
    ro.keep_states = false;
    ro.observer = [&](const Snapshot& snap) {
        const DkgState& s = *snap.state;
        write_snapshot(snapshot_path(dir, step, "psi"), s.psi, s.t);
        write_snapshot(snapshot_path(dir, step, "phi"), s.phi, s.t);
        write_snapshot(snapshot_path(dir, step, "phit"), s.phi_t, s.t);
        diag << diagnostics_csv_row(snap.diagnostics) << '\n';
        const double bp = boundary_mass_fraction(s.psi), bf = boundary_mass_fraction(s.phi);
        boundary << num(s.t) << ',' << num(bp) << ',' << num(bf) << '\n';
        if (!warned && std::max(bp, bf) > kBoundaryMassThreshold) {
            out << "warning: boundary mass fraction " << std::max(bp, bf) << " exceeds " << kBoundaryMassThreshold
                << " at t = " << s.t << '\n';
            warned = true;
        }
        step += cfg.snapshot_stride;
    };
    const Trajectory traj = run(params, init, rep, ro);
    if (!diag || !boundary) fail(ErrorCategory::IoError, "write failure in " + dir.string());

    const auto& first = traj.snapshots().front().diagnostics;
    const auto& last = traj.snapshots().back().diagnostics;
    out << "snapshots " << traj.size() << " t_final " << last.t << '\n';
    out << "charge_drift_rel " << std::abs(last.charge - first.charge) / first.charge << '\n';
    out << "energy_drift " << std::abs(last.energy - first.energy) << '\n';
    out << "trajectory " << dir.string() << '\n';
    return 0;
}

Trajectory load_trajectory(const fs::path& dir, RunConfig* cfg_out) {
    const RunConfig cfg = load_config(dir / "config.txt");
    const SimParams params = to_sim_params(cfg);
    Trajectory traj(params, default_rep());
    const long steps = total_steps(cfg);
    double charge0 = 0.0;
    for (long step = 0; step <= steps; step += cfg.snapshot_stride) {
        auto psi = read_spinor_snapshot(snapshot_path(dir, step, "psi"));
        auto phi = read_scalar_snapshot(snapshot_path(dir, step, "phi"));
        auto phit = read_scalar_snapshot(snapshot_path(dir, step, "phit"));
        if (psi.field.grid().n() != cfg.n || psi.t != phi.t || psi.t != phit.t) {
            fail(ErrorCategory::IoError, "inconsistent snapshot files at step " + std::to_string(step));
        }
        DkgState s{std::move(psi.field), std::move(phi.field), std::move(phit.field), psi.t, 0.0};
        if (step == 0) charge0 = charge(s);
        s.initial_charge = charge0;
        Diagnostics d;
        d.t = s.t;
        try {
            traj.push({std::move(s), d});
        } catch (const std::invalid_argument& e) {
            fail(ErrorCategory::IoError, std::string("snapshot times do not match the configured stride: ") + e.what());
        }
    }
    if (cfg_out) *cfg_out = cfg;
    return traj;
}

int cmd_normalform_check(const RunConfig& cfg, std::ostream& out) {
    std::vector<MassTriple> triples{dirac_triple({cfg.M, cfg.m, cfg.g}), kg_triple({cfg.M, cfg.m, cfg.g})};
    for (double a : cfg.nf_masses)
        for (double b : cfg.nf_masses)
            for (double c : cfg.nf_masses) triples.push_back({a, b, c});

    std::ostringstream table;
    table << "mj,mk,ml,det_direct,det_product,p,p_tilde,zero_mode_residual,status\n";
    for (const auto& t : triples) {
        table << num(t.mj) << ',' << num(t.mk) << ',' << num(t.ml) << ',' << num(det_direct(t)) << ','
              << num(det_product(t)) << ',';
        try {
            const auto c = nf_coeffs(t);
            table << num(c.p) << ',' << num(c.p_tilde) << ',' << num(nf_residual_check(t)) << ",ok\n";
        } catch (const DkgError& e) {
            if (e.category() != ErrorCategory::ResonantMass) throw;
            table << "ResonantMass,ResonantMass,ResonantMass,ResonantMass\n";
        }
    }
    out << table.str();
    ensure_dir(cfg.output_dir);
    open_out(fs::path(cfg.output_dir) / "normalform_check.csv") << table.str();
    return 0;
}

namespace {

nlohmann::json tail_json(const TailReport& t) {
    return {{"t_first", t.t_first},       {"defect_first", t.defect_first}, {"t_last", t.t_last},
            {"defect_last", t.defect_last}, {"decay_slope", t.decay_slope},   {"delta_fit", t.delta_fit},
            {"tail_bound", t.tail_bound},   {"converged", t.converged}};
}

nlohmann::json optional_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }

}  // namespace

int cmd_scatter(const RunConfig& cfg, const fs::path& trajectory_dir, std::ostream& out) {
    require_valid(cfg, out);
    const Trajectory traj = load_trajectory(trajectory_dir);
    const Couplings c = traj.params().couplings;
    const CliffordRep& rep = traj.rep();
    const ScatterResult r = scatter(traj, c, rep, cfg.sigma, to_extract_options(cfg), cfg.fit_start_fraction);

    const fs::path dir = fs::path(cfg.output_dir) / "scatter";
    ensure_dir(dir);
    write_snapshot(dir / "psi0_plus.dkg", r.psi0_plus, 0.0);
    write_snapshot(dir / "phi0_plus.dkg", r.phi0_plus, 0.0);
    write_snapshot(dir / "phi1_plus.dkg", r.phi1_plus, 0.0);
    write_snapshot(dir / "psi0_plus_endpoint.dkg", r.dirac.psi0_plus_endpoint, 0.0);

    auto curve = open_out(dir / "curve.csv");
    curve << "t,dirac_diff,kg_diff\n";
    for (const auto& p : r.convergence_curve) curve << num(p.t) << ',' << num(p.dirac) << ',' << num(p.kg) << '\n';

    // Slopes at every reported Sobolev index, recorded as data.
    nlohmann::json by_sigma = nlohmann::json::object();
    for (int s = 0; s <= cfg.sobolev_sigma_max; ++s) {
        const auto cs = s == r.sigma ? r.convergence_curve
                                     : convergence_curve(traj, r.psi0_plus, r.phi0_plus, r.phi1_plus, c, rep, s);
        std::vector<double> t, yd, yk;
        for (const auto& p : cs) {
            t.push_back(p.t);
            yd.push_back(p.dirac);
            yk.push_back(p.kg);
        }
        by_sigma[std::to_string(s)] = {{"dirac", fit_loglog_slope(t, yd, r.fit_start, r.fit_end)},
                                       {"kg", fit_loglog_slope(t, yk, r.fit_start, r.fit_end)}};
    }

    nlohmann::json residuals = nlohmann::json::array();
    double worst = 0.0;
    for (int i = 0; i < 5; ++i) {
        const double ts = r.fit_end * i / 4.0;
        const double res = free_dirac_residual(r.psi0_plus, c.M, rep, ts);
        worst = std::max(worst, res);
        residuals.push_back({{"t", ts}, {"residual", res}});
    }

    const nlohmann::json meta{
        {"sigma", r.sigma},
        {"fit_window", {r.fit_start, r.fit_end}},
        {"fitted_slopes", {{"dirac", r.fitted_slopes.first}, {"kg", r.fitted_slopes.second}}},
        {"slopes_by_sigma", by_sigma},
        {"dirac",
         {{"tail", tail_json(r.dirac.tail)},
          {"route_discrepancy", r.dirac.route_discrepancy},
          {"stride_sensitivity", optional_json(r.dirac.stride_sensitivity)},
          {"max_duhamel_residual", r.dirac.max_duhamel_residual}}},
        {"kg",
         {{"tail", tail_json(r.kg.tail)},
          {"route_discrepancy", r.kg.route_discrepancy},
          {"stride_sensitivity", optional_json(r.kg.stride_sensitivity)}}},
        {"free_dirac_residual", residuals},
        {"kg_componentwise_control", kg_componentwise_dirac_residual(r.psi0_plus, c.M, rep, r.fit_end / 2.0)},
    };
    open_out(dir / "metadata.json") << meta.dump(2) << '\n';

    out << "dirac_slope " << r.fitted_slopes.first << '\n';
    out << "kg_slope " << r.fitted_slopes.second << '\n';
    out << "fit_window " << r.fit_start << ' ' << r.fit_end << '\n';
    out << "dirac_route_discrepancy " << r.dirac.route_discrepancy << " tail_bound " << r.dirac.tail.tail_bound << '\n';
    out << "kg_route_discrepancy " << r.kg.route_discrepancy << " tail_bound " << r.kg.tail.tail_bound << '\n';
    out << "free_dirac_residual_max " << worst << '\n';
    out << "output " << dir.string() << '\n';
    return 0;
}

int cmd_resonance_sweep(const RunConfig& cfg, std::ostream& out) {
    require_valid(cfg, out);
    SweepOptions opts;
    opts.simulate = cfg.sweep_simulate;
    opts.scenario = to_scenario(cfg);
    opts.extract = to_extract_options(cfg);
    opts.sigma = cfg.sigma;
    opts.workers = cfg.workers;
    const auto rows = resonance_sweep(cfg.sweep_m, cfg.M, opts, default_rep());

    std::ostringstream table;
    table << kSweepHeader << '\n';
    for (const auto& r : rows) table << sweep_csv_row(r) << '\n';
    out << table.str();
    ensure_dir(cfg.output_dir);
    open_out(fs::path(cfg.output_dir) / "resonance_sweep.csv") << table.str();
    return 0;
}

namespace {

/// Smooth random spinor: Fourier coefficients with Gaussian decay in |k|.
SpinorField random_spinor(const Grid& g, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    SpinorField f(g);
    for (int c = 0; c < 2; ++c) {
        std::vector<cplx> spec(g.points());
        for (int i1 = 0; i1 < g.n(); ++i1)
            for (int i2 = 0; i2 < g.n(); ++i2) {
                const double k1 = g.wavenumber(i1), k2 = g.wavenumber(i2);
                const double damp = std::exp(-(k1 * k1 + k2 * k2));
                spec[g.index(i1, i2)] = damp * cplx(gauss(rng), gauss(rng));
            }
        assign_from_spectrum(f, c, std::move(spec));
    }
    return f;
}

struct Check {
    std::ostream& out;
    int failures = 0;

    void operator()(const char* name, double value, double limit) {
        const bool ok = std::isfinite(value) && value <= limit;
        if (!ok) ++failures;
        out << (ok ? "ok   " : "FAIL ") << std::left << std::setw(34) << name << " " << std::scientific
            << std::setprecision(3) << value << " <= " << limit << std::defaultfloat << '\n';
    }
};

}  // namespace

int cmd_selftest(std::uint64_t seed, std::ostream& out) {
    Check check{out};
    std::mt19937_64 rng(seed);
    const CliffordRep rep = default_rep();

    check("clifford invariants", rep.invariant_residual(), 1e-13);
    double squaring = 0.0;
    for (int a = -8; a <= 8; ++a)
        for (int b = -8; b <= 8; ++b) squaring = std::max(squaring, squaring_residual(rep, 1.0, {0.5 * a, 0.5 * b}));
    check("squaring residual, 17x17 lattice", squaring, 1e-13);

    const Grid grid(64, 40.0);
    const SpinorField f = random_spinor(grid, rng);
    {
        double spec_sum = 0.0;
        for (int c = 0; c < 2; ++c)
            for (const auto& z : spectrum(f, c)) spec_sum += std::norm(z);
        const double parseval = std::sqrt(spec_sum * grid.cell_weight() / static_cast<double>(grid.points()));
        check("Parseval", std::abs(parseval - l2_norm(f)) / l2_norm(f), 1e-12);
    }
    {
        const SpinorField u = dirac_propagate(f, 1.0, 3.7, rep);
        check("Dirac unitarity", std::abs(l2_norm(u) - l2_norm(f)) / l2_norm(f), 1e-12);
        const SpinorField uu = dirac_propagate(dirac_propagate(f, 1.0, 1.3, rep), 1.0, 2.4, rep);
        check("Dirac group property", l2_norm(uu - u) / l2_norm(f), 1e-12);
        check("free Dirac residual, t = 37.5", free_dirac_residual(f, 1.0, rep, 37.5), 1e-10);
    }
    {
        std::uniform_real_distribution<double> mass(0.1, 10.0);
        double worst = 0.0;
        for (int i = 0; i < 200; ++i) {
            const MassTriple t{mass(rng), mass(rng), mass(rng)};
            try {
                worst = std::max(worst, nf_residual_check(t));
            } catch (const DkgError&) {
                // Random draws landing on the resonance are skipped.
            }
        }
        check("zero-mode residual, 200 triples", worst, 1e-10);
        const auto c = nf_coeffs({3.0, 1.0, 1.0});
        check("coefficients (3,1,1)", std::max(std::abs(c.p - 7.0 / 45.0), std::abs(c.p_tilde + 2.0 / 45.0)), 1e-15);
    }
    {
        // Self-convergence of the coupled scheme: error ratio between
        // successive dt halvings approaches 4.
        SimParams p;
        p.T_max = 1.0;
        p.snapshot_stride = 1;
        const Grid g(128, 80.0);
        const DkgState init = initial_data_gaussian(0.5, 2.5, g, rep, p);
        auto final_state = [&](double dt) {
            DkgState s = init;
            const StrangStepper stepper(g, p.couplings, dt, rep);
            for (long k = 0; k < std::llround(p.T_max / dt); ++k) stepper.step(s);
            return s;
        };
        const DkgState a = final_state(0.04), b = final_state(0.02), c = final_state(0.01);
        const double e1 = l2_norm(a.psi - b.psi), e2 = l2_norm(b.psi - c.psi);
        check("dt-convergence |ratio - 4|", std::abs(e1 / e2 - 4.0), 0.5);
    }
    {
        const fs::path tmp = fs::temp_directory_path() / ("dkg_selftest_" + std::to_string(seed) + ".dkg");
        write_snapshot(tmp, f, 1.25);
        const auto back = read_spinor_snapshot(tmp);
        fs::remove(tmp);
        check("snapshot round trip", l2_norm(back.field - f) + std::abs(back.t - 1.25), 0.0);
    }

    out << (check.failures == 0 ? "selftest passed" : "selftest FAILED") << '\n';
    return check.failures == 0 ? 0 : 1;
}

int exit_code(ErrorCategory c) {
    switch (c) {
        case ErrorCategory::ConfigError: return 2;
        case ErrorCategory::ResonantMass: return 3;
        case ErrorCategory::TailNotConverged: return 4;
        case ErrorCategory::BlowupDetected: return 5;
        case ErrorCategory::IoError: return 6;
    }
    return 1;
}

int guarded(const std::function<int()>& body, std::ostream& err) {
    try {
        return body();
    } catch (const DkgError& e) {
        err << to_string(e.category()) << ": " << e.what() << '\n';
        return exit_code(e.category());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace dkg
