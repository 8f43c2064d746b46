#include "dkg/solver.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "dkg/error.hpp"
#include "dkg/normalform.hpp"

namespace dkg {

void validate(const SimParams& p) {
    const auto& c = p.couplings;
    if (!(c.M > 0.0) || !(c.m > 0.0)) fail(ErrorCategory::ConfigError, "masses M and m must be positive");
    if (!std::isfinite(c.g)) fail(ErrorCategory::ConfigError, "coupling g must be finite");
    if (!(p.dt > 0.0) || p.dt > kMaxTimeStep) fail(ErrorCategory::ConfigError, "dt must lie in (0, 0.1]");
    if (!(p.T_max > 0.0)) fail(ErrorCategory::ConfigError, "T_max must be positive");
    if (p.snapshot_stride < 1) fail(ErrorCategory::ConfigError, "snapshot_stride must be >= 1");
}

double gaussian_support_radius(double width) { return width * std::sqrt(std::log(1e4)); }

DkgState initial_data_gaussian(double eps, double width, const Grid& grid, const CliffordRep& /*rep*/,
                               const SimParams& params) {
    validate(params);
    if (!(width >= 4.0 * grid.dx())) fail(ErrorCategory::ConfigError, "Gaussian width must be at least four cells");
    if (!(eps >= 0.0)) fail(ErrorCategory::ConfigError, "amplitude eps must be non-negative");
    if (gaussian_support_radius(width) > grid.length() / 4.0) {
        fail(ErrorCategory::ConfigError, "initial support reaches within L/4 of the periodic seam");
    }
    const int n = grid.n();
    DkgState s{SpinorField(grid), ScalarField(grid), ScalarField(grid), 0.0, 0.0};
    for (int i1 = 0; i1 < n; ++i1)
        for (int i2 = 0; i2 < n; ++i2) {
            const double x1 = grid.coordinate(i1), x2 = grid.coordinate(i2);
            const double v = eps * std::exp(-(x1 * x1 + x2 * x2) / (width * width));
            const size_t k = grid.index(i1, i2);
            s.psi.at(0, k) = v;
            s.phi.at(0, k) = v;
        }
    s.initial_charge = charge(s);
    return s;
}

namespace {

/// exp(i theta beta) = cos(theta) I + i sin(theta) beta, valid since beta^2 = I.
inline std::array<cplx, 2> rotate(const Mat2& beta, double theta, cplx u, cplx l) {
    const double c = std::cos(theta), s = std::sin(theta);
    const auto b = beta.apply(u, l);
    return {c * u + cplx(0.0, s) * b[0], c * l + cplx(0.0, s) * b[1]};
}

inline double beta_density(const Mat2& beta, cplx u, cplx l) {
    const auto b = beta.apply(u, l);
    return (std::conj(u) * b[0] + std::conj(l) * b[1]).real();
}

// <psi, beta psi> is invariant along this flow, so the phi_t update may use
// the pre-step spinor.
void apply_nonlinear_flow(DkgState& s, double h, double g, const Mat2& beta) {
    for (size_t k = 0; k < s.psi.plane_size(); ++k) {
        const cplx u = s.psi.at(0, k), l = s.psi.at(1, k);
        s.phi_t.at(0, k) += h * g * beta_density(beta, u, l);
        const auto r = rotate(beta, g * s.phi.at(0, k) * h, u, l);
        s.psi.at(0, k) = r[0];
        s.psi.at(1, k) = r[1];
    }
}

}  // namespace

DkgState nonlinear_substep(const DkgState& s, double dt, const Couplings& c, const CliffordRep& rep) {
    DkgState out = s;
    apply_nonlinear_flow(out, dt, c.g, rep.beta());
    return out;
}

double charge(const DkgState& s) {
    const double n = l2_norm(s.psi);
    return n * n;
}

double energy(const DkgState& s, const Couplings& c, const CliffordRep& rep) {
    // Re <psi, (-i alpha.grad + M beta) psi> = Re <psi, -i (alpha.grad + i M beta) psi>.
    const SpinorField a_psi = dirac_spatial_operator(s.psi, c.M, rep);
    const Mat2& beta = rep.beta();
    double acc = 0.0;
    for (size_t k = 0; k < s.psi.plane_size(); ++k) {
        const cplx u = s.psi.at(0, k), l = s.psi.at(1, k);
        const cplx h = std::conj(u) * a_psi.at(0, k) + std::conj(l) * a_psi.at(1, k);
        acc += (cplx(0.0, -1.0) * h).real() - c.g * s.phi.at(0, k) * beta_density(beta, u, l);
    }
    return acc * s.grid().cell_weight() + kg_free_energy(s.phi, s.phi_t, c.m);
}

StrangStepper::StrangStepper(const Grid& grid, const Couplings& c, double dt, const CliffordRep& rep)
    : grid_(grid), couplings_(c), dt_(dt), rep_(rep), dirac_(grid, c.M, dt, rep), kg_(grid, c.m, dt) {}

void StrangStepper::nonlinear(DkgState& s, double h) const { apply_nonlinear_flow(s, h, couplings_.g, rep_.beta()); }

namespace {

void zero_aliased(const Grid& g, std::vector<cplx>& spec) {
    const int n = g.n();
    for (int i1 = 0; i1 < n; ++i1)
        for (int i2 = 0; i2 < n; ++i2)
            if (!dealias_keeps(g, i1, i2)) spec[g.index(i1, i2)] = cplx{};
}

double check_blowup(const DkgState& s) {
    const double sup = std::max(sup_norm(s.psi), std::max(sup_norm(s.phi), sup_norm(s.phi_t)));
    if (!(sup <= kBlowupThreshold)) {
        std::ostringstream os;
        os << "sup-norm " << sup << " exceeds " << kBlowupThreshold << " at t = " << s.t;
        fail(ErrorCategory::BlowupDetected, os.str());
    }
    return sup;
}

}  // namespace

void StrangStepper::dealias_in_place(DkgState& s) const {
    for (int c = 0; c < 2; ++c) {
        auto spec = spectrum(s.psi, c);
        zero_aliased(grid_, spec);
        assign_from_spectrum(s.psi, c, std::move(spec));
    }
    auto spec = spectrum(s.phi_t, 0);
    zero_aliased(grid_, spec);
    assign_from_spectrum(s.phi_t, 0, std::move(spec));
}

void StrangStepper::step(DkgState& s) const {
    nonlinear(s, 0.5 * dt_);

    // Dealias and apply the exact linear flow on the same spectra.
    auto u = spectrum(s.psi, 0);
    auto l = spectrum(s.psi, 1);
    auto ph = spectrum(s.phi, 0);
    auto pt = spectrum(s.phi_t, 0);
    zero_aliased(grid_, u);
    zero_aliased(grid_, l);
    zero_aliased(grid_, pt);
    dirac_.apply(u, l);
    kg_.apply(ph, pt);
    assign_from_spectrum(s.psi, 0, std::move(u));
    assign_from_spectrum(s.psi, 1, std::move(l));
    assign_from_spectrum(s.phi, 0, std::move(ph));
    assign_from_spectrum(s.phi_t, 0, std::move(pt));

    nonlinear(s, 0.5 * dt_);
    dealias_in_place(s);
    s.t += dt_;
    check_blowup(s);
}

DkgState strang_step(const DkgState& s, const SimParams& params, const CliffordRep& rep) {
    StrangStepper stepper(s.grid(), params.couplings, params.dt, rep);
    DkgState out = s;
    stepper.step(out);
    return out;
}

Diagnostics compute_diagnostics(const DkgState& s, const Couplings& c, const CliffordRep& rep, bool normal_form) {
    Diagnostics d;
    d.t = s.t;
    d.charge = charge(s);
    d.energy = energy(s, c, rep);
    for (int sigma = 0; sigma < 3; ++sigma) {
        d.h_psi[static_cast<size_t>(sigma)] = sobolev_norm(s.psi, sigma);
        d.h_phi[static_cast<size_t>(sigma)] = sobolev_norm(s.phi, sigma);
    }
    const double weight = std::sqrt(1.0 + s.t * s.t);
    d.sup_psi_weighted = weight * sup_norm(s.psi);
    d.sup_phi_weighted = weight * sup_norm(s.phi);
    if (normal_form) {
        const auto nf = normal_form_fields(s, c, rep);
        d.defect_l2_dirac = l2_norm(nf.dirac_defect);
        d.defect_l2_kg = l2_norm(nf.kg_defect);
        d.nonlinearity_l2_dirac = l2_norm(nf.dirac_nonlinearity);
        d.nonlinearity_l2_kg = l2_norm(nf.kg_nonlinearity);
    }
    return d;
}

std::string diagnostics_csv_row(const Diagnostics& d) {
    std::string row;
    char buf[40];
    auto add = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        if (!row.empty()) row += ',';
        row += buf;
    };
    add(d.t);
    add(d.charge);
    add(d.energy);
    for (double v : d.h_psi) add(v);
    for (double v : d.h_phi) add(v);
    add(d.sup_psi_weighted);
    add(d.sup_phi_weighted);
    for (const auto& v : {d.defect_l2_dirac, d.defect_l2_kg}) {
        if (v) {
            add(*v);
        } else {
            row += ',';
        }
    }
    return row;
}

const DkgState& Trajectory::state(size_t i) const {
    const auto& st = snapshots_.at(i).state;
    if (!st) throw std::logic_error("Trajectory::state: states were not kept for this run");
    return *st;
}

void Trajectory::push(Snapshot s) {
    if (!snapshots_.empty()) {
        const double prev = snapshots_.back().diagnostics.t;
        const double gap = s.diagnostics.t - prev;
        if (!(gap > 0.0) || std::abs(gap - spacing()) > 1e-9 * std::max(1.0, std::abs(s.diagnostics.t))) {
            throw std::invalid_argument("Trajectory::push: snapshot times must advance by the stride");
        }
    }
    snapshots_.push_back(std::move(s));
}

Trajectory run(const SimParams& params, const DkgState& initial, const CliffordRep& rep, const RunOptions& options) {
    validate(params);
    if (options.normal_form_diagnostics) {
        nf_coeffs(dirac_triple(params.couplings));
        nf_coeffs(kg_triple(params.couplings));
    }
    Trajectory traj(params, rep);
    const StrangStepper stepper(initial.grid(), params.couplings, params.dt, rep);
    DkgState s = initial;
    if (s.initial_charge == 0.0) s.initial_charge = charge(s);
    const double t0 = s.t;
    const auto steps = static_cast<long>(std::llround(params.T_max / params.dt));

    auto record = [&](long step) {
        // Snapshot times are set from the step count so that they are exact
        // multiples of the stride regardless of accumulated rounding.
        s.t = t0 + static_cast<double>(step) * params.dt;
        Snapshot snap{s, compute_diagnostics(s, params.couplings, rep, options.normal_form_diagnostics)};
        if (options.observer) options.observer(snap);
        if (!options.keep_states) snap.state.reset();
        traj.push(std::move(snap));
    };

    record(0);
    for (long step = 1; step <= steps; ++step) {
        stepper.step(s);
        if (step % params.snapshot_stride == 0) record(step);
    }
    return traj;
}

}  // namespace dkg
