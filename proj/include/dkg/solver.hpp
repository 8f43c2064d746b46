#pragma once

#include <array>
#include <functional>
#include <string>
#include <optional>
#include <vector>

#include "dkg/clifford.hpp"
#include "dkg/field.hpp"
#include "dkg/propagators.hpp"
#include "dkg/state.hpp"

namespace dkg {

struct SimParams {
    Couplings couplings;
    double dt = 0.01;
    double T_max = 50.0;
    /// Steps between recorded snapshots.
    int snapshot_stride = 10;
};

inline constexpr double kMaxTimeStep = 0.1;
inline constexpr double kBlowupThreshold = 1e6;

/// Throws DkgError(ConfigError) on non-positive masses, dt outside (0, 0.1],
/// non-positive horizon or stride.
void validate(const SimParams& p);

/// Radius beyond which |G|^2 of a Gaussian of this width is below 1e-8 of its
/// peak, the same level the boundary-mass monitor flags.
double gaussian_support_radius(double width);

/// psi_0 = eps G (1, 0)^T, phi_0 = eps G, phi_1 = 0 with
/// G = exp(-|x - x_c|^2 / width^2) centred in the box. Throws ConfigError when
/// the width is under four cells or the support reaches within L/4 of the seam.
DkgState initial_data_gaussian(double eps, double width, const Grid& grid, const CliffordRep& rep,
                               const SimParams& params);

/// Exact flow over dt of (psi_t, phi_t, phi_tt) = (i g phi beta psi, 0, g <psi, beta psi>):
/// psi <- exp(i g phi dt beta) psi pointwise, phi_t <- phi_t + dt g <psi, beta psi>.
DkgState nonlinear_substep(const DkgState& s, double dt, const Couplings& c, const CliffordRep& rep);

double charge(const DkgState& s);
double energy(const DkgState& s, const Couplings& c, const CliffordRep& rep);

/// Strang splitting N(dt/2) L(dt) N(dt/2) with exact linear and nonlinear
/// sub-flows; each nonlinear substep is followed by dealiasing. A negative dt
/// steps backwards. Symbols are precomputed for the fixed step.
class StrangStepper {
public:
    StrangStepper(const Grid& grid, const Couplings& c, double dt, const CliffordRep& rep);

    /// Advances in place. Throws DkgError(BlowupDetected) if a sup-norm exceeds 1e6.
    void step(DkgState& s) const;
    double dt() const { return dt_; }

private:
    void nonlinear(DkgState& s, double h) const;
    void dealias_in_place(DkgState& s) const;

    Grid grid_;
    Couplings couplings_;
    double dt_;
    CliffordRep rep_;
    DiracStepOperator dirac_;
    KgStepOperator kg_;
};

DkgState strang_step(const DkgState& s, const SimParams& params, const CliffordRep& rep);

/// Per-snapshot record; column order matches the diagnostics CSV.
struct Diagnostics {
    double t = 0.0;
    double charge = 0.0;
    double energy = 0.0;
    std::array<double, 3> h_psi{};  ///< ||psi||_{H^s}, s = 0, 1, 2
    std::array<double, 3> h_phi{};
    double sup_psi_weighted = 0.0;  ///< <t> sup |psi|
    double sup_phi_weighted = 0.0;
    /// Normal-form columns; empty when those diagnostics are disabled.
    std::optional<double> defect_l2_dirac;
    std::optional<double> defect_l2_kg;
    std::optional<double> nonlinearity_l2_dirac;
    std::optional<double> nonlinearity_l2_kg;
};

Diagnostics compute_diagnostics(const DkgState& s, const Couplings& c, const CliffordRep& rep,
                                bool normal_form);

inline constexpr const char* kDiagnosticsHeader =
    "t,charge,energy,h0_psi,h1_psi,h2_psi,h0_phi,h1_phi,h2_phi,sup_psi_weighted,sup_phi_weighted,"
    "defect_l2_dirac,defect_l2_kg";

/// One CSV row in kDiagnosticsHeader order, full round-trip precision.
std::string diagnostics_csv_row(const Diagnostics& d);

struct Snapshot {
    /// Absent when the run was asked not to keep states.
    std::optional<DkgState> state;
    Diagnostics diagnostics;
};

/// Time-ordered snapshots at a uniform stride. Defect fields are not stored;
/// they are pure functions of each state and are rebuilt on demand through
/// normal_form_fields.
class Trajectory {
public:
    Trajectory(SimParams params, CliffordRep rep) : params_(params), rep_(std::move(rep)) {}

    /// Throws std::invalid_argument unless times increase at the snapshot stride.
    void push(Snapshot s);

    const std::vector<Snapshot>& snapshots() const { return snapshots_; }
    size_t size() const { return snapshots_.size(); }
    const Snapshot& operator[](size_t i) const { return snapshots_[i]; }
    /// Throws std::logic_error when states were not kept.
    const DkgState& state(size_t i) const;
    double time(size_t i) const { return snapshots_[i].diagnostics.t; }
    const SimParams& params() const { return params_; }
    const CliffordRep& rep() const { return rep_; }
    double spacing() const { return params_.dt * params_.snapshot_stride; }

private:
    SimParams params_;
    CliffordRep rep_;
    std::vector<Snapshot> snapshots_;
};

struct RunOptions {
    /// Compute defect norms at every snapshot. Requires a non-resonant mass pair.
    bool normal_form_diagnostics = true;
    /// Keep the states in the returned trajectory (otherwise only diagnostics).
    bool keep_states = true;
    /// Called for every snapshot, in order, before it is stored.
    std::function<void(const Snapshot&)> observer;
};

/// Integrates from `initial` to T_max. Throws BlowupDetected (message carries
/// the time) or ResonantMass when normal-form diagnostics are requested at m = 2M.
Trajectory run(const SimParams& params, const DkgState& initial, const CliffordRep& rep,
               const RunOptions& options = {});

}  // namespace dkg
