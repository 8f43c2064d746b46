#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dkg/clifford.hpp"
#include "dkg/field.hpp"
#include "dkg/normalform.hpp"
#include "dkg/solver.hpp"

namespace dkg {

struct ExtractOptions {
    /// Snapshots with t below this are treated as the nonlinear transient.
    double transient = 5.0;
    /// Required decay ||defect(T_max)|| / ||defect(t_1)||, t_1 the first
    /// snapshot past the transient.
    double tail_ratio = 0.05;
    /// Throw TailNotConverged when the ratio is not met.
    bool enforce_tail = true;
};

/// Truncation audit of int_T^infty: ||defect(T)|| <T> / (1 - delta), with
/// delta read off the fitted decay ||defect(t)|| ~ t^{-2 + delta}.
struct TailReport {
    double t_first = 0.0;
    double defect_first = 0.0;
    double t_last = 0.0;
    double defect_last = 0.0;
    double decay_slope = 0.0;
    double delta_fit = 0.0;
    double tail_bound = 0.0;
    bool converged = true;
};

struct DiracExtraction {
    /// psi0 - (conj-Dirac Lambda_D)(0) + int_0^T U_D(-tau) defect_D(tau) dtau (trapezoid).
    SpinorField psi0_plus;
    /// U_D(-T)(psi(T) - (conj-Dirac Lambda_D)(T)).
    SpinorField psi0_plus_endpoint;
    TailReport tail;
    /// L2 distance between the two routes.
    double route_discrepancy = 0.0;
    /// L2 change of psi0_plus when every other snapshot is dropped, if the
    /// interval count is even.
    std::optional<double> stride_sensitivity;
    /// max over snapshots of the Duhamel identity residual at that time.
    double max_duhamel_residual = 0.0;
};

struct KgExtraction {
    ScalarField phi0_plus;
    ScalarField phi1_plus;
    ScalarField phi0_plus_endpoint;
    ScalarField phi1_plus_endpoint;
    TailReport tail;
    double route_discrepancy = 0.0;
    std::optional<double> stride_sensitivity;
};

/// Requires stored states. Throws TailNotConverged (when enforced) and
/// ResonantMass.
DiracExtraction extract_dirac_state(const Trajectory& traj, const Couplings& c, const CliffordRep& rep,
                                    const ExtractOptions& opts = {});
KgExtraction extract_kg_state(const Trajectory& traj, const Couplings& c, const CliffordRep& rep,
                              const ExtractOptions& opts = {});

struct CurvePoint {
    double t;
    double dirac;  ///< ||psi(t) - psi+(t)||_{H^sigma}
    double kg;     ///< ||phi - phi+||_{H^sigma} + ||d_t(phi - phi+)||_{H^{sigma-1}}
};

/// Least-squares slope of log y against log t over points with t in [t_lo, t_hi]
/// and y > 0. Returns NaN with fewer than two usable points.
double fit_loglog_slope(std::span<const double> t, std::span<const double> y, double t_lo, double t_hi);

struct ScatterResult {
    SpinorField psi0_plus;
    ScalarField phi0_plus;
    ScalarField phi1_plus;
    std::vector<CurvePoint> convergence_curve;
    std::pair<double, double> fitted_slopes{};  ///< (Dirac, KG) over the fit window
    int sigma = 0;
    double fit_start = 0.0;
    double fit_end = 0.0;
    DiracExtraction dirac;
    KgExtraction kg;
};

/// Fraction of T_max where the slope-fitting window starts; it ends at T_max.
inline constexpr double kFitWindowStartFraction = 0.25;

/// Runs both extractions, then propagates the limits freely and records the
/// H^sigma distance at every snapshot.
ScatterResult scatter(const Trajectory& traj, const Couplings& c, const CliffordRep& rep, int sigma = 1,
                      const ExtractOptions& opts = {}, double fit_start_fraction = kFitWindowStartFraction);

std::vector<CurvePoint> convergence_curve(const Trajectory& traj, const SpinorField& psi0_plus,
                                          const ScalarField& phi0_plus, const ScalarField& phi1_plus,
                                          const Couplings& c, const CliffordRep& rep, int sigma);

/// ||d_t f + (alpha.grad + i M beta) f|| / ||f|| for a spinor with known time derivative.
double dirac_equation_residual(const SpinorField& f, const SpinorField& f_t, double mass, const CliffordRep& rep);

/// Residual of psi+(t) = U_D(t) psi0_plus, with d_t taken from the -iH multiplier.
double free_dirac_residual(const SpinorField& psi0_plus, double mass, const CliffordRep& rep, double t_sample);

/// Negative control: each component evolved by the free KG flow of mass M from
/// (psi0_plus, 0), then tested against the first-order Dirac equation.
double kg_componentwise_dirac_residual(const SpinorField& psi0_plus, double mass, const CliffordRep& rep,
                                       double t_sample);

/// Everything needed to produce one trajectory from Gaussian data.
struct Scenario {
    int n = 128;
    double L = 80.0;
    double eps = 1e-2;
    double width = 5.0;
    SimParams params;
};

struct SweepRow {
    double m = 0.0;
    double det_dirac = 0.0;  ///< det A for (M, m, M)
    double det_kg = 0.0;     ///< det A for (m, M, M)
    std::optional<NormalFormCoeffs> dirac;
    std::optional<NormalFormCoeffs> kg;
    std::optional<double> dirac_slope;
    std::optional<double> final_sup_psi_weighted;
    std::string status = "ok";
};

struct SweepOptions {
    /// Also run the simulation (and, off resonance, the extraction) per row.
    bool simulate = false;
    Scenario scenario;
    ExtractOptions extract;
    int sigma = 1;
    int workers = 1;
};

/// One row per m at fixed M = opts.scenario.params.couplings.M. Resonant rows
/// carry status "ResonantMass" and no coefficients; nothing is NaN.
std::vector<SweepRow> resonance_sweep(std::span<const double> m_values, double M, const SweepOptions& opts,
                                      const CliffordRep& rep);

inline constexpr const char* kSweepHeader =
    "m,det_dirac,det_kg,p_dirac,ptilde_dirac,p_kg,ptilde_kg,dirac_slope,final_sup_psi_weighted,status";

std::string sweep_csv_row(const SweepRow& r);

}  // namespace dkg
