#pragma once

#include <utility>
#include <vector>

#include "dkg/clifford.hpp"
#include "dkg/field.hpp"

namespace dkg {

/// <xi>_m = sqrt(m^2 + |xi|^2) per Fourier mode.
struct MultiplierTable {
    Grid grid;
    double mass;
    std::vector<double> omega;
};

MultiplierTable make_multiplier_table(const Grid& grid, double mass);

/// Free Klein-Gordon flow over duration t:
///   (cos(t W) phi + W^{-1} sin(t W) phi_t,  -W sin(t W) phi + cos(t W) phi_t),  W = (m^2 - Delta)^{1/2}.
std::pair<ScalarField, ScalarField> kg_propagate(const ScalarField& phi, const ScalarField& phi_t, double mass, double t);

/// Free Dirac group U_D(t) = exp(-t (alpha.grad + i M beta)), applied per mode
/// as exp(-i t H(xi)).
SpinorField dirac_propagate(const SpinorField& psi, double mass, double t, const CliffordRep& rep);

/// (alpha.grad + i M beta) psi with spectral derivatives.
SpinorField dirac_spatial_operator(const SpinorField& psi, double mass, const CliffordRep& rep);

/// 1/2 int (phi_t^2 + |grad phi|^2 + m^2 phi^2).
double kg_free_energy(const ScalarField& phi, const ScalarField& phi_t, double mass);

/// Fixed-step spectral-space versions of the two flows, with the per-mode
/// symbols precomputed once. Inputs are DFT coefficient planes.
class DiracStepOperator {
public:
    DiracStepOperator(const Grid& grid, double mass, double t, const CliffordRep& rep);
    void apply(std::span<cplx> upper, std::span<cplx> lower) const;

private:
    std::vector<Mat2> symbols_;
};

class KgStepOperator {
public:
    KgStepOperator(const Grid& grid, double mass, double t);
    void apply(std::span<cplx> phi, std::span<cplx> phi_t) const;

private:
    std::vector<double> cos_;
    std::vector<double> sin_over_omega_;
    std::vector<double> omega_sin_;
};

}  // namespace dkg
