#pragma once

#include "dkg/field.hpp"

namespace dkg {

/// Masses and coupling of D_M psi = i g phi beta psi, (box + m^2) phi = g <psi, beta psi>.
struct Couplings {
    double M = 1.0;  ///< Dirac mass
    double m = 1.0;  ///< Klein-Gordon mass
    double g = 1.0;
};

struct DkgState {
    SpinorField psi;
    ScalarField phi;
    ScalarField phi_t;
    double t = 0.0;
    /// int |psi|^2 at construction of the run, for drift tracking.
    double initial_charge = 0.0;

    const Grid& grid() const { return psi.grid(); }
};

}  // namespace dkg
