#pragma once

#include <array>

#include "dkg/clifford.hpp"
#include "dkg/field.hpp"
#include "dkg/state.hpp"

namespace dkg {

/// Masses (m_j, m_k, m_l) of the target operator box + m_j^2 and of the two
/// factors of a quadratic term v_k v~_l.
struct MassTriple {
    double mj;
    double mk;
    double ml;
};

using RealMat2 = std::array<std::array<double, 2>, 2>;

/// [[m_j^2 - m_k^2 - m_l^2, 2 m_k^2 m_l^2], [2, m_j^2 - m_k^2 - m_l^2]]
RealMat2 matrix_A(const MassTriple& t);

/// Determinant of matrix_A computed entrywise.
double det_direct(const MassTriple& t);

/// prod_{s1, s2 = +-1} (m_j + s1 m_k + s2 m_l)
double det_product(const MassTriple& t);

/// (p, p~) = A^{-1} (1, 0)^T, the coefficients that turn v_k v~_l into
/// (box + m_j^2)(p v_k v~_l + p~ Q0(v_k, v~_l)) up to null forms and cubic terms.
struct NormalFormCoeffs {
    double p;
    double p_tilde;
    double det;
    MassTriple triple;
};

inline constexpr double kResonanceTol = 1e-9;

/// Throws DkgError(ResonantMass) when |det| < tol (m_j + m_k + m_l)^4.
NormalFormCoeffs nf_coeffs(const MassTriple& t, double tol = kResonanceTol);

/// |v_k v~_l - (box + m_j^2)(p v_k v~_l + p~ Q0(v_k, v~_l))| for the spatially
/// constant free waves v_k = e^{i m_k t}, v~_l = e^{i m_l t}, evaluated from
/// their time jets at `t_sample`. Vanishes identically off resonance.
double nf_residual_check(const MassTriple& t, double t_sample = 0.37, double tol = kResonanceTol);

/// Triple for phi beta psi inside the Dirac equation: (M, m, M).
inline MassTriple dirac_triple(const Couplings& c) { return {c.M, c.m, c.M}; }
/// Triple for <psi, beta psi> inside the Klein-Gordon equation: (m, M, M).
inline MassTriple kg_triple(const Couplings& c) { return {c.m, c.M, c.M}; }

/// Time derivatives of order 0..3 of psi and phi, obtained by differentiating
/// the evolution equations; spatial derivatives are spectral.
struct StateJets {
    std::array<SpinorField, 4> psi;
    std::array<ScalarField, 4> phi;
    double t;
};

StateJets compute_state_jets(const DkgState& s, const Couplings& c, const CliffordRep& rep);

/// Every normal-form quantity at one instant.
struct NormalFormFields {
    SpinorField dirac_nonlinearity;  ///< i g phi beta psi
    SpinorField lambda_D;
    SpinorField lambda_D_t;
    SpinorField dirac_correction;  ///< conj-Dirac operator applied to lambda_D
    SpinorField dirac_defect;      ///< i g phi beta psi - (box + M^2) lambda_D

    ScalarField kg_nonlinearity;  ///< g <psi, beta psi>
    ScalarField lambda_KG;
    ScalarField lambda_KG_t;
    ScalarField kg_defect;  ///< g <psi, beta psi> - (box + m^2) lambda_KG

    /// Largest imaginary part discarded from the KG quantities.
    double kg_imaginary_residue = 0.0;
};

/// Throws DkgError(ResonantMass) when either triple is resonant.
NormalFormFields normal_form_fields(const StateJets& jets, const Couplings& c, const CliffordRep& rep);
NormalFormFields normal_form_fields(const DkgState& s, const Couplings& c, const CliffordRep& rep);

/// i g [p phi beta psi + p~ Q0(phi, beta psi)] with (p, p~) for (M, m, M).
SpinorField lambda_D(const StateJets& jets, const Couplings& c, const CliffordRep& rep);

/// g [p <psi, beta psi> + p~ (<d_t psi, beta d_t psi> - sum_j <d_j psi, beta d_j psi>)]
/// with (p, p~) for (m, M, M).
ScalarField lambda_KG(const StateJets& jets, const Couplings& c, const CliffordRep& rep);

SpinorField dirac_defect(const StateJets& jets, const Couplings& c, const CliffordRep& rep);
ScalarField kg_defect(const StateJets& jets, const Couplings& c, const CliffordRep& rep);

/// (d_t - alpha.grad - i M beta) applied to a spinor whose time derivative is known.
SpinorField conj_dirac_apply(const SpinorField& f, const SpinorField& f_t, double mass, const CliffordRep& rep);

}  // namespace dkg
