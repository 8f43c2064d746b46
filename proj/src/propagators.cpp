#include "dkg/propagators.hpp"

#include <cmath>

namespace dkg {

MultiplierTable make_multiplier_table(const Grid& grid, double mass) {
    const int n = grid.n();
    MultiplierTable table{grid, mass, std::vector<double>(grid.points())};
    for (int i1 = 0; i1 < n; ++i1)
        for (int i2 = 0; i2 < n; ++i2) {
            const double k1 = grid.wavenumber(i1), k2 = grid.wavenumber(i2);
            table.omega[grid.index(i1, i2)] = std::sqrt(mass * mass + k1 * k1 + k2 * k2);
        }
    return table;
}

KgStepOperator::KgStepOperator(const Grid& grid, double mass, double t) {
    const auto table = make_multiplier_table(grid, mass);
    const size_t np = grid.points();
    cos_.resize(np);
    sin_over_omega_.resize(np);
    omega_sin_.resize(np);
    for (size_t k = 0; k < np; ++k) {
        const double w = table.omega[k];
        cos_[k] = std::cos(t * w);
        sin_over_omega_[k] = sin_over_omega(t, w);
        omega_sin_[k] = w * std::sin(t * w);
    }
}

void KgStepOperator::apply(std::span<cplx> phi, std::span<cplx> phi_t) const {
    for (size_t k = 0; k < cos_.size(); ++k) {
        const cplx a = phi[k], b = phi_t[k];
        phi[k] = cos_[k] * a + sin_over_omega_[k] * b;
        phi_t[k] = -omega_sin_[k] * a + cos_[k] * b;
    }
}

DiracStepOperator::DiracStepOperator(const Grid& grid, double mass, double t, const CliffordRep& rep)
    : symbols_(grid.points()) {
    const int n = grid.n();
    for (int i1 = 0; i1 < n; ++i1)
        for (int i2 = 0; i2 < n; ++i2) {
            symbols_[grid.index(i1, i2)] =
                dirac_symbol_exponential(rep, mass, {grid.wavenumber(i1), grid.wavenumber(i2)}, t);
        }
}

void DiracStepOperator::apply(std::span<cplx> upper, std::span<cplx> lower) const {
    for (size_t k = 0; k < symbols_.size(); ++k) {
        const auto r = symbols_[k].apply(upper[k], lower[k]);
        upper[k] = r[0];
        lower[k] = r[1];
    }
}

std::pair<ScalarField, ScalarField> kg_propagate(const ScalarField& phi, const ScalarField& phi_t, double mass,
                                                 double t) {
    const KgStepOperator op(phi.grid(), mass, t);
    auto a = spectrum(phi, 0);
    auto b = spectrum(phi_t, 0);
    op.apply(a, b);
    ScalarField out_phi(phi.grid()), out_phi_t(phi.grid());
    assign_from_spectrum(out_phi, 0, std::move(a));
    assign_from_spectrum(out_phi_t, 0, std::move(b));
    return {std::move(out_phi), std::move(out_phi_t)};
}

SpinorField dirac_propagate(const SpinorField& psi, double mass, double t, const CliffordRep& rep) {
    const DiracStepOperator op(psi.grid(), mass, t, rep);
    auto u = spectrum(psi, 0);
    auto l = spectrum(psi, 1);
    op.apply(u, l);
    SpinorField out(psi.grid());
    assign_from_spectrum(out, 0, std::move(u));
    assign_from_spectrum(out, 1, std::move(l));
    return out;
}

SpinorField dirac_spatial_operator(const SpinorField& psi, double mass, const CliffordRep& rep) {
    const auto grad = gradient(psi);
    SpinorField out(psi.grid());
    const cplx iM{0.0, mass};
    const Mat2& a1 = rep.alpha1();
    const Mat2& a2 = rep.alpha2();
    const Mat2& b = rep.beta();
    for (size_t k = 0; k < psi.plane_size(); ++k) {
        const auto r1 = a1.apply(grad[0].at(0, k), grad[0].at(1, k));
        const auto r2 = a2.apply(grad[1].at(0, k), grad[1].at(1, k));
        const auto rb = b.apply(psi.at(0, k), psi.at(1, k));
        out.at(0, k) = r1[0] + r2[0] + iM * rb[0];
        out.at(1, k) = r1[1] + r2[1] + iM * rb[1];
    }
    return out;
}

double kg_free_energy(const ScalarField& phi, const ScalarField& phi_t, double mass) {
    const auto grad = gradient(phi);
    double acc = 0.0;
    for (size_t k = 0; k < phi.plane_size(); ++k) {
        const double p = phi.at(0, k), pt = phi_t.at(0, k);
        const double g1 = grad[0].at(0, k), g2 = grad[1].at(0, k);
        acc += pt * pt + g1 * g1 + g2 * g2 + mass * mass * p * p;
    }
    return 0.5 * acc * phi.grid().cell_weight();
}

}  // namespace dkg
