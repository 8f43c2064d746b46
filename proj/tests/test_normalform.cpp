#include <doctest.h>

#include <cmath>
#include <random>

#include "dkg/error.hpp"
#include "dkg/normalform.hpp"
#include "dkg/propagators.hpp"
#include "dkg/solver.hpp"
#include "support.hpp"

using namespace dkg;

namespace {

bool resonant(const MassTriple& t) {
    try {
        nf_coeffs(t);
        return false;
    } catch (const DkgError& e) {
        return e.category() == ErrorCategory::ResonantMass;
    }
}

// States at t - h, t, t + h, stepped finely from a common start.
struct Stencil {
    DkgState minus, mid, plus;
};

Stencil stencil(const DkgState& start, const Couplings& c, double h, int substeps) {
    const CliffordRep rep = default_rep();
    const StrangStepper fwd(start.grid(), c, h / substeps, rep);
    DkgState s = start;
    Stencil out{s, s, s};
    for (int k = 0; k < substeps; ++k) fwd.step(s);
    out.mid = s;
    for (int k = 0; k < substeps; ++k) fwd.step(s);
    out.plus = s;
    return out;
}

template <class F>
F second_difference(const F& m, const F& c, const F& p, double h) {
    F out = m + p;
    out -= typename F::value_type(2.0) * c;
    out *= typename F::value_type(1.0 / (h * h));
    return out;
}

template <class F>
F central_difference(const F& m, const F& p, double h) {
    F out = p - m;
    out *= typename F::value_type(1.0 / (2 * h));
    return out;
}

}  // namespace

TEST_CASE("hand-checked coefficients") {
    const auto a = nf_coeffs({3, 1, 1});
    CHECK(a.p == doctest::Approx(7.0 / 45).epsilon(1e-15));
    CHECK(a.p_tilde == doctest::Approx(-2.0 / 45).epsilon(1e-15));
    CHECK(a.det == 45.0);
    const auto b = nf_coeffs({1, 1, 1});
    CHECK(b.p == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(b.p_tilde == doctest::Approx(2.0 / 3).epsilon(1e-15));
    CHECK(det_product({1, 3, 1}) == 45.0);
    CHECK(det_direct({1, 3, 1}) == 45.0);
}

TEST_CASE("resonant triples are flagged, not divided by") {
    CHECK(det_product({1, 2, 1}) == 0.0);
    CHECK(det_product({2, 1, 1}) == 0.0);
    CHECK(resonant({1, 2, 1}));
    CHECK(resonant({2, 1, 1}));
    CHECK(resonant({1.0, 2.0 + 1e-12, 1.0}));
    CHECK_FALSE(resonant({1.0, 1.99, 1.0}));
    CHECK_THROWS_AS(nf_residual_check({2, 1, 1}), DkgError);
    const Couplings c{1.0, 2.0, 1.0};
    const Grid g(32, 16.0);
    CHECK_THROWS_AS(normal_form_fields(dkg::test::small_state(g, 0.1, 1.5), c, default_rep()), DkgError);
}

TEST_CASE("coefficients solve A (p, p~) = (1, 0) on random triples") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> mass(0.1, 10.0);
    int checked = 0;
    for (int i = 0; i < 1000; ++i) {
        const MassTriple t{mass(rng), mass(rng), mass(rng)};
        CHECK(det_direct(t) == doctest::Approx(det_product(t)).epsilon(1e-10).scale(std::pow(t.mj + t.mk + t.ml, 4)));
        if (resonant(t)) continue;
        const auto c = nf_coeffs(t);
        const auto A = matrix_A(t);
        const double s = std::abs(A[0][0] * c.p) + std::abs(A[0][1] * c.p_tilde) + 1.0;
        CHECK(std::abs(A[0][0] * c.p + A[0][1] * c.p_tilde - 1.0) <= 1e-12 * s);
        CHECK(std::abs(A[1][0] * c.p + A[1][1] * c.p_tilde) <= 1e-12 * s);
        ++checked;
    }
    CHECK(checked > 990);
}

TEST_CASE("coefficients scale as lambda^-2 and lambda^-4 under mass scaling") {
    const MassTriple t{1.3, 0.4, 2.2};
    const auto c = nf_coeffs(t);
    for (double lambda : {0.5, 3.0, 7.0}) {
        const auto s = nf_coeffs({lambda * t.mj, lambda * t.mk, lambda * t.ml});
        CHECK(s.p == doctest::Approx(c.p / (lambda * lambda)).epsilon(1e-12));
        CHECK(s.p_tilde == doctest::Approx(c.p_tilde / std::pow(lambda, 4)).epsilon(1e-12));
    }
}

TEST_CASE("zero-mode residual vanishes off resonance") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> mass(0.1, 10.0);
    for (int i = 0; i < 200; ++i) {
        const MassTriple t{mass(rng), mass(rng), mass(rng)};
        if (resonant(t)) continue;
        // Closed form of the residual divided by the wave product:
        // 1 - (mj^2 - (mk + ml)^2)(mj^2 - (mk - ml)^2) / det, identically zero.
        const double closed = 1.0 - (t.mj * t.mj - std::pow(t.mk + t.ml, 2)) * (t.mj * t.mj - std::pow(t.mk - t.ml, 2)) /
                                        det_product(t);
        CHECK(std::abs(closed) < 1e-9);
        CHECK(nf_residual_check(t) < 1e-10);
        CHECK(nf_residual_check(t, 4.1) < 1e-10);
    }
}

TEST_CASE("triples used by the two equations") {
    const Couplings c{1.5, 0.7, 1.0};
    const auto d = dirac_triple(c), k = kg_triple(c);
    CHECK((d.mj == 1.5 && d.mk == 0.7 && d.ml == 1.5));
    CHECK((k.mj == 0.7 && k.mk == 1.5 && k.ml == 1.5));
}

TEST_CASE("analytic time jets match finite differences of the solver") {
    const Grid g(64, 32.0);
    const Couplings c{1.0, 0.8, 1.0};
    const CliffordRep rep = default_rep();
    const DkgState s0 = dkg::test::small_state(g, 0.3);
    const double h = 0.01;
    const Stencil st = stencil(s0, c, h, 20);
    const StateJets j = compute_state_jets(st.mid, c, rep);

    CHECK(dkg::test::rel_l2(j.psi[0], st.mid.psi) == 0.0);
    CHECK(dkg::test::rel_l2(central_difference(st.minus.psi, st.plus.psi, h), j.psi[1]) < 1e-4);
    CHECK(dkg::test::rel_l2(second_difference(st.minus.psi, st.mid.psi, st.plus.psi, h), j.psi[2]) < 1e-4);
    CHECK(dkg::test::rel_l2(central_difference(st.minus.phi, st.plus.phi, h), j.phi[1]) < 1e-4);
    CHECK(dkg::test::rel_l2(second_difference(st.minus.phi, st.mid.phi, st.plus.phi, h), j.phi[2]) < 1e-4);

    const StateJets jm = compute_state_jets(st.minus, c, rep), jp = compute_state_jets(st.plus, c, rep);
    CHECK(dkg::test::rel_l2(central_difference(jm.psi[2], jp.psi[2], h), j.psi[3]) < 1e-4);
    CHECK(dkg::test::rel_l2(central_difference(jm.phi[2], jp.phi[2], h), j.phi[3]) < 1e-4);
}

TEST_CASE("defects equal nonlinearity minus (box + mass^2) of the corrections") {
    // The box is applied by finite differences in time along a finely stepped
    // solution, independent of the Leibniz expansion used in the library.
    const Grid g(64, 32.0);
    const Couplings c{1.0, 0.8, 1.0};
    const CliffordRep rep = default_rep();
    const DkgState s0 = dkg::test::small_state(g, 0.3);
    const double h = 0.01;
    const Stencil st = stencil(s0, c, h, 20);
    const NormalFormFields m = normal_form_fields(st.minus, c, rep);
    const NormalFormFields z = normal_form_fields(st.mid, c, rep);
    const NormalFormFields p = normal_form_fields(st.plus, c, rep);

    SUBCASE("Dirac") {
        SpinorField box = second_difference(m.lambda_D, z.lambda_D, p.lambda_D, h);
        box -= laplacian(z.lambda_D);
        box += cplx(c.M * c.M) * z.lambda_D;
        CHECK(dkg::test::rel_l2(box, z.dirac_nonlinearity - z.dirac_defect) < 1e-4);
        CHECK(dkg::test::rel_l2(central_difference(m.lambda_D, p.lambda_D, h), z.lambda_D_t) < 1e-4);
    }
    SUBCASE("Klein-Gordon") {
        ScalarField box = second_difference(m.lambda_KG, z.lambda_KG, p.lambda_KG, h);
        box -= laplacian(z.lambda_KG);
        box += (c.m * c.m) * z.lambda_KG;
        CHECK(dkg::test::rel_l2(box, z.kg_nonlinearity - z.kg_defect) < 1e-4);
        CHECK(dkg::test::rel_l2(central_difference(m.lambda_KG, p.lambda_KG, h), z.lambda_KG_t) < 1e-4);
        CHECK(z.kg_imaginary_residue < 1e-12 * sup_norm(z.kg_nonlinearity));
    }
    SUBCASE("modified Dirac variable solves the Dirac equation forced by the defect") {
        const SpinorField wm = st.minus.psi - m.dirac_correction;
        const SpinorField wp = st.plus.psi - p.dirac_correction;
        const SpinorField w = st.mid.psi - z.dirac_correction;
        const SpinorField lhs = central_difference(wm, wp, h) + dirac_spatial_operator(w, c.M, rep);
        CHECK(dkg::test::rel_l2(lhs, z.dirac_defect) < 1e-3);
    }
}

TEST_CASE("corrections vanish without coupling or without the spinor") {
    const Grid g(32, 16.0);
    const CliffordRep rep = default_rep();
    const DkgState s = dkg::test::small_state(g, 0.2, 1.5);
    const NormalFormFields free = normal_form_fields(s, {1.0, 1.0, 0.0}, rep);
    CHECK(l2_norm(free.lambda_D) == 0.0);
    CHECK(l2_norm(free.lambda_KG) == 0.0);
    CHECK(l2_norm(free.dirac_defect) == 0.0);
    CHECK(l2_norm(free.kg_defect) == 0.0);

    DkgState pure_kg = s;
    pure_kg.psi = SpinorField(g);
    const NormalFormFields nf = normal_form_fields(pure_kg, {1.0, 1.0, 1.0}, rep);
    CHECK(l2_norm(nf.kg_defect) == 0.0);
    CHECK(l2_norm(nf.dirac_correction) == 0.0);
}

TEST_CASE("conjugate Dirac operator composes with the Dirac operator to box + M^2") {
    // On a free Klein-Gordon spinor f with mass M, D (conj D f) = 0.
    const Grid g(64, 32.0);
    const CliffordRep rep = default_rep();
    const double M = 1.2;
    const SpinorField f0 = dkg::test::random_spinor(g, 9);
    const SpinorField f0t = dkg::test::random_spinor(g, 10);
    auto kg_spinor = [&](double t) {
        SpinorField f(g), ft(g);
        for (int c = 0; c < 2; ++c)
            for (int part = 0; part < 2; ++part) {
                ScalarField a(g), b(g);
                for (size_t k = 0; k < g.points(); ++k) {
                    a.at(0, k) = part ? f0.at(c, k).imag() : f0.at(c, k).real();
                    b.at(0, k) = part ? f0t.at(c, k).imag() : f0t.at(c, k).real();
                }
                const auto [x, y] = kg_propagate(a, b, M, t);
                for (size_t k = 0; k < g.points(); ++k) {
                    f.at(c, k) += part ? cplx(0.0, x.at(0, k)) : cplx(x.at(0, k));
                    ft.at(c, k) += part ? cplx(0.0, y.at(0, k)) : cplx(y.at(0, k));
                }
            }
        return std::pair{f, ft};
    };
    const double h = 1e-3;
    const auto [fm, fmt] = kg_spinor(-h);
    const auto [f, ft] = kg_spinor(0.0);
    const auto [fp, fpt] = kg_spinor(h);
    const SpinorField wm = conj_dirac_apply(fm, fmt, M, rep);
    const SpinorField w = conj_dirac_apply(f, ft, M, rep);
    const SpinorField wp = conj_dirac_apply(fp, fpt, M, rep);
    const SpinorField dw = central_difference(wm, wp, h) + dirac_spatial_operator(w, M, rep);
    CHECK(l2_norm(dw) < 1e-5 * l2_norm(w));
}
