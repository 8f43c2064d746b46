#include "dkg/normalform.hpp"

#include <cmath>
#include <sstream>

#include "dkg/error.hpp"
#include "dkg/propagators.hpp"

namespace dkg {

RealMat2 matrix_A(const MassTriple& t) {
    const double a = t.mj * t.mj - t.mk * t.mk - t.ml * t.ml;
    return {{{a, 2.0 * t.mk * t.mk * t.ml * t.ml}, {2.0, a}}};
}

double det_direct(const MassTriple& t) {
    const auto A = matrix_A(t);
    return A[0][0] * A[1][1] - A[0][1] * A[1][0];
}

double det_product(const MassTriple& t) {
    double d = 1.0;
    for (double s1 : {1.0, -1.0})
        for (double s2 : {1.0, -1.0}) d *= t.mj + s1 * t.mk + s2 * t.ml;
    return d;
}

NormalFormCoeffs nf_coeffs(const MassTriple& t, double tol) {
    const double det = det_product(t);
    const double scale = std::pow(t.mj + t.mk + t.ml, 4);
    if (!(std::abs(det) >= tol * scale)) {
        std::ostringstream os;
        os << "mass triple (" << t.mj << ", " << t.mk << ", " << t.ml << ") is resonant: det A = " << det;
        fail(ErrorCategory::ResonantMass, os.str());
    }
    const double a = t.mj * t.mj - t.mk * t.mk - t.ml * t.ml;
    return {a / det, -2.0 / det, det, t};
}

double nf_residual_check(const MassTriple& t, double t_sample, double tol) {
    const auto c = nf_coeffs(t, tol);
    const cplx I{0.0, 1.0};
    // Time jets (value, d/dt, d2/dt2, d3/dt3) of e^{i m t}.
    auto jet = [&](double m) {
        const cplx e = std::exp(I * m * t_sample);
        return std::array<cplx, 4>{e, I * m * e, -m * m * e, -I * m * m * m * e};
    };
    const auto u = jet(t.mk);
    const auto v = jet(t.ml);
    // Spatially constant: Q0 reduces to the product of time derivatives and
    // box to d_t^2.
    const cplx prod = u[0] * v[0];
    const cplx prod_tt = u[2] * v[0] + 2.0 * u[1] * v[1] + u[0] * v[2];
    const cplx q = u[1] * v[1];
    const cplx q_tt = u[3] * v[1] + 2.0 * u[2] * v[2] + u[1] * v[3];
    const cplx w = c.p * prod + c.p_tilde * q;
    const cplx w_tt = c.p * prod_tt + c.p_tilde * q_tt;
    return std::abs(prod - (w_tt + t.mj * t.mj * w));
}

namespace {

SpinorField beta_apply(const SpinorField& f, const CliffordRep& rep) {
    SpinorField out(f.grid());
    const Mat2& b = rep.beta();
    for (size_t k = 0; k < f.plane_size(); ++k) {
        const auto r = b.apply(f.at(0, k), f.at(1, k));
        out.at(0, k) = r[0];
        out.at(1, k) = r[1];
    }
    return out;
}

/// Sum over terms coef * phi_a * beta psi_b.
SpinorField phi_beta_psi(std::initializer_list<std::tuple<double, const ScalarField*, const SpinorField*>> terms,
                         const CliffordRep& rep) {
    const auto& first = *std::get<2>(*terms.begin());
    SpinorField acc(first.grid());
    for (const auto& [coef, phi, psi] : terms) {
        const SpinorField bpsi = beta_apply(*psi, rep);
        for (int c = 0; c < 2; ++c)
            for (size_t k = 0; k < acc.plane_size(); ++k) acc.at(c, k) += coef * phi->at(0, k) * bpsi.at(c, k);
    }
    return acc;
}

/// Re <u, beta v> pointwise.
ScalarField beta_pairing(const SpinorField& u, const SpinorField& v, const CliffordRep& rep) {
    const SpinorField bv = beta_apply(v, rep);
    ScalarField out(u.grid());
    for (size_t k = 0; k < u.plane_size(); ++k) {
        out.at(0, k) = (std::conj(u.at(0, k)) * bv.at(0, k) + std::conj(u.at(1, k)) * bv.at(1, k)).real();
    }
    return out;
}

/// Field with all first and second space-time derivatives, the wave operator
/// box = d_t^2 - Delta, and the first derivatives of box.
struct Jet2 {
    ComplexField v, t, x1, x2;
    ComplexField tt, tx1, tx2, x1x1, x1x2, x2x2;
    ComplexField box, box_t, box_x1, box_x2;
};

/// From the four time derivatives (order 0..3) of one complex plane.
Jet2 make_jet2(const ComplexField& v, const ComplexField& vt, const ComplexField& vtt, const ComplexField& vttt) {
    auto gv = gradient(v);
    auto gvt = gradient(vt);
    auto g1 = gradient(gv[0]);
    auto g2 = gradient(gv[1]);
    ComplexField box = vtt - g1[0] - g2[1];
    // d_t box = v_ttt - Delta v_t, with Delta v_t built from the mixed jets.
    ComplexField box_t = vttt - spectral_derivative(gvt[0], 1) - spectral_derivative(gvt[1], 2);
    auto gbox = gradient(box);
    return Jet2{v,
                vt,
                std::move(gv[0]),
                std::move(gv[1]),
                vtt,
                std::move(gvt[0]),
                std::move(gvt[1]),
                std::move(g1[0]),
                std::move(g1[1]),
                std::move(g2[1]),
                std::move(box),
                std::move(box_t),
                std::move(gbox[0]),
                std::move(gbox[1])};
}

template <class Op>
Jet2 transform_jet(const Jet2& j, Op&& op) {
    auto f = [&](const ComplexField& x) {
        ComplexField out(x.grid());
        for (size_t k = 0; k < x.plane_size(); ++k) out.at(0, k) = op(x.at(0, k));
        return out;
    };
    return Jet2{f(j.v),    f(j.t),    f(j.x1),   f(j.x2),  f(j.tt),  f(j.tx1), f(j.tx2),
                f(j.x1x1), f(j.x1x2), f(j.x2x2), f(j.box), f(j.box_t), f(j.box_x1), f(j.box_x2)};
}

Jet2 conj_jet(const Jet2& j) {
    return transform_jet(j, [](cplx z) { return std::conj(z); });
}

/// a * ja + b * jb, member by member.
Jet2 combine(cplx a, const Jet2& ja, cplx b, const Jet2& jb) {
    auto f = [&](const ComplexField& x, const ComplexField& y) {
        ComplexField out(x.grid());
        for (size_t k = 0; k < x.plane_size(); ++k) out.at(0, k) = a * x.at(0, k) + b * y.at(0, k);
        return out;
    };
    return Jet2{f(ja.v, jb.v),       f(ja.t, jb.t),         f(ja.x1, jb.x1),       f(ja.x2, jb.x2),
                f(ja.tt, jb.tt),     f(ja.tx1, jb.tx1),     f(ja.tx2, jb.tx2),     f(ja.x1x1, jb.x1x1),
                f(ja.x1x2, jb.x1x2), f(ja.x2x2, jb.x2x2),   f(ja.box, jb.box),     f(ja.box_t, jb.box_t),
                f(ja.box_x1, jb.box_x1), f(ja.box_x2, jb.box_x2)};
}

/// L = p f G + p~ Q0(f, G): its value, time derivative and (box + mu^2) L,
/// expanded by the Leibniz rule for box and Q0:
///   box(fG)    = (box f) G + f box G + 2 Q0(f, G)
///   box Q0(f,G) = Q0(box f, G) + Q0(f, box G) + 2 sum_ab eps_a eps_b f_ab G_ab
struct BilinearImage {
    ComplexField value, value_t, klein_gordon;
};

void accumulate_bilinear(BilinearImage& out, const Jet2& f, const Jet2& G, double p, double pt, double mu) {
    const double mu2 = mu * mu;
    for (size_t k = 0; k < f.v.plane_size(); ++k) {
        auto F = [&](const ComplexField& x) { return x.at(0, k); };
        const cplx P = F(f.v) * F(G.v);
        const cplx P_t = F(f.t) * F(G.v) + F(f.v) * F(G.t);
        const cplx Q = F(f.t) * F(G.t) - F(f.x1) * F(G.x1) - F(f.x2) * F(G.x2);
        const cplx Q_t = F(f.tt) * F(G.t) + F(f.t) * F(G.tt) - F(f.tx1) * F(G.x1) - F(f.x1) * F(G.tx1) -
                         F(f.tx2) * F(G.x2) - F(f.x2) * F(G.tx2);
        const cplx boxP = F(f.box) * F(G.v) + F(f.v) * F(G.box) + 2.0 * Q;
        const cplx hess = F(f.tt) * F(G.tt) - 2.0 * F(f.tx1) * F(G.tx1) - 2.0 * F(f.tx2) * F(G.tx2) +
                          F(f.x1x1) * F(G.x1x1) + 2.0 * F(f.x1x2) * F(G.x1x2) + F(f.x2x2) * F(G.x2x2);
        const cplx boxQ = (F(f.box_t) * F(G.t) - F(f.box_x1) * F(G.x1) - F(f.box_x2) * F(G.x2)) +
                          (F(f.t) * F(G.box_t) - F(f.x1) * F(G.box_x1) - F(f.x2) * F(G.box_x2)) + 2.0 * hess;
        out.value.at(0, k) += p * P + pt * Q;
        out.value_t.at(0, k) += p * P_t + pt * Q_t;
        out.klein_gordon.at(0, k) += p * (boxP + mu2 * P) + pt * (boxQ + mu2 * Q);
    }
}

ComplexField component_plane(const SpinorField& f, int c) {
    const auto src = f.component(c);
    return ComplexField(f.grid(), std::vector<cplx>(src.begin(), src.end()));
}

Jet2 spinor_component_jet(const StateJets& j, int c) {
    return make_jet2(component_plane(j.psi[0], c), component_plane(j.psi[1], c), component_plane(j.psi[2], c),
                     component_plane(j.psi[3], c));
}

}  // namespace

SpinorField conj_dirac_apply(const SpinorField& f, const SpinorField& f_t, double mass, const CliffordRep& rep) {
    return f_t - dirac_spatial_operator(f, mass, rep);
}

StateJets compute_state_jets(const DkgState& s, const Couplings& c, const CliffordRep& rep) {
    const cplx ig{0.0, c.g};
    const SpinorField& psi = s.psi;
    const ScalarField& phi = s.phi;
    const ScalarField& phi_t = s.phi_t;

    SpinorField psi_t = ig * phi_beta_psi({{1.0, &phi, &psi}}, rep) - dirac_spatial_operator(psi, c.M, rep);
    SpinorField psi_tt =
        ig * phi_beta_psi({{1.0, &phi_t, &psi}, {1.0, &phi, &psi_t}}, rep) - dirac_spatial_operator(psi_t, c.M, rep);

    ScalarField rho = beta_pairing(psi, psi, rep);
    ScalarField phi_tt = laplacian(phi) - (c.m * c.m) * phi + c.g * rho;
    SpinorField psi_ttt = ig * phi_beta_psi({{1.0, &phi_tt, &psi}, {2.0, &phi_t, &psi_t}, {1.0, &phi, &psi_tt}}, rep) -
                          dirac_spatial_operator(psi_tt, c.M, rep);
    ScalarField rho_t = 2.0 * beta_pairing(psi, psi_t, rep);
    ScalarField phi_ttt = laplacian(phi_t) - (c.m * c.m) * phi_t + c.g * rho_t;

    return StateJets{{psi, std::move(psi_t), std::move(psi_tt), std::move(psi_ttt)},
                     {phi, phi_t, std::move(phi_tt), std::move(phi_ttt)},
                     s.t};
}

NormalFormFields normal_form_fields(const StateJets& jets, const Couplings& c, const CliffordRep& rep) {
    const auto cd = nf_coeffs(dirac_triple(c));
    const auto ck = nf_coeffs(kg_triple(c));
    const Grid& grid = jets.psi[0].grid();
    const cplx ig{0.0, c.g};

    const Jet2 phi_jet = make_jet2(complexify(jets.phi[0]), complexify(jets.phi[1]), complexify(jets.phi[2]),
                                   complexify(jets.phi[3]));
    const std::array<Jet2, 2> psi_jet{spinor_component_jet(jets, 0), spinor_component_jet(jets, 1)};
    const Mat2& b = rep.beta();
    const std::array<Jet2, 2> beta_psi_jet{combine(b(0, 0), psi_jet[0], b(0, 1), psi_jet[1]),
                                           combine(b(1, 0), psi_jet[0], b(1, 1), psi_jet[1])};

    SpinorField lam_D(grid), lam_D_t(grid), kg_of_lam_D(grid);
    for (int comp = 0; comp < 2; ++comp) {
        BilinearImage img{ComplexField(grid), ComplexField(grid), ComplexField(grid)};
        accumulate_bilinear(img, phi_jet, beta_psi_jet[comp], cd.p, cd.p_tilde, c.M);
        for (size_t k = 0; k < grid.points(); ++k) {
            lam_D.at(comp, k) = ig * img.value.at(0, k);
            lam_D_t.at(comp, k) = ig * img.value_t.at(0, k);
            kg_of_lam_D.at(comp, k) = ig * img.klein_gordon.at(0, k);
        }
    }

    BilinearImage img_kg{ComplexField(grid), ComplexField(grid), ComplexField(grid)};
    for (int comp = 0; comp < 2; ++comp) {
        accumulate_bilinear(img_kg, conj_jet(psi_jet[comp]), beta_psi_jet[comp], ck.p, ck.p_tilde, c.m);
    }
    double imag[3] = {0.0, 0.0, 0.0};
    ScalarField lam_KG = c.g * real_part(img_kg.value, &imag[0]);
    ScalarField lam_KG_t = c.g * real_part(img_kg.value_t, &imag[1]);
    ScalarField kg_of_lam_KG = c.g * real_part(img_kg.klein_gordon, &imag[2]);

    NormalFormFields out{
        ig * phi_beta_psi({{1.0, &jets.phi[0], &jets.psi[0]}}, rep),
        lam_D,
        lam_D_t,
        conj_dirac_apply(lam_D, lam_D_t, c.M, rep),
        SpinorField(grid),
        c.g * beta_pairing(jets.psi[0], jets.psi[0], rep),
        std::move(lam_KG),
        std::move(lam_KG_t),
        ScalarField(grid),
        std::abs(c.g) * std::max({imag[0], imag[1], imag[2]}),
    };
    out.dirac_defect = out.dirac_nonlinearity - kg_of_lam_D;
    out.kg_defect = out.kg_nonlinearity - kg_of_lam_KG;
    return out;
}

NormalFormFields normal_form_fields(const DkgState& s, const Couplings& c, const CliffordRep& rep) {
    return normal_form_fields(compute_state_jets(s, c, rep), c, rep);
}

SpinorField lambda_D(const StateJets& jets, const Couplings& c, const CliffordRep& rep) {
    return normal_form_fields(jets, c, rep).lambda_D;
}

ScalarField lambda_KG(const StateJets& jets, const Couplings& c, const CliffordRep& rep) {
    return normal_form_fields(jets, c, rep).lambda_KG;
}

SpinorField dirac_defect(const StateJets& jets, const Couplings& c, const CliffordRep& rep) {
    return normal_form_fields(jets, c, rep).dirac_defect;
}

ScalarField kg_defect(const StateJets& jets, const Couplings& c, const CliffordRep& rep) {
    return normal_form_fields(jets, c, rep).kg_defect;
}

}  // namespace dkg
