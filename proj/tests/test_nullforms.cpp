#include <doctest.h>

#include <cmath>

#include "dkg/nullforms.hpp"
#include "dkg/propagators.hpp"
#include "support.hpp"

using namespace dkg;

namespace {

// u = a(x) with u_t = b(x): the jet is fully determined by two fields.
Jet1<ScalarField> jet(const ScalarField& f, const ScalarField& f_t) { return make_jet1(f, f_t); }

}  // namespace

TEST_CASE("Q0 and Q_ab on explicit products") {
    const Grid g(64, 20.0);
    const ScalarField a = dkg::test::random_scalar(g, 1), b = dkg::test::random_scalar(g, 2);
    const ScalarField c = dkg::test::random_scalar(g, 3), d = dkg::test::random_scalar(g, 4);
    const auto u = jet(a, b), v = jet(c, d);
    const auto q = q0(u, v);
    const auto q12 = qab(1, 2, u, v);
    const auto q01 = qab(0, 1, u, v);
    for (size_t k = 0; k < g.points(); k += 97) {
        const double oracle = b.at(0, k) * d.at(0, k) - u.f_x1.at(0, k) * v.f_x1.at(0, k) - u.f_x2.at(0, k) * v.f_x2.at(0, k);
        CHECK(q.at(0, k) == doctest::Approx(oracle));
        CHECK(q12.at(0, k) ==
              doctest::Approx(u.f_x1.at(0, k) * v.f_x2.at(0, k) - u.f_x2.at(0, k) * v.f_x1.at(0, k)));
        CHECK(q01.at(0, k) == doctest::Approx(b.at(0, k) * v.f_x1.at(0, k) - u.f_x1.at(0, k) * d.at(0, k)));
    }
    CHECK(l2_norm(qab(1, 2, u, v) + qab(2, 1, u, v)) == 0.0);
    CHECK(l2_norm(qab(1, 1, u, v)) == 0.0);
    CHECK(l2_norm(qab(0, 2, u, u)) == 0.0);
    CHECK_THROWS(u.d(3));
}

TEST_CASE("scalar operands broadcast over spinor components") {
    const Grid g(32, 10.0);
    const ScalarField a = dkg::test::random_scalar(g, 5), b = dkg::test::random_scalar(g, 6);
    const SpinorField s = dkg::test::random_spinor(g, 7), st = dkg::test::random_spinor(g, 8);
    const auto u = make_jet1(a, b);
    const SpinorField q = q0(u, make_jet1(s, st));
    for (int c = 0; c < 2; ++c) {
        ComplexField sc(g), stc(g);
        for (size_t k = 0; k < g.points(); ++k) sc.at(0, k) = s.at(c, k), stc.at(0, k) = st.at(c, k);
        const ComplexField qc = q0(u, make_jet1(sc, stc));
        double diff = 0.0;
        for (size_t k = 0; k < g.points(); ++k) diff = std::max(diff, std::abs(q.at(c, k) - qc.at(0, k)));
        CHECK(diff == 0.0);
    }
}

TEST_CASE("strong null ratio stays bounded along free Klein-Gordon waves") {
    // Free waves satisfy the pointwise bound, so the ratio is O(1) and does
    // not grow while the boundary monitor is quiet.
    const Grid g(128, 80.0);
    const ScalarField G = dkg::test::gaussian(g, 1e-2, 4.0);
    const ScalarField H = dkg::test::gaussian(g, 1e-2, 4.0, 2.0);
    const ScalarField zero(g);
    double r5 = 0.0, worst = 0.0;
    for (double t : {5.0, 10.0, 20.0}) {
        const auto [u, ut] = kg_propagate(G, zero, 1.0, t);
        const auto [v, vt] = kg_propagate(zero, H, 1.0, t);
        const NullRatio nr = strong_null_ratio(0, 1, make_jet1(u, ut), make_jet1(v, vt), t);
        CHECK(nr.reliable);
        CHECK(std::isfinite(nr.ratio));
        if (t == 5.0) r5 = nr.ratio;
        worst = std::max(worst, nr.ratio);
    }
    CHECK(r5 > 0.0);
    CHECK(worst <= 3.0 * r5);
}

TEST_CASE("pointwise norms") {
    const Grid g(64, 24.0);
    const ScalarField a = dkg::test::gaussian(g, 1.0, 2.0);
    const auto u = make_jet1(a, a);
    const auto dn = d_norm(u);
    double b = 0.0;
    const auto z = z_norm1(u, 0.0, &b);
    for (size_t k = 0; k < g.points(); k += 13) {
        CHECK(dn[k] == doctest::Approx(std::abs(a.at(0, k)) + std::abs(u.f_x1.at(0, k)) + std::abs(u.f_x2.at(0, k))));
        CHECK(z[k] >= std::abs(a.at(0, k)) + std::abs(a.at(0, k)));
    }
    CHECK(b < kBoundaryMassThreshold);
}
