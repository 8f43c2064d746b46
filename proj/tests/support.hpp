#pragma once

#include <cmath>
#include <optional>
#include <random>

#include "dkg/error.hpp"
#include "dkg/field.hpp"
#include "dkg/state.hpp"

namespace dkg::test {

/// Smooth random spinor with Gaussian spectral decay, deterministic in `seed`.
inline SpinorField random_spinor(const Grid& g, unsigned seed, double decay = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    SpinorField f(g);
    for (int c = 0; c < 2; ++c) {
        std::vector<cplx> spec(g.points());
        for (int i1 = 0; i1 < g.n(); ++i1)
            for (int i2 = 0; i2 < g.n(); ++i2) {
                const double k1 = g.wavenumber(i1), k2 = g.wavenumber(i2);
                spec[g.index(i1, i2)] = std::exp(-decay * (k1 * k1 + k2 * k2)) * cplx(gauss(rng), gauss(rng));
            }
        assign_from_spectrum(f, c, std::move(spec));
    }
    return f;
}

inline ScalarField random_scalar(const Grid& g, unsigned seed, double decay = 1.0) {
    const SpinorField s = random_spinor(g, seed, decay);
    ScalarField f(g);
    for (size_t k = 0; k < f.plane_size(); ++k) f.at(0, k) = s.at(0, k).real();
    return f;
}

/// Centred Gaussian exp(-|x|^2 / w^2) without the configuration checks, for
/// small grids in unit tests.
inline ScalarField gaussian(const Grid& g, double amplitude, double width, double shift1 = 0.0) {
    ScalarField f(g);
    for (int i1 = 0; i1 < g.n(); ++i1)
        for (int i2 = 0; i2 < g.n(); ++i2) {
            const double x1 = g.coordinate(i1) - shift1, x2 = g.coordinate(i2);
            f.at(0, g.index(i1, i2)) = amplitude * std::exp(-(x1 * x1 + x2 * x2) / (width * width));
        }
    return f;
}

/// psi = (a G, i b G') and phi = c G with G' shifted, phi_t = 0.
inline DkgState small_state(const Grid& g, double eps, double width = 2.5) {
    DkgState s{SpinorField(g), ScalarField(g), ScalarField(g), 0.0, 0.0};
    const ScalarField a = gaussian(g, eps, width);
    const ScalarField b = gaussian(g, 0.5 * eps, width, 1.0);
    for (size_t k = 0; k < g.points(); ++k) {
        s.psi.at(0, k) = a.at(0, k);
        s.psi.at(1, k) = cplx(0.0, b.at(0, k));
        s.phi.at(0, k) = 0.8 * a.at(0, k);
    }
    return s;
}

template <class T, int C>
double rel_l2(const Field<T, C>& a, const Field<T, C>& b) {
    const double nb = l2_norm(b);
    return l2_norm(a - b) / (nb > 0.0 ? nb : 1.0);
}

/// Category of the DkgError thrown by `fn`, or nullopt if it returns normally.
template <class Fn>
std::optional<ErrorCategory> category_of(Fn&& fn) {
    try {
        fn();
    } catch (const DkgError& e) {
        return e.category();
    }
    return std::nullopt;
}

}  // namespace dkg::test
