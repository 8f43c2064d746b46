#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "dkg/grid.hpp"

namespace dkg {

/// Grid function with `C` components of type `T`, stored component-major:
/// component c occupies [c*n*n, (c+1)*n*n), each plane row-major.
template <class T, int C>
class Field {
    static_assert(C == 1 || C == 2);

public:
    using value_type = T;
    static constexpr int components = C;

    explicit Field(const Grid& grid) : grid_(grid), values_(static_cast<size_t>(C) * grid.points(), T{}) {}

    Field(const Grid& grid, std::vector<T> values) : grid_(grid), values_(std::move(values)) {
        if (values_.size() != static_cast<size_t>(C) * grid_.points()) {
            throw std::invalid_argument("Field: value count does not match grid");
        }
    }

    const Grid& grid() const { return grid_; }
    size_t plane_size() const { return grid_.points(); }

    std::span<T> component(int c) {
        return std::span<T>(values_).subspan(static_cast<size_t>(c) * plane_size(), plane_size());
    }
    std::span<const T> component(int c) const {
        return std::span<const T>(values_).subspan(static_cast<size_t>(c) * plane_size(), plane_size());
    }

    std::vector<T>& values() { return values_; }
    const std::vector<T>& values() const { return values_; }

    T& at(int c, size_t i) { return values_[static_cast<size_t>(c) * plane_size() + i]; }
    const T& at(int c, size_t i) const { return values_[static_cast<size_t>(c) * plane_size() + i]; }

    bool is_finite() const {
        return std::all_of(values_.begin(), values_.end(), [](const T& v) {
            if constexpr (std::is_same_v<T, double>) {
                return std::isfinite(v);
            } else {
                return std::isfinite(v.real()) && std::isfinite(v.imag());
            }
        });
    }

    Field& operator+=(const Field& o) {
        for (size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
        return *this;
    }
    Field& operator-=(const Field& o) {
        for (size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
        return *this;
    }
    Field& operator*=(T s) {
        for (auto& v : values_) v *= s;
        return *this;
    }

    friend Field operator+(Field a, const Field& b) { return a += b; }
    friend Field operator-(Field a, const Field& b) { return a -= b; }
    friend Field operator*(T s, Field a) { return a *= s; }

private:
    Grid grid_;
    std::vector<T> values_;
};

using ScalarField = Field<double, 1>;
using ComplexField = Field<cplx, 1>;
using SpinorField = Field<cplx, 2>;

// ---------------------------------------------------------------------------
// Spectral plumbing

/// Forward DFT of one component.
template <class T, int C>
std::vector<cplx> spectrum(const Field<T, C>& f, int c) {
    std::vector<cplx> plane(f.plane_size());
    const auto src = f.component(c);
    std::copy(src.begin(), src.end(), plane.begin());
    f.grid().forward(plane, plane);
    return plane;
}

/// Inverse DFT into one component; real fields keep the real part.
template <class T, int C>
void assign_from_spectrum(Field<T, C>& f, int c, std::vector<cplx> spec) {
    f.grid().inverse(spec, spec);
    auto dst = f.component(c);
    for (size_t i = 0; i < dst.size(); ++i) {
        if constexpr (std::is_same_v<T, double>) {
            dst[i] = spec[i].real();
        } else {
            dst[i] = spec[i];
        }
    }
}

/// Applies `mult(k1_idx, k2_idx, value)` to every Fourier coefficient of every
/// component and transforms back.
template <class T, int C, class Mult>
Field<T, C> apply_multiplier(const Field<T, C>& f, Mult&& mult) {
    Field<T, C> out(f.grid());
    const int n = f.grid().n();
    for (int c = 0; c < C; ++c) {
        auto spec = spectrum(f, c);
        for (int i1 = 0; i1 < n; ++i1)
            for (int i2 = 0; i2 < n; ++i2) {
                auto& z = spec[f.grid().index(i1, i2)];
                z = mult(i1, i2, z);
            }
        assign_from_spectrum(out, c, std::move(spec));
    }
    return out;
}

/// Exact derivative of the trigonometric interpolant along axis 1 or 2.
template <class T, int C>
Field<T, C> spectral_derivative(const Field<T, C>& f, int axis) {
    const Grid& g = f.grid();
    const cplx I{0.0, 1.0};
    return apply_multiplier(f, [&](int i1, int i2, cplx z) {
        return I * g.wavenumber(axis == 1 ? i1 : i2) * z;
    });
}

/// Both first derivatives with a single forward transform per component.
template <class T, int C>
std::array<Field<T, C>, 2> gradient(const Field<T, C>& f) {
    const Grid& g = f.grid();
    const int n = g.n();
    const cplx I{0.0, 1.0};
    std::array<Field<T, C>, 2> out{Field<T, C>(g), Field<T, C>(g)};
    for (int c = 0; c < C; ++c) {
        const auto spec = spectrum(f, c);
        std::vector<cplx> d1(spec.size()), d2(spec.size());
        for (int i1 = 0; i1 < n; ++i1)
            for (int i2 = 0; i2 < n; ++i2) {
                const size_t k = g.index(i1, i2);
                d1[k] = I * g.wavenumber(i1) * spec[k];
                d2[k] = I * g.wavenumber(i2) * spec[k];
            }
        assign_from_spectrum(out[0], c, std::move(d1));
        assign_from_spectrum(out[1], c, std::move(d2));
    }
    return out;
}

/// Spectral Laplacian, consistent with applying spectral_derivative twice.
template <class T, int C>
Field<T, C> laplacian(const Field<T, C>& f) {
    const Grid& g = f.grid();
    return apply_multiplier(f, [&](int i1, int i2, cplx z) {
        const double k1 = g.wavenumber(i1), k2 = g.wavenumber(i2);
        return -(k1 * k1 + k2 * k2) * z;
    });
}

/// Two-thirds rule: zero every mode with max(|k1|, |k2|) > n/3.
template <class T, int C>
Field<T, C> dealias(const Field<T, C>& f) {
    const Grid& g = f.grid();
    const int n = g.n();
    return apply_multiplier(f, [&](int i1, int i2, cplx z) {
        const int k = std::max(std::abs(g.mode(i1)), std::abs(g.mode(i2)));
        return 3 * k > n ? cplx{} : z;
    });
}

/// True when mode position (i1, i2) survives the two-thirds rule.
inline bool dealias_keeps(const Grid& g, int i1, int i2) {
    const int k = std::max(std::abs(g.mode(i1)), std::abs(g.mode(i2)));
    return 3 * k <= g.n();
}

/// || (1 + |xi|^2)^{s/2} f_hat ||, normalised so that s = 0 is the discrete L2
/// norm with quadrature weight (L/n)^2. Negative s is accepted (dual norms).
template <class T, int C>
double sobolev_norm(const Field<T, C>& f, int s) {
    if (s < -8 || s > 8) throw std::invalid_argument("sobolev_norm: index outside [-8, 8]");
    const Grid& g = f.grid();
    const int n = g.n();
    double acc = 0.0;
    for (int c = 0; c < C; ++c) {
        const auto spec = spectrum(f, c);
        for (int i1 = 0; i1 < n; ++i1)
            for (int i2 = 0; i2 < n; ++i2) {
                const double k1 = g.wavenumber(i1), k2 = g.wavenumber(i2);
                const double w = std::pow(1.0 + k1 * k1 + k2 * k2, s);
                acc += w * std::norm(spec[g.index(i1, i2)]);
            }
    }
    return std::sqrt(acc * g.cell_weight() / static_cast<double>(g.points()));
}

/// Pointwise modulus |f(x)|, the C^C Euclidean norm for multi-component fields.
template <class T, int C>
std::vector<double> pointwise_modulus(const Field<T, C>& f) {
    std::vector<double> out(f.plane_size(), 0.0);
    for (int c = 0; c < C; ++c) {
        const auto comp = f.component(c);
        for (size_t i = 0; i < out.size(); ++i) out[i] += std::norm(comp[i]);
    }
    for (auto& v : out) v = std::sqrt(v);
    return out;
}

template <class T, int C>
double l2_norm(const Field<T, C>& f) {
    double acc = 0.0;
    for (const auto& v : f.values()) acc += std::norm(v);
    return std::sqrt(acc * f.grid().cell_weight());
}

template <class T, int C>
double sup_norm(const Field<T, C>& f) {
    const auto mod = pointwise_modulus(f);
    return mod.empty() ? 0.0 : *std::max_element(mod.begin(), mod.end());
}

// ---------------------------------------------------------------------------
// Commuting vector fields

/// Cells per side counted as the seam band for the boundary-mass monitor.
inline constexpr int kSeamBandCells = 2;
/// Boundary-mass fraction above which coordinate multipliers are unreliable.
inline constexpr double kBoundaryMassThreshold = 1e-8;

/// Fraction of the L2 mass int |f|^2 carried by the cells within
/// kSeamBandCells of the periodic seam. Zero for the zero field.
template <class T, int C>
double boundary_mass_fraction(const Field<T, C>& f) {
    const Grid& g = f.grid();
    const int n = g.n();
    const auto mod = pointwise_modulus(f);
    double total = 0.0, band = 0.0;
    for (int i1 = 0; i1 < n; ++i1)
        for (int i2 = 0; i2 < n; ++i2) {
            const double w = mod[g.index(i1, i2)] * mod[g.index(i1, i2)];
            total += w;
            const bool edge = std::min(i1, n - 1 - i1) < kSeamBandCells || std::min(i2, n - 1 - i2) < kSeamBandCells;
            if (edge) band += w;
        }
    return total > 0.0 ? band / total : 0.0;
}

template <class F>
struct VectorFieldResult {
    F value;
    double boundary_fraction = 0.0;
    bool boundary_warning = false;
};

/// Z_j f for Z = (d_0, d_1, d_2, Omega_01, Omega_02, Omega_12), j = 1..6, with
/// x_0 = -t and Omega_ab = x_a d_b - x_b d_a. df_dt is the time derivative from
/// the evolution equations. Coordinates are measured from the box centre.
template <class T, int C>
VectorFieldResult<Field<T, C>> vectorfield_apply(int j, const Field<T, C>& f, const Field<T, C>& df_dt, double t) {
    if (j < 1 || j > 6) throw std::invalid_argument("vectorfield_apply: index must be 1..6");
    const Grid& g = f.grid();
    const int n = g.n();
    VectorFieldResult<Field<T, C>> r{Field<T, C>(g)};
    r.boundary_fraction = boundary_mass_fraction(f);
    r.boundary_warning = r.boundary_fraction > kBoundaryMassThreshold;

    if (j == 1) {
        r.value = df_dt;
        return r;
    }
    if (j == 2 || j == 3) {
        r.value = spectral_derivative(f, j - 1);
        return r;
    }
    const auto grad = gradient(f);
    for (int c = 0; c < C; ++c)
        for (int i1 = 0; i1 < n; ++i1)
            for (int i2 = 0; i2 < n; ++i2) {
                const size_t k = g.index(i1, i2);
                const double x1 = g.coordinate(i1), x2 = g.coordinate(i2);
                T v{};
                switch (j) {
                    case 4: v = -t * grad[0].at(c, k) - x1 * df_dt.at(c, k); break;
                    case 5: v = -t * grad[1].at(c, k) - x2 * df_dt.at(c, k); break;
                    default: v = x1 * grad[1].at(c, k) - x2 * grad[0].at(c, k); break;
                }
                r.value.at(c, k) = v;
            }
    return r;
}

// ---------------------------------------------------------------------------
// Conversions

inline ComplexField complexify(const ScalarField& f) {
    std::vector<cplx> v(f.values().begin(), f.values().end());
    return ComplexField(f.grid(), std::move(v));
}

/// Real part; `max_imag` receives the largest discarded imaginary part.
inline ScalarField real_part(const ComplexField& f, double* max_imag = nullptr) {
    ScalarField out(f.grid());
    double mi = 0.0;
    for (size_t i = 0; i < f.plane_size(); ++i) {
        out.at(0, i) = f.at(0, i).real();
        mi = std::max(mi, std::abs(f.at(0, i).imag()));
    }
    if (max_imag) *max_imag = mi;
    return out;
}

}  // namespace dkg
