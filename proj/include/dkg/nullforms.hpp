#pragma once

#include <cmath>
#include <stdexcept>
#include <type_traits>

#include "dkg/field.hpp"

namespace dkg {

/// A field with its first space-time derivatives (d_t, d_1, d_2). The time
/// derivative comes from the evolution equations, never from differencing.
template <class F>
struct Jet1 {
    F f;
    F f_t;
    F f_x1;
    F f_x2;

    /// d_a for a = 0 (time), 1, 2.
    const F& d(int a) const {
        switch (a) {
            case 0: return f_t;
            case 1: return f_x1;
            case 2: return f_x2;
        }
        throw std::invalid_argument("Jet1::d: index must be 0, 1 or 2");
    }
};

template <class F>
Jet1<F> make_jet1(const F& f, const F& f_t) {
    auto grad = gradient(f);
    return Jet1<F>{f, f_t, std::move(grad[0]), std::move(grad[1])};
}

namespace detail {

template <class A, class B>
struct product_field;

template <class TA, int CA, class TB, int CB>
struct product_field<Field<TA, CA>, Field<TB, CB>> {
    static_assert(CA == 1 || CB == 1 || CA == CB);
    using value_type = std::conditional_t<std::is_same_v<TA, double> && std::is_same_v<TB, double>, double, cplx>;
    using type = Field<value_type, (CA > CB ? CA : CB)>;
};

/// Component index of an operand under broadcasting of single-component fields.
template <class F>
constexpr int operand_component(int c) {
    return F::components == 1 ? 0 : c;
}

}  // namespace detail

/// Result type of a pointwise product: scalars broadcast over spinor components.
template <class A, class B>
using ProductField = typename detail::product_field<A, B>::type;

/// Q0(u, v) = (d_t u)(d_t v) - (d_1 u)(d_1 v) - (d_2 u)(d_2 v).
template <class A, class B>
ProductField<A, B> q0(const Jet1<A>& u, const Jet1<B>& v) {
    using R = ProductField<A, B>;
    R out(u.f.grid());
    for (int c = 0; c < R::components; ++c) {
        const int cu = detail::operand_component<A>(c), cv = detail::operand_component<B>(c);
        for (size_t k = 0; k < out.plane_size(); ++k) {
            out.at(c, k) = u.f_t.at(cu, k) * v.f_t.at(cv, k) - u.f_x1.at(cu, k) * v.f_x1.at(cv, k) -
                           u.f_x2.at(cu, k) * v.f_x2.at(cv, k);
        }
    }
    return out;
}

/// Q_ab(u, v) = (d_a u)(d_b v) - (d_b u)(d_a v), a, b in {0, 1, 2}.
template <class A, class B>
ProductField<A, B> qab(int a, int b, const Jet1<A>& u, const Jet1<B>& v) {
    using R = ProductField<A, B>;
    R out(u.f.grid());
    const A& ua = u.d(a);
    const A& ub = u.d(b);
    const B& va = v.d(a);
    const B& vb = v.d(b);
    for (int c = 0; c < R::components; ++c) {
        const int cu = detail::operand_component<A>(c), cv = detail::operand_component<B>(c);
        for (size_t k = 0; k < out.plane_size(); ++k) {
            out.at(c, k) = ua.at(cu, k) * vb.at(cv, k) - ub.at(cu, k) * va.at(cv, k);
        }
    }
    return out;
}

inline constexpr double kNullRatioFloor = 1e-14;

struct NullRatio {
    double ratio = 0.0;
    /// False when either operand trips the boundary-mass monitor.
    bool reliable = true;
    double boundary_fraction = 0.0;
};

/// Pointwise |u|_1 = |u| + sum_j |Z_j u| over the six commuting fields.
template <class F>
std::vector<double> z_norm1(const Jet1<F>& u, double t, double* boundary_fraction) {
    auto total = pointwise_modulus(u.f);
    double frac = 0.0;
    for (int j = 1; j <= 6; ++j) {
        const auto z = vectorfield_apply(j, u.f, u.f_t, t);
        frac = std::max(frac, z.boundary_fraction);
        const auto mod = pointwise_modulus(z.value);
        for (size_t k = 0; k < total.size(); ++k) total[k] += mod[k];
    }
    if (boundary_fraction) *boundary_fraction = frac;
    return total;
}

/// Pointwise |d u| = sum_a |d_a u|.
template <class F>
std::vector<double> d_norm(const Jet1<F>& u) {
    std::vector<double> total(u.f.plane_size(), 0.0);
    for (int a = 0; a < 3; ++a) {
        const auto mod = pointwise_modulus(u.d(a));
        for (size_t k = 0; k < total.size(); ++k) total[k] += mod[k];
    }
    return total;
}

/// max_x |Q_ab(u,v)| <|t| + |x|> / (|u|_1 |dv| + |du| |v|_1 + floor), the
/// quantity that stays bounded in time when the strong null form gains a
/// factor <t + |x|>^{-1}.
template <class A, class B>
NullRatio strong_null_ratio(int a, int b, const Jet1<A>& u, const Jet1<B>& v, double t) {
    const Grid& g = u.f.grid();
    const int n = g.n();
    double fu = 0.0, fv = 0.0;
    const auto u1 = z_norm1(u, t, &fu);
    const auto v1 = z_norm1(v, t, &fv);
    const auto du = d_norm(u);
    const auto dv = d_norm(v);
    const auto q = pointwise_modulus(qab(a, b, u, v));
    NullRatio r;
    r.boundary_fraction = std::max(fu, fv);
    r.reliable = r.boundary_fraction <= kBoundaryMassThreshold;
    for (int i1 = 0; i1 < n; ++i1)
        for (int i2 = 0; i2 < n; ++i2) {
            const size_t k = g.index(i1, i2);
            const double x1 = g.coordinate(i1), x2 = g.coordinate(i2);
            const double s = std::abs(t) + std::sqrt(x1 * x1 + x2 * x2);
            const double weight = std::sqrt(1.0 + s * s);
            const double den = u1[k] * dv[k] + du[k] * v1[k] + kNullRatioFloor;
            r.ratio = std::max(r.ratio, q[k] * weight / den);
        }
    return r;
}

}  // namespace dkg
