#include "dkg/clifford.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dkg/error.hpp"

namespace dkg {

double Mat2::max_abs() const {
    double m = 0.0;
    for (const auto& z : a) m = std::max(m, std::abs(z));
    return m;
}

Mat2 operator+(const Mat2& l, const Mat2& r) {
    Mat2 out;
    for (size_t i = 0; i < 4; ++i) out.a[i] = l.a[i] + r.a[i];
    return out;
}

Mat2 operator-(const Mat2& l, const Mat2& r) {
    Mat2 out;
    for (size_t i = 0; i < 4; ++i) out.a[i] = l.a[i] - r.a[i];
    return out;
}

Mat2 operator*(const Mat2& l, const Mat2& r) {
    Mat2 out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) out(i, j) = l(i, 0) * r(0, j) + l(i, 1) * r(1, j);
    return out;
}

Mat2 operator*(cplx s, const Mat2& m) {
    Mat2 out;
    for (size_t i = 0; i < 4; ++i) out.a[i] = s * m.a[i];
    return out;
}

CliffordRep CliffordRep::pauli() {
    const cplx i{0.0, 1.0};
    Mat2 a1{{0.0, 1.0, 1.0, 0.0}};
    Mat2 a2{{0.0, -i, i, 0.0}};
    Mat2 b{{1.0, 0.0, 0.0, -1.0}};
    return CliffordRep(a1, a2, b);
}

CliffordRep CliffordRep::from_matrices(const Mat2& alpha1, const Mat2& alpha2, const Mat2& beta,
                                       double tol) {
    CliffordRep rep(alpha1, alpha2, beta);
    const double r = rep.invariant_residual();
    if (!(r <= tol)) {
        fail(ErrorCategory::ConfigError,
             "matrices do not satisfy the Dirac algebra (residual " + std::to_string(r) + ")");
    }
    return rep;
}

double CliffordRep::invariant_residual() const {
    const Mat2 id = Mat2::identity();
    const std::array<const Mat2*, 3> ms{&alpha1_, &alpha2_, &beta_};
    double r = 0.0;
    for (const Mat2* m : ms) {
        r = std::max(r, (*m - m->adjoint()).max_abs());
        r = std::max(r, (*m * *m - id).max_abs());
    }
    for (size_t i = 0; i < 3; ++i)
        for (size_t j = i + 1; j < 3; ++j)
            r = std::max(r, (*ms[i] * *ms[j] + *ms[j] * *ms[i]).max_abs());
    return r;
}

CliffordRep default_rep() { return CliffordRep::pauli(); }

Mat2 dirac_spatial_symbol(const CliffordRep& rep, double mass, Vec2 xi) {
    return cplx(xi[0]) * rep.alpha1() + cplx(xi[1]) * rep.alpha2() + cplx(mass) * rep.beta();
}

double squaring_residual(const CliffordRep& rep, double mass, Vec2 xi) {
    const Mat2 h = dirac_spatial_symbol(rep, mass, xi);
    const double w2 = mass * mass + xi[0] * xi[0] + xi[1] * xi[1];
    return (h * h - cplx(w2) * Mat2::identity()).max_abs();
}

double sin_over_omega(double t, double omega) {
    const double x = t * omega;
    if (std::abs(x) < 1e-4) {
        const double x2 = x * x;
        return t * (1.0 - x2 / 6.0 + x2 * x2 / 120.0);
    }
    return std::sin(x) / omega;
}

Mat2 dirac_symbol_exponential(const CliffordRep& rep, double mass, Vec2 xi, double t) {
    const double w = std::sqrt(mass * mass + xi[0] * xi[0] + xi[1] * xi[1]);
    const Mat2 h = dirac_spatial_symbol(rep, mass, xi);
    return cplx(std::cos(t * w)) * Mat2::identity() - cplx(0.0, sin_over_omega(t, w)) * h;
}

}  // namespace dkg
