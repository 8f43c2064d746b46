#pragma once

#include <array>
#include <complex>

namespace dkg {

using cplx = std::complex<double>;

/// Dense 2x2 complex matrix, row-major.
struct Mat2 {
    std::array<cplx, 4> a{};

    static Mat2 identity() { return {{1.0, 0.0, 0.0, 1.0}}; }
    static Mat2 zero() { return {}; }

    cplx& operator()(int r, int c) { return a[static_cast<size_t>(2 * r + c)]; }
    const cplx& operator()(int r, int c) const { return a[static_cast<size_t>(2 * r + c)]; }

    Mat2 adjoint() const {
        return {{std::conj(a[0]), std::conj(a[2]), std::conj(a[1]), std::conj(a[3])}};
    }

    /// Largest entry modulus.
    double max_abs() const;

    /// (x, y) -> M (x, y)^T
    std::array<cplx, 2> apply(cplx x, cplx y) const {
        return {a[0] * x + a[1] * y, a[2] * x + a[3] * y};
    }

    friend Mat2 operator+(const Mat2& l, const Mat2& r);
    friend Mat2 operator-(const Mat2& l, const Mat2& r);
    friend Mat2 operator*(const Mat2& l, const Mat2& r);
    friend Mat2 operator*(cplx s, const Mat2& m);
    friend bool operator==(const Mat2&, const Mat2&) = default;
};

using Vec2 = std::array<double, 2>;

/// The three Hermitian matrices alpha1, alpha2, beta satisfying the 2D Dirac
/// algebra: each squares to I and they pairwise anticommute.
class CliffordRep {
public:
    /// Pauli choice: alpha1 = sigma_x, alpha2 = sigma_y, beta = sigma_z.
    static CliffordRep pauli();

    /// Validates the algebra; throws DkgError(ConfigError) if it does not hold
    /// to `tol`.
    static CliffordRep from_matrices(const Mat2& alpha1, const Mat2& alpha2,
                                     const Mat2& beta, double tol = 1e-12);

    /// No validation. Used to exercise the residual checks against broken input.
    static CliffordRep unchecked(const Mat2& alpha1, const Mat2& alpha2, const Mat2& beta) {
        return CliffordRep(alpha1, alpha2, beta);
    }

    const Mat2& alpha1() const { return alpha1_; }
    const Mat2& alpha2() const { return alpha2_; }
    const Mat2& beta() const { return beta_; }
    const Mat2& alpha(int axis) const { return axis == 1 ? alpha1_ : alpha2_; }

    /// Max deviation over Hermiticity, squares and anticommutators.
    double invariant_residual() const;

private:
    CliffordRep(const Mat2& a1, const Mat2& a2, const Mat2& b) : alpha1_(a1), alpha2_(a2), beta_(b) {}

    Mat2 alpha1_;
    Mat2 alpha2_;
    Mat2 beta_;
};

CliffordRep default_rep();

/// H(xi) = xi1 alpha1 + xi2 alpha2 + M beta. With d_j -> i xi_j the free Dirac
/// equation reads d_t psi_hat = -i H(xi) psi_hat.
Mat2 dirac_spatial_symbol(const CliffordRep& rep, double mass, Vec2 xi);

/// max |H(xi)^2 - (M^2 + |xi|^2) I|
double squaring_residual(const CliffordRep& rep, double mass, Vec2 xi);

/// exp(-i t H(xi)) = cos(t w) I - i sin(t w)/w H(xi), w = sqrt(M^2 + |xi|^2).
/// Exact only when the representation satisfies the algebra.
Mat2 dirac_symbol_exponential(const CliffordRep& rep, double mass, Vec2 xi, double t);

/// t * sin(x)/x at x = t*w, with a Taylor branch for |x| < 1e-4.
double sin_over_omega(double t, double omega);

}  // namespace dkg
