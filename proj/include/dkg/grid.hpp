#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace dkg {

using cplx = std::complex<double>;

/// Periodic square box [-L/2, L/2)^2 sampled on n x n points, row-major with
/// the first index along x1. Carries the FFT plans shared by every field on it.
///
/// Fourier convention: forward transform carries e^{-i xi.x}, so d_j -> i xi_j.
/// The Nyquist wavenumber is mapped to 0 for differentiation and for every
/// symbol built from xi, which keeps real fields real and makes d1 d2 = d2 d1
/// exactly on the grid.
class Grid {
public:
    Grid(int n, double length);

    int n() const { return n_; }
    double length() const { return length_; }
    double dx() const { return length_ / n_; }
    size_t points() const { return static_cast<size_t>(n_) * static_cast<size_t>(n_); }
    double cell_weight() const { return dx() * dx(); }

    size_t index(int i1, int i2) const { return static_cast<size_t>(i1) * static_cast<size_t>(n_) + static_cast<size_t>(i2); }

    /// Signed mode number k in [-n/2, n/2) for array position idx.
    int mode(int idx) const { return idx < n_ / 2 ? idx : idx - n_; }
    /// 2 pi k / L, with the Nyquist mode mapped to zero.
    double wavenumber(int idx) const { return (*wavenumbers_)[static_cast<size_t>(idx)]; }
    /// Physical coordinate of a grid line, box centre at 0.
    double coordinate(int idx) const { return (idx - n_ / 2) * dx(); }

    /// Unnormalised forward DFT.
    void forward(std::span<const cplx> in, std::span<cplx> out) const;
    /// Inverse DFT including the 1/n^2 factor.
    void inverse(std::span<const cplx> in, std::span<cplx> out) const;

    friend bool operator==(const Grid& a, const Grid& b) { return a.n_ == b.n_ && a.length_ == b.length_; }

private:
    struct Plans;

    int n_;
    double length_;
    std::shared_ptr<const std::vector<double>> wavenumbers_;
    std::shared_ptr<const Plans> plans_;
};

}  // namespace dkg
