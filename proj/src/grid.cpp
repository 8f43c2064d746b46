#include "dkg/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <utility>

#include "dkg/error.hpp"

namespace dkg {

namespace {

// FFTW's planner is not re-entrant; execution with the new-array interface is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

struct Grid::Plans {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
    fftw_plan fwd_inplace = nullptr;
    fftw_plan bwd_inplace = nullptr;

    explicit Plans(int n) {
        std::lock_guard lock(planner_mutex());
        auto* buf_in = fftw_alloc_complex(static_cast<size_t>(n) * static_cast<size_t>(n));
        auto* buf_out = fftw_alloc_complex(static_cast<size_t>(n) * static_cast<size_t>(n));
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        fwd = fftw_plan_dft_2d(n, n, buf_in, buf_out, FFTW_FORWARD, flags);
        bwd = fftw_plan_dft_2d(n, n, buf_in, buf_out, FFTW_BACKWARD, flags);
        fwd_inplace = fftw_plan_dft_2d(n, n, buf_in, buf_in, FFTW_FORWARD, flags);
        bwd_inplace = fftw_plan_dft_2d(n, n, buf_in, buf_in, FFTW_BACKWARD, flags);
        fftw_free(buf_in);
        fftw_free(buf_out);
    }
    ~Plans() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
        fftw_destroy_plan(fwd_inplace);
        fftw_destroy_plan(bwd_inplace);
    }
    Plans(const Plans&) = delete;
    Plans& operator=(const Plans&) = delete;
};

Grid::Grid(int n, double length) : n_(n), length_(length) {
    if (n < 16 || (n & (n - 1)) != 0) {
        fail(ErrorCategory::ConfigError, "grid size n must be a power of two >= 16, got " + std::to_string(n));
    }
    if (!(length > 0.0) || !std::isfinite(length)) {
        fail(ErrorCategory::ConfigError, "box length L must be positive");
    }
    auto k = std::make_shared<std::vector<double>>(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        const int m = mode(i);
        (*k)[static_cast<size_t>(i)] = (m == -n / 2) ? 0.0 : 2.0 * std::numbers::pi * m / length;
    }
    wavenumbers_ = std::move(k);
    static std::mutex cache_mutex;
    static std::map<int, std::weak_ptr<const Plans>> cache;
    std::lock_guard lock(cache_mutex);
    auto& slot = cache[n];
    auto p = slot.lock();
    if (!p) {
        p = std::make_shared<const Plans>(n);
        slot = p;
    }
    plans_ = std::move(p);
}

namespace {

// Out-of-place c2c execution preserves its input, so the const_cast is safe.
void execute(fftw_plan out_of_place, fftw_plan in_place, std::span<const cplx> in, std::span<cplx> out) {
    auto* src = reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data()));
    auto* dst = reinterpret_cast<fftw_complex*>(out.data());
    fftw_execute_dft(src == dst ? in_place : out_of_place, src, dst);
}

}  // namespace

void Grid::forward(std::span<const cplx> in, std::span<cplx> out) const {
    execute(plans_->fwd, plans_->fwd_inplace, in, out);
}

void Grid::inverse(std::span<const cplx> in, std::span<cplx> out) const {
    execute(plans_->bwd, plans_->bwd_inplace, in, out);
    const double scale = 1.0 / static_cast<double>(points());
    for (auto& z : out) z *= scale;
}

}  // namespace dkg
