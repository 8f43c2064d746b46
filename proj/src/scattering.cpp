#include "dkg/scattering.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "dkg/error.hpp"
#include "dkg/propagators.hpp"

namespace dkg {

double fit_loglog_slope(std::span<const double> t, std::span<const double> y, double t_lo, double t_hi) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int count = 0;
    for (size_t i = 0; i < std::min(t.size(), y.size()); ++i) {
        if (t[i] < t_lo || t[i] > t_hi || !(t[i] > 0.0) || !(y[i] > 0.0)) continue;
        const double lx = std::log(t[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++count;
    }
    if (count < 2) return std::numeric_limits<double>::quiet_NaN();
    const double denom = count * sxx - sx * sx;
    if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return (count * sxy - sx * sy) / denom;
}

namespace {

/// Cumulative trapezoid sums at the full stride and at twice the stride.
template <class F>
class TrapezoidAccumulator {
public:
    void add(size_t i, double h, const F& f) {
        if (!fine_) {
            fine_ = 0.0 * f;
            coarse_ = 0.0 * f;
        } else {
            *fine_ += (0.5 * h) * (*prev_ + f);
        }
        if (i % 2 == 0) {
            if (prev_even_) *coarse_ += h * (*prev_even_ + f);
            prev_even_ = f;
            coarse_valid_ = true;
        } else {
            coarse_valid_ = false;
        }
        prev_ = f;
    }

    const F& fine() const { return *fine_; }
    /// Only meaningful when the last sample had an even index.
    const F* coarse() const { return coarse_valid_ ? &*coarse_ : nullptr; }

private:
    std::optional<F> fine_, coarse_, prev_, prev_even_;
    bool coarse_valid_ = false;
};

struct KgPair {
    ScalarField a;
    ScalarField b;
};

KgPair operator*(double s, KgPair p) { return {s * std::move(p.a), s * std::move(p.b)}; }
KgPair operator+(KgPair p, const KgPair& q) { return {std::move(p.a) + q.a, std::move(p.b) + q.b}; }
KgPair& operator+=(KgPair& p, const KgPair& q) {
    p.a += q.a;
    p.b += q.b;
    return p;
}

double l2_pair(const KgPair& p, const KgPair& q) {
    const double a = l2_norm(p.a - q.a), b = l2_norm(p.b - q.b);
    return std::sqrt(a * a + b * b);
}

TailReport tail_report(const std::vector<double>& t, const std::vector<double>& defect, const ExtractOptions& opts,
                       const char* which) {
    TailReport r;
    size_t first = 0;
    while (first + 1 < t.size() && t[first] < opts.transient) ++first;
    r.t_first = t[first];
    r.defect_first = defect[first];
    r.t_last = t.back();
    r.defect_last = defect.back();
    const double slope = fit_loglog_slope(t, defect, r.t_first, r.t_last);
    r.decay_slope = std::isfinite(slope) ? slope : 0.0;
    r.delta_fit = std::clamp(r.decay_slope + 2.0, 0.0, 0.99);
    r.tail_bound = r.defect_last * std::sqrt(1.0 + r.t_last * r.t_last) / (1.0 - r.delta_fit);
    r.converged = r.defect_last <= opts.tail_ratio * r.defect_first;
    if (!r.converged && opts.enforce_tail) {
        std::ostringstream os;
        os << which << " defect decayed only from " << r.defect_first << " (t = " << r.t_first << ") to "
           << r.defect_last << " (t = " << r.t_last << "); required ratio " << opts.tail_ratio;
        fail(ErrorCategory::TailNotConverged, os.str());
    }
    return r;
}

struct JointExtraction {
    std::optional<DiracExtraction> dirac;
    std::optional<KgExtraction> kg;
};

JointExtraction extract(const Trajectory& traj, const Couplings& c, const CliffordRep& rep,
                        const ExtractOptions& opts, bool want_dirac, bool want_kg) {
    if (traj.size() < 2) fail(ErrorCategory::ConfigError, "scattering extraction needs at least two snapshots");
    nf_coeffs(dirac_triple(c));
    nf_coeffs(kg_triple(c));

    const double h = traj.spacing();
    const size_t last = traj.size() - 1;
    TrapezoidAccumulator<SpinorField> dirac_acc;
    TrapezoidAccumulator<KgPair> kg_acc;
    std::vector<double> times, defect_d, defect_kg;
    std::optional<SpinorField> dirac_start;
    std::optional<KgPair> kg_start;
    double max_duhamel = 0.0;
    JointExtraction out;

    for (size_t i = 0; i <= last; ++i) {
        const DkgState& s = traj.state(i);
        const double t = s.t;
        const NormalFormFields nf = normal_form_fields(s, c, rep);
        times.push_back(t);
        defect_d.push_back(l2_norm(nf.dirac_defect));
        defect_kg.push_back(l2_norm(nf.kg_defect));

        if (want_dirac) {
            const SpinorField corrected = s.psi - nf.dirac_correction;
            const SpinorField pulled = dirac_propagate(corrected, c.M, -t, rep);
            if (i == 0) dirac_start = pulled;
            dirac_acc.add(i, h, dirac_propagate(nf.dirac_defect, c.M, -t, rep));
            max_duhamel = std::max(max_duhamel, l2_norm(pulled - (*dirac_start + dirac_acc.fine())));
            if (i == last) {
                DiracExtraction d{*dirac_start + dirac_acc.fine(), pulled, {}, 0.0, std::nullopt, max_duhamel};
                d.route_discrepancy = l2_norm(d.psi0_plus - d.psi0_plus_endpoint);
                if (const auto* coarse = dirac_acc.coarse()) {
                    d.stride_sensitivity = l2_norm(dirac_acc.fine() - *coarse);
                }
                out.dirac = std::move(d);
            }
        }
        if (want_kg) {
            auto [w0, w1] = kg_propagate(s.phi - nf.lambda_KG, s.phi_t - nf.lambda_KG_t, c.m, -t);
            KgPair pulled{std::move(w0), std::move(w1)};
            if (i == 0) kg_start = pulled;
            auto [f0, f1] = kg_propagate(ScalarField(s.grid()), nf.kg_defect, c.m, -t);
            kg_acc.add(i, h, KgPair{std::move(f0), std::move(f1)});
            if (i == last) {
                KgPair integral = *kg_start + kg_acc.fine();
                KgExtraction k{integral.a, integral.b, pulled.a, pulled.b, {}, 0.0, std::nullopt};
                k.route_discrepancy = l2_pair(integral, pulled);
                if (const auto* coarse = kg_acc.coarse()) k.stride_sensitivity = l2_pair(kg_acc.fine(), *coarse);
                out.kg = std::move(k);
            }
        }
    }
    if (out.dirac) out.dirac->tail = tail_report(times, defect_d, opts, "Dirac");
    if (out.kg) out.kg->tail = tail_report(times, defect_kg, opts, "Klein-Gordon");
    return out;
}

/// Free KG flow applied separately to the real and imaginary parts of a component.
std::pair<ComplexField, ComplexField> kg_propagate_complex(std::span<const cplx> f, const Grid& grid, double mass,
                                                           double t) {
    ScalarField re(grid), im(grid);
    for (size_t k = 0; k < f.size(); ++k) {
        re.at(0, k) = f[k].real();
        im.at(0, k) = f[k].imag();
    }
    const ScalarField zero(grid);
    const auto [re0, re1] = kg_propagate(re, zero, mass, t);
    const auto [im0, im1] = kg_propagate(im, zero, mass, t);
    ComplexField a(grid), b(grid);
    for (size_t k = 0; k < f.size(); ++k) {
        a.at(0, k) = cplx(re0.at(0, k), im0.at(0, k));
        b.at(0, k) = cplx(re1.at(0, k), im1.at(0, k));
    }
    return {a, b};
}

}  // namespace

DiracExtraction extract_dirac_state(const Trajectory& traj, const Couplings& c, const CliffordRep& rep,
                                    const ExtractOptions& opts) {
    return std::move(*extract(traj, c, rep, opts, true, false).dirac);
}

KgExtraction extract_kg_state(const Trajectory& traj, const Couplings& c, const CliffordRep& rep,
                              const ExtractOptions& opts) {
    return std::move(*extract(traj, c, rep, opts, false, true).kg);
}

std::vector<CurvePoint> convergence_curve(const Trajectory& traj, const SpinorField& psi0_plus,
                                          const ScalarField& phi0_plus, const ScalarField& phi1_plus,
                                          const Couplings& c, const CliffordRep& rep, int sigma) {
    std::vector<CurvePoint> curve;
    curve.reserve(traj.size());
    for (size_t i = 0; i < traj.size(); ++i) {
        const DkgState& s = traj.state(i);
        const SpinorField psi_plus = dirac_propagate(psi0_plus, c.M, s.t, rep);
        const auto [phi_plus, phi_t_plus] = kg_propagate(phi0_plus, phi1_plus, c.m, s.t);
        curve.push_back({s.t, sobolev_norm(s.psi - psi_plus, sigma),
                         sobolev_norm(s.phi - phi_plus, sigma) + sobolev_norm(s.phi_t - phi_t_plus, sigma - 1)});
    }
    return curve;
}

ScatterResult scatter(const Trajectory& traj, const Couplings& c, const CliffordRep& rep, int sigma,
                      const ExtractOptions& opts, double fit_start_fraction) {
    JointExtraction ex = extract(traj, c, rep, opts, true, true);
    ScatterResult r{ex.dirac->psi0_plus, ex.kg->phi0_plus, ex.kg->phi1_plus, {}, {}, sigma, 0.0, 0.0,
                    std::move(*ex.dirac), std::move(*ex.kg)};
    r.convergence_curve = convergence_curve(traj, r.psi0_plus, r.phi0_plus, r.phi1_plus, c, rep, sigma);
    std::vector<double> t, yd, yk;
    for (const auto& p : r.convergence_curve) {
        t.push_back(p.t);
        yd.push_back(p.dirac);
        yk.push_back(p.kg);
    }
    r.fit_end = t.back();
    r.fit_start = fit_start_fraction * r.fit_end;
    r.fitted_slopes = {fit_loglog_slope(t, yd, r.fit_start, r.fit_end), fit_loglog_slope(t, yk, r.fit_start, r.fit_end)};
    return r;
}

double dirac_equation_residual(const SpinorField& f, const SpinorField& f_t, double mass, const CliffordRep& rep) {
    const double norm = l2_norm(f);
    if (norm == 0.0) return 0.0;
    return l2_norm(f_t + dirac_spatial_operator(f, mass, rep)) / norm;
}

double free_dirac_residual(const SpinorField& psi0_plus, double mass, const CliffordRep& rep, double t_sample) {
    const SpinorField f = dirac_propagate(psi0_plus, mass, t_sample, rep);
    const Grid& g = f.grid();
    auto u = spectrum(f, 0);
    auto l = spectrum(f, 1);
    for (int i1 = 0; i1 < g.n(); ++i1)
        for (int i2 = 0; i2 < g.n(); ++i2) {
            const size_t k = g.index(i1, i2);
            const Mat2 H = dirac_spatial_symbol(rep, mass, {g.wavenumber(i1), g.wavenumber(i2)});
            const auto hv = H.apply(u[k], l[k]);
            u[k] = cplx(0.0, -1.0) * hv[0];
            l[k] = cplx(0.0, -1.0) * hv[1];
        }
    SpinorField f_t(g);
    assign_from_spectrum(f_t, 0, std::move(u));
    assign_from_spectrum(f_t, 1, std::move(l));
    return dirac_equation_residual(f, f_t, mass, rep);
}

double kg_componentwise_dirac_residual(const SpinorField& psi0_plus, double mass, const CliffordRep& rep,
                                       double t_sample) {
    const Grid& g = psi0_plus.grid();
    SpinorField f(g), f_t(g);
    for (int c = 0; c < 2; ++c) {
        const auto [a, b] = kg_propagate_complex(psi0_plus.component(c), g, mass, t_sample);
        std::copy(a.values().begin(), a.values().end(), f.component(c).begin());
        std::copy(b.values().begin(), b.values().end(), f_t.component(c).begin());
    }
    return dirac_equation_residual(f, f_t, mass, rep);
}

namespace {

SweepRow sweep_row(double m, double M, const SweepOptions& opts, const CliffordRep& rep) {
    SweepRow row;
    row.m = m;
    const Couplings c{M, m, opts.scenario.params.couplings.g};
    row.det_dirac = det_product(dirac_triple(c));
    row.det_kg = det_product(kg_triple(c));
    try {
        row.dirac = nf_coeffs(dirac_triple(c));
        row.kg = nf_coeffs(kg_triple(c));
    } catch (const DkgError& e) {
        if (e.category() != ErrorCategory::ResonantMass) throw;
        row.dirac.reset();
        row.kg.reset();
        row.status = to_string(ErrorCategory::ResonantMass);
    }
    if (!opts.simulate) return row;

    const bool resonant = !row.dirac;
    try {
        SimParams params = opts.scenario.params;
        params.couplings = c;
        const Grid grid(opts.scenario.n, opts.scenario.L);
        const DkgState init = initial_data_gaussian(opts.scenario.eps, opts.scenario.width, grid, rep, params);
        RunOptions ro;
        ro.normal_form_diagnostics = !resonant;
        ro.keep_states = !resonant;
        const Trajectory traj = run(params, init, rep, ro);
        row.final_sup_psi_weighted = traj.snapshots().back().diagnostics.sup_psi_weighted;
        if (!resonant) row.dirac_slope = scatter(traj, c, rep, opts.sigma, opts.extract).fitted_slopes.first;
    } catch (const DkgError& e) {
        // The coefficient columns stay valid; the status records why the
        // simulated columns are missing.
        if (!resonant) row.status = to_string(e.category());
    }
    return row;
}

}  // namespace

std::vector<SweepRow> resonance_sweep(std::span<const double> m_values, double M, const SweepOptions& opts,
                                      const CliffordRep& rep) {
    std::vector<SweepRow> rows(m_values.size());
    std::atomic<size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (size_t i = next++; i < rows.size(); i = next++) {
            try {
                rows[i] = sweep_row(m_values[i], M, opts, rep);
            } catch (...) {
                const std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    const int workers = std::clamp(opts.workers, 1, static_cast<int>(std::max<size_t>(1, rows.size())));
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
    return rows;
}

std::string sweep_csv_row(const SweepRow& r) {
    std::string row;
    char buf[40];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    auto cell = [&](const std::string& s) {
        if (!row.empty()) row += ',';
        row += s;
    };
    const std::string resonant = to_string(ErrorCategory::ResonantMass);
    cell(num(r.m));
    cell(num(r.det_dirac));
    cell(num(r.det_kg));
    cell(r.dirac ? num(r.dirac->p) : resonant);
    cell(r.dirac ? num(r.dirac->p_tilde) : resonant);
    cell(r.kg ? num(r.kg->p) : resonant);
    cell(r.kg ? num(r.kg->p_tilde) : resonant);
    cell(r.dirac_slope ? num(*r.dirac_slope) : "");
    cell(r.final_sup_psi_weighted ? num(*r.final_sup_psi_weighted) : "");
    cell(r.status);
    return row;
}

}  // namespace dkg
