#pragma once

// Averaged-periodogram (Welch) estimate of the bath spectrum from traces.
//
// G(f) = int C(tau) e^{-2 pi i f tau} dtau evaluated at f >= 0, so that
// int_0^inf G df = Var(delta) / 2. Segments use a Hann window and 50 %
// overlap and are not detrended.

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <mutex>
#include <vector>

#include "ddspec/bath.hpp"
#include "ddspec/constants.hpp"
#include "ddspec/errors.hpp"
#include "ddspec/frequency_grid.hpp"
#include "ddspec/noise.hpp"
#include "ddspec/parallel.hpp"
#include "ddspec/spectrum.hpp"

namespace ddspec {

struct WelchSettings {
    std::size_t min_segments = 8;
    unsigned threads = 1;
};

struct SpectrumEstimate {
    std::vector<double> f;      // FFT bin frequencies, Hz
    std::vector<double> G;      // 1/s
    std::vector<double> sigma;  // standard error across atoms (segments for one atom)
    double variance = 0.0;      // (rad/s)^2, mean over atoms of the per-trace variance about 0
    double correlation_time = 0.0;  // G(0) / (2 Var), s
    std::size_t segment_length = 0;
    std::size_t segments_per_trace = 0;

    /// Linear interpolation of the estimate onto a grid, as a tabulated spectrum.
    BathSpectrum on_grid(const FrequencyGrid& grid) const {
        Tabulated tab;
        tab.grid = grid;
        for (double x : grid.values()) {
            auto it = std::upper_bound(f.begin(), f.end(), x);
            std::size_t k = static_cast<std::size_t>(it - f.begin());
            if (k == 0) k = 1;
            if (k >= f.size()) k = f.size() - 1;
            const double s = std::clamp((x - f[k - 1]) / (f[k] - f[k - 1]), 0.0, 1.0);
            tab.values.push_back(std::max(0.0, G[k - 1] + s * (G[k] - G[k - 1])));
            tab.sigma.push_back(sigma[k - 1] + s * (sigma[k] - sigma[k - 1]));
        }
        return BathSpectrum(std::move(tab), SpectrumOrigin::Simulated);
    }

    /// Indices of interior local maxima of G.
    std::vector<std::size_t> local_maxima() const {
        std::vector<std::size_t> out;
        for (std::size_t k = 1; k + 1 < G.size(); ++k)
            if (G[k] > G[k - 1] && G[k] >= G[k + 1]) out.push_back(k);
        return out;
    }
};

namespace detail {

struct FftwPlan {
    fftw_plan plan = nullptr;
    std::size_t n = 0;
    ~FftwPlan() {
        if (plan) {
            std::lock_guard lock(planner_mutex());
            fftw_destroy_plan(plan);
        }
    }
    static std::mutex& planner_mutex() {
        static std::mutex m;
        return m;
    }
};

struct FftwDeleter {
    void operator()(void* p) const { fftw_free(p); }
};

}  // namespace detail

/// Welch estimate over every trace of the source.
template <TraceSource S>
SpectrumEstimate estimate_spectrum(const S& source, const WelchSettings& settings = {}) {
    const std::size_t n = source.n_steps();
    const std::size_t atoms = source.n_traces();
    detail::require(atoms >= 1, "empty ensemble");
    // Largest power of two giving at least min_segments half-overlapping segments.
    std::size_t len = 1;
    while (2 * len <= n && (n - 2 * len) / len + 1 >= settings.min_segments) len *= 2;
    if (len < 8 || (n - len) / (len / 2) + 1 < settings.min_segments)
        throw PreconditionViolation("traces too short for the requested number of Welch segments");
    const std::size_t hop = len / 2;
    const std::size_t segs = (n - len) / hop + 1;
    const std::size_t bins = len / 2 + 1;
    const double dt = source.dt();

    std::vector<double> window(len);
    double wsum2 = 0.0;
    for (std::size_t j = 0; j < len; ++j) {
        window[j] = 0.5 * (1.0 - std::cos(kTwoPi * static_cast<double>(j) / static_cast<double>(len)));
        wsum2 += window[j] * window[j];
    }
    const double norm = dt / wsum2;

    detail::FftwPlan plan;
    plan.n = len;
    {
        std::unique_ptr<double, detail::FftwDeleter> in(fftw_alloc_real(len));
        std::unique_ptr<fftw_complex, detail::FftwDeleter> out(fftw_alloc_complex(bins));
        std::lock_guard lock(detail::FftwPlan::planner_mutex());
        plan.plan = fftw_plan_dft_r2c_1d(static_cast<int>(len), in.get(), out.get(), FFTW_ESTIMATE);
    }

    const bool per_segment = atoms == 1;
    const std::size_t units = per_segment ? segs : atoms;
    std::vector<std::vector<double>> unit_psd(units, std::vector<double>(bins, 0.0));
    std::vector<double> var(atoms, 0.0);

    parallel_for(atoms, settings.threads, [&](std::size_t a) {
        std::vector<double> trace(n);
        source.fill_trace(a, trace);
        double v = 0.0;
        for (double x : trace) v += x * x;
        var[a] = v / static_cast<double>(n);
        std::unique_ptr<double, detail::FftwDeleter> in(fftw_alloc_real(len));
        std::unique_ptr<fftw_complex, detail::FftwDeleter> out(fftw_alloc_complex(bins));
        std::vector<double> acc(bins, 0.0);
        for (std::size_t s = 0; s < segs; ++s) {
            for (std::size_t j = 0; j < len; ++j) in.get()[j] = window[j] * trace[s * hop + j];
            fftw_execute_dft_r2c(plan.plan, in.get(), out.get());
            for (std::size_t k = 0; k < bins; ++k) {
                const double p = norm * (out.get()[k][0] * out.get()[k][0] + out.get()[k][1] * out.get()[k][1]);
                if (per_segment)
                    unit_psd[s][k] = p;
                else
                    acc[k] += p;
            }
        }
        if (!per_segment)
            for (std::size_t k = 0; k < bins; ++k) unit_psd[a][k] = acc[k] / static_cast<double>(segs);
    });

    SpectrumEstimate est;
    est.segment_length = len;
    est.segments_per_trace = segs;
    est.f.resize(bins);
    est.G.assign(bins, 0.0);
    est.sigma.assign(bins, 0.0);
    for (std::size_t k = 0; k < bins; ++k) est.f[k] = static_cast<double>(k) / (static_cast<double>(len) * dt);
    for (std::size_t k = 0; k < bins; ++k) {
        double m = 0.0;
        for (std::size_t u = 0; u < units; ++u) m += unit_psd[u][k];
        m /= static_cast<double>(units);
        double ss = 0.0;
        for (std::size_t u = 0; u < units; ++u) ss += (unit_psd[u][k] - m) * (unit_psd[u][k] - m);
        est.G[k] = m;
        est.sigma[k] = units > 1 ? std::sqrt(ss / static_cast<double>(units - 1) / static_cast<double>(units)) : m;
    }
    double v = 0.0;
    for (double x : var) v += x;
    est.variance = v / static_cast<double>(atoms);
    est.correlation_time = est.variance > 0.0 ? est.G[0] / (2.0 * est.variance) : 0.0;
    return est;
}

/// Spectrum estimate interpolated onto grid. The traces must span at least
/// 10 / f_min, where f_min is the smallest positive grid frequency.
template <TraceSource S>
BathSpectrum spectrum_from_traces(const S& source, const FrequencyGrid& grid, const WelchSettings& settings = {}) {
    double f_min = 0.0;
    for (double f : grid.values())
        if (f > 0.0) {
            f_min = f;
            break;
        }
    const double duration = source.dt() * static_cast<double>(source.n_steps());
    if (f_min > 0.0 && duration < 10.0 / f_min)
        throw PreconditionViolation("traces too short for the lowest grid frequency: need duration >= 10 / f_min");
    return estimate_spectrum(source, settings).on_grid(grid);
}

struct NarrowingPoint {
    double collision_rate = 0.0;  // 1/s
    double g_zero = 0.0;          // G at the lowest bin, 1/s
    double sigma = 0.0;
    double correlation_time = 0.0;
};

/// Low-frequency spectrum as a function of the collision rate, all other
/// settings held fixed.
inline std::vector<NarrowingPoint> collisional_narrowing_scan(const TrapConfig& trap, const SimulationSettings& sim,
                                                              const std::vector<double>& rates,
                                                              const WelchSettings& welch = {}) {
    detail::require(rates.size() >= 2, "need at least two collision rates");
    std::vector<NarrowingPoint> out;
    for (double rate : rates) {
        BathSimulator bath(trap, CollisionConfig{rate, 0.0}, sim, welch.threads);
        const auto est = estimate_spectrum(bath, welch);
        out.push_back({rate, est.G[0], est.sigma[0], est.correlation_time});
    }
    return out;
}

}  // namespace ddspec
