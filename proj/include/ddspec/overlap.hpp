#pragma once

// Overlap integral R = (2 alpha / t) * K * int_0^inf G(f) F_t(f) df with the
// fold factor K from constants.hpp, and everything built on top of it.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "ddspec/coherence.hpp"
#include "ddspec/constants.hpp"
#include "ddspec/errors.hpp"
#include "ddspec/filter_function.hpp"
#include "ddspec/parallel.hpp"
#include "ddspec/quadrature.hpp"
#include "ddspec/spectrum.hpp"
#include "ddspec/waveform.hpp"

namespace ddspec {

struct DecayPrediction {
    double rate = 0.0;  // 1/s
    double observation_time = 0.0;
    double coherence = 1.0;
    double fidelity = 1.0;
    std::vector<double> f;          // filter grid, Hz
    std::vector<double> integrand;  // G(f) F_t(f) on the grid, s
};

inline double overlap_prefactor(double alpha, double t) { return 2.0 * alpha * kOverlapFoldFactor / t; }

/// Decay rate of a filter over a bath spectrum.
///
/// The integral runs over the filter's quadrature nodes on [0, f_end] plus
/// the tail int_{f_end}^inf G(f) K / f^2 df, which after f = f_end / u is
/// (K / f_end) int_0^1 G(f_end / u) du.
inline DecayPrediction decay_rate(const BathSpectrum& G, const FilterFunction& F, double alpha = kDefaultAlpha) {
    detail::require(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]");
    if (!G.is_lorentzian()) {
        const auto& tab = G.tabulated();
        for (double v : tab.values)
            if (v < 0.0) throw InvalidArgument("negative spectrum value");
        if (tab.grid.size() > 1 && (tab.grid.back() < F.grid().front() || tab.grid.front() > F.grid().back()))
            throw InvalidArgument("spectrum and filter grids do not overlap");
    }
    const double t = F.observation_time();
    const auto& nodes = F.quadrature_nodes();
    const auto& weights = F.quadrature_weights();
    const auto& vals = F.quadrature_values();
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * vals[i] * G(nodes[i]);
    const double f_end = F.f_end();
    if (f_end > 0.0 && F.tail_coefficient() > 0.0) {
        const auto& rule = gauss_legendre(32);
        double tail = 0.0;
        for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
            const double u = 0.5 * (rule.nodes[j] + 1.0);
            tail += 0.5 * rule.weights[j] * G(f_end / u);
        }
        sum += F.tail_coefficient() / f_end * tail;
    }
    DecayPrediction out;
    out.rate = overlap_prefactor(alpha, t) * sum;
    out.observation_time = t;
    out.coherence = std::exp(-out.rate * t);
    out.fidelity = 0.5 * (1.0 + out.coherence);
    out.f = F.grid().values();
    out.integrand.resize(out.f.size());
    for (std::size_t i = 0; i < out.f.size(); ++i) out.integrand[i] = G(out.f[i]) * F.values()[i];
    return out;
}

/// R_dephasing + 2 / T1. An infinite T1 means no population decay.
inline double combine_t1(double rate_dephasing, double t1) {
    if (!(t1 > 0.0)) throw InvalidArgument("T1 must be positive");
    if (std::isinf(t1)) return rate_dephasing;
    return rate_dephasing + 2.0 / t1;
}

/// f0 t below this raises PreconditionViolation; below kDriveWarnProduct a
/// warning is appended.
inline constexpr double kDriveMinProduct = 10.0;
inline constexpr double kDriveWarnProduct = 50.0;

/// Rate under a constant drive f0 held for t; approaches G(f0)/4.
inline double continuous_drive_rate(const BathSpectrum& G, double f0, double t, double alpha = kDefaultAlpha,
                                    std::vector<std::string>* warnings = nullptr) {
    detail::require(f0 > 0.0 && t > 0.0, "drive frequency and duration must be positive");
    if (f0 * t < kDriveMinProduct)
        throw PreconditionViolation("continuous drive needs f0 * t >= 10 (got " + std::to_string(f0 * t) + ")");
    if (f0 * t < kDriveWarnProduct && warnings)
        warnings->push_back("f0 * t = " + std::to_string(f0 * t) + " is below 50; the G(f0)/4 asymptote is approximate");
    const auto F = filter_constant_drive(f0, t, default_grid(t, f0));
    return decay_rate(G, F, alpha).rate;
}

struct RatePoint {
    double f0 = 0.0;     // Hz
    double rate = 0.0;   // 1/s
    double sigma = 0.0;  // 1/s
};

/// G(f0) = 4 (R - bias), clamped at 0 (flagged per point); sigma = 4 sqrt(sigma_R^2 + sigma_bias^2).
inline BathSpectrum invert_spectrum(std::vector<RatePoint> rates, double bias = 0.0, double bias_sigma = 0.0) {
    detail::require(!rates.empty(), "no rates to invert");
    std::sort(rates.begin(), rates.end(), [](const RatePoint& a, const RatePoint& b) { return a.f0 < b.f0; });
    Tabulated tab;
    std::vector<double> f;
    for (std::size_t i = 0; i < rates.size(); ++i) {
        if (i > 0 && rates[i].f0 == rates[i - 1].f0) throw InvalidArgument("duplicate drive frequency");
        f.push_back(rates[i].f0);
        const double g = 4.0 * (rates[i].rate - bias);
        tab.clamped.push_back(g < 0.0);
        tab.values.push_back(std::max(0.0, g));
        tab.sigma.push_back(4.0 * std::hypot(rates[i].sigma, bias_sigma));
    }
    tab.grid = FrequencyGrid(std::move(f));
    return BathSpectrum(std::move(tab), SpectrumOrigin::Measured);
}

struct SidebandMeasurement {
    double rate_with = 0.0;      // sideband drive, 1/s
    double sigma_with = 0.0;
    double rate_without = 0.0;   // plain drive at the same f0 and t, 1/s
    double sigma_without = 0.0;
};

struct SidebandResult {
    double frequency = 0.0;  // f0 - f_m, Hz
    double G = 0.0;          // 1/s
    double sigma = 0.0;
    double carrier_weight = 0.0;  // rate per unit G for each filter peak, dimensionless
    double lower_weight = 0.0;
    double upper_weight = 0.0;
    double plain_weight = 0.0;
};

/// Spectrum at the lower sideband f0 - f_m of an amplitude-modulated drive.
///
/// The rate under the modulated drive is modelled as
///   R_with = w_c G(f0) + w_l G(f0 - f_m) + w_u G(f0 + f_m)
/// with peak weights w = (4 alpha / t) * (area of the filter peak), computed
/// from filter_numeric. G(f0) comes from the plain drive, R_without / w_0;
/// G(f0 + f_m) must be supplied by the caller.
inline SidebandResult sideband_extract(const SidebandMeasurement& m, double beta, double f_m, double f0, double t,
                                       double upper_sideband_G, double alpha = kDefaultAlpha,
                                       const QuadratureSettings& quad = {}) {
    if (!(beta > 0.0)) throw InvalidArgument("sideband extraction needs a nonzero modulation index");
    detail::require(f_m > 0.0 && f0 > f_m, "need 0 < f_m < f0");
    detail::require(t > 0.0 && f_m * t >= 4.0, "sidebands must be resolved: f_m * t >= 4");
    detail::require(upper_sideband_G >= 0.0, "upper sideband spectrum must be nonnegative");

    const double hi = f0 + 3.0 * f_m;
    const auto grid = FrequencyGrid::uniform(0.0, hi + 10.0 / t, 400);
    const auto Fw = filter_numeric(SidebandDrive{f0, beta, f_m}, t, grid, quad);
    const auto F0 = filter_constant_drive(f0, t, grid, quad.nodes_per_panel);
    const double pre = overlap_prefactor(alpha, t);
    const double half = 0.5 * f_m;

    SidebandResult r;
    r.frequency = f0 - f_m;
    r.carrier_weight = pre * Fw.band_integral(f0 - half, f0 + half);
    r.lower_weight = pre * Fw.band_integral(f0 - f_m - half, f0 - half);
    r.upper_weight = pre * Fw.band_integral(f0 + half, f0 + f_m + half);
    r.plain_weight = pre * F0.band_integral(f0 - half, f0 + half);

    const double g_carrier = m.rate_without / r.plain_weight;
    const double numerator = m.rate_with - r.carrier_weight * g_carrier - r.upper_weight * upper_sideband_G;
    const double num_sigma =
        std::hypot(m.sigma_with, r.carrier_weight / r.plain_weight * m.sigma_without);
    if (numerator < 0.0 && -numerator > 2.0 * num_sigma)
        throw InconsistentMeasurement("sideband rate falls below the carrier prediction beyond its uncertainty");
    r.G = std::max(0.0, numerator) / r.lower_weight;
    r.sigma = num_sigma / r.lower_weight;
    return r;
}

using WaveformFamily = std::function<ControlWaveform(double t)>;

struct PredictionOptions {
    double alpha = kDefaultAlpha;
    double t1 = std::numeric_limits<double>::infinity();
    QuadratureSettings quad{};
    std::size_t grid_points = 400;
};

namespace detail {
inline FrequencyGrid grid_for(const ControlWaveform& w, double t, std::size_t points) {
    std::size_t n = 0;
    if (const auto* p = std::get_if<PulseTrain>(&w)) n = p->times.size();
    return default_grid(t, max_rabi_omega(w) / kTwoPi, n, points);
}
}  // namespace detail

/// Total predicted rate (dephasing plus T1) for one waveform held for t.
inline double predicted_rate(const BathSpectrum& G, const ControlWaveform& w, double t,
                             const PredictionOptions& opt = {}) {
    const auto F = filter_for(w, t, detail::grid_for(w, t, opt.grid_points), opt.quad);
    return combine_t1(decay_rate(G, F, opt.alpha).rate, opt.t1);
}

/// C(t) = exp(-R_total(t) t) with the waveform rebuilt for every t.
inline CoherenceCurve coherence_curve(const BathSpectrum& G, const WaveformFamily& family,
                                      const std::vector<double>& times, const PredictionOptions& opt = {},
                                      unsigned threads = 1) {
    for (std::size_t i = 1; i < times.size(); ++i)
        detail::require(times[i] > times[i - 1], "times must be strictly increasing");
    CoherenceCurve out;
    out.times = times;
    out.values.assign(times.size(), 1.0);
    out.std_errors.assign(times.size(), 0.0);
    parallel_for(times.size(), threads, [&](std::size_t i) {
        const double t = times[i];
        if (t <= 0.0) {
            out.values[i] = 1.0;
            return;
        }
        out.values[i] = std::exp(-predicted_rate(G, family(t), t, opt) * t);
    });
    return out;
}

}  // namespace ddspec
