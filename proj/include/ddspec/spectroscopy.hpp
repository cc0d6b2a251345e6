#pragma once

// Simulated measurement pipeline: randomized-phase scans, maximum-likelihood
// envelope estimation, Rabi lineshape and dressing fits, and end-to-end
// spectrum measurement.

#include <Eigen/Dense>
#include <unsupported/Eigen/LevenbergMarquardt>
#include <unsupported/Eigen/NumericalDiff>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "ddspec/bloch.hpp"
#include "ddspec/coherence.hpp"
#include "ddspec/constants.hpp"
#include "ddspec/errors.hpp"
#include "ddspec/noise.hpp"
#include "ddspec/overlap.hpp"
#include "ddspec/rng.hpp"
#include "ddspec/spectrum.hpp"
#include "ddspec/waveform.hpp"

namespace ddspec {

struct ScanPoint {
    double f0 = 0.0;  // Hz
    double t = 0.0;   // s
    std::vector<double> z;
};

/// z_i = C sin(Phi_i) + eps_i, Phi uniform on [0, 2 pi), eps ~ N(0, noise_sigma^2).
inline std::vector<double> synthesize_scan(double c_true, std::size_t n_samples, double noise_sigma,
                                           std::uint64_t seed, std::uint64_t stream = 0) {
    detail::require(c_true >= 0.0 && c_true <= 1.0, "true coherence must lie in [0, 1]");
    detail::require(noise_sigma >= 0.0, "noise sigma must be nonnegative");
    CounterRng rng(seed, streams::kScans + stream);
    std::vector<double> z(n_samples);
    for (auto& x : z) {
        const double phi = kTwoPi * rng.uniform();
        x = c_true * std::sin(phi) + noise_sigma * rng.normal();
    }
    return z;
}

struct EnvelopeEstimate {
    double c_hat = 0.0;
    double lower = 0.0;  // profile-likelihood interval
    double upper = 0.0;
    double log_likelihood = 0.0;
    bool at_boundary = false;  // the boundary threshold was used
};

/// Threshold on 2 (l_max - l(C)) for the 68 % profile interval.
inline constexpr double kProfileThreshold = 1.0;
/// Same for C = 0 on the boundary, where 2 dl follows (chi2_0 + chi2_1)/2:
/// the 68 % point solves P(chi2_1 <= q) = 0.36.
inline constexpr double kBoundaryThreshold = 0.22584626100327207;
inline constexpr double kEnvelopeMax = 1.2;

namespace detail {

/// log prod_i p(z_i | C, sigma) for the arcsine law of C sin(Phi) convolved
/// with N(0, sigma^2). The Phi average uses the half-period symmetry of sin
/// and a periodic trapezoid; points more than 8 sigma away are skipped.
inline double envelope_log_likelihood(const std::vector<double>& z, double c, double sigma) {
    if (sigma == 0.0) {
        double l = 0.0;
        for (double x : z) {
            const double d = c * c - x * x;
            if (d <= 0.0) return -std::numeric_limits<double>::infinity();
            l += -std::log(kPi) - 0.5 * std::log(d);
        }
        return l;
    }
    if (c == 0.0) {
        double l = 0.0;
        for (double x : z) l += -0.5 * (x / sigma) * (x / sigma) - std::log(sigma * std::sqrt(kTwoPi));
        return l;
    }
    const std::size_t n = std::max<std::size_t>(256, static_cast<std::size_t>(std::ceil(4.0 * kPi * c / sigma)));
    const std::size_t half = n / 2;
    thread_local std::vector<double> s;
    s.resize(half);
    // Midpoints of [-pi/2, pi/2]: the periodic rule over a full period folds onto these.
    for (std::size_t k = 0; k < half; ++k) s[k] = c * std::sin(-0.5 * kPi + kPi * (static_cast<double>(k) + 0.5) / static_cast<double>(half));
    const double inv2s2 = 0.5 / (sigma * sigma);
    const double cut = 8.0 * sigma;
    const double lognorm = -std::log(sigma * std::sqrt(kTwoPi)) - std::log(static_cast<double>(half));
    double l = 0.0;
    for (double x : z) {
        double acc = 0.0;
        for (std::size_t k = 0; k < half; ++k) {
            const double d = x - s[k];
            if (std::abs(d) < cut) acc += std::exp(-d * d * inv2s2);
        }
        if (acc <= 0.0) return -std::numeric_limits<double>::infinity();
        l += std::log(acc) + lognorm;
    }
    return l;
}

}  // namespace detail

/// Maximum-likelihood estimate of the envelope C from randomized-phase samples.
inline EnvelopeEstimate mle_envelope(const std::vector<double>& z, double noise_sigma) {
    if (z.size() < 10) throw InsufficientData("envelope estimation needs at least 10 samples");
    detail::require(noise_sigma >= 0.0, "noise sigma must be nonnegative");
    const auto [mn, mx] = std::minmax_element(z.begin(), z.end());
    if (*mx == *mn) throw InsufficientVariation("all samples are equal");

    EnvelopeEstimate e;
    if (noise_sigma == 0.0) {
        double m = 0.0;
        for (double x : z) m = std::max(m, std::abs(x));
        e.c_hat = e.lower = e.upper = m;
        e.log_likelihood = INFINITY;
        return e;
    }
    auto ll = [&](double c) { return detail::envelope_log_likelihood(z, c, noise_sigma); };

    const std::size_t grid_n = 61;
    const double step = kEnvelopeMax / static_cast<double>(grid_n - 1);
    std::vector<double> lg(grid_n);
    std::size_t best = 0;
    for (std::size_t i = 0; i < grid_n; ++i) {
        lg[i] = ll(step * static_cast<double>(i));
        if (lg[i] > lg[best]) best = i;
    }
    double a = best == 0 ? 0.0 : step * static_cast<double>(best - 1);
    double b = best + 1 == grid_n ? kEnvelopeMax : step * static_cast<double>(best + 1);
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = ll(x1), f2 = ll(x2);
    while (b - a > 1e-6) {
        if (f1 > f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = ll(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = ll(x2);
        }
    }
    double c_hat = 0.5 * (a + b);
    double l_max = ll(c_hat);
    if (lg[best] > l_max) {
        c_hat = step * static_cast<double>(best);
        l_max = lg[best];
    }
    e.c_hat = c_hat;
    e.log_likelihood = l_max;

    const double lr0 = 2.0 * (l_max - lg[0]);
    const double q = lr0 <= kProfileThreshold ? kBoundaryThreshold : kProfileThreshold;
    e.at_boundary = lr0 <= kProfileThreshold;
    auto excess = [&](double c) { return 2.0 * (l_max - ll(c)) - q; };
    auto root = [&](double inside, double outside) {
        for (int it = 0; it < 50; ++it) {
            const double m = 0.5 * (inside + outside);
            if (excess(m) > 0.0)
                outside = m;
            else
                inside = m;
            if (std::abs(outside - inside) < 1e-6) break;
        }
        return 0.5 * (inside + outside);
    };
    // Lower bound.
    if (excess(0.0) <= 0.0) {
        e.lower = 0.0;
    } else {
        double lo = c_hat;
        while (lo > 0.0 && excess(std::max(0.0, lo - step)) <= 0.0) lo -= step;
        e.lower = root(c_hat, std::max(0.0, lo - step));
        if (e.lower > c_hat) e.lower = c_hat;
    }
    // Upper bound.
    double hi = c_hat;
    while (hi < kEnvelopeMax && excess(std::min(kEnvelopeMax, hi + step)) <= 0.0) hi += step;
    e.upper = hi >= kEnvelopeMax ? kEnvelopeMax : root(c_hat, std::min(kEnvelopeMax, hi + step));
    if (e.upper < c_hat) e.upper = c_hat;
    return e;
}

/// Lineshape model in which one
/// symbol f stands for both the Rabi frequency and the scanned frequency.
inline double rabi_lineshape(double f, double f0, double A, double phi, double T) {
    const double d = f - f0;
    const double g2 = d * d + f * f;
    return A * f * f / g2 * (1.0 + std::cos(phi + T * std::sqrt(g2)));
}

/// Lineshape for a frequency scan x at a known Rabi frequency f_rabi:
/// A f_R^2 / ((x - f0)^2 + f_R^2) [1 + cos(phi + T sqrt((x - f0)^2 + f_R^2))].
inline double rabi_lineshape_scan(double x, double f0, double f_rabi, double A, double phi, double T) {
    const double d = x - f0;
    const double g2 = d * d + f_rabi * f_rabi;
    return A * f_rabi * f_rabi / g2 * (1.0 + std::cos(phi + T * std::sqrt(g2)));
}

struct RabiLineshapeFit {
    double f0_shift = 0.0;
    double amplitude = 0.0;
    double phase = 0.0;
    double duration = 0.0;
    Eigen::Matrix4d covariance = Eigen::Matrix4d::Zero();  // (f0, A, phi, T)
    double chi2_per_dof = 0.0;

    double f0_error() const { return std::sqrt(covariance(0, 0)); }
};

namespace detail {

struct LineshapeFunctor : Eigen::DenseFunctor<double> {
    const std::vector<double>* x;
    const std::vector<double>* y;
    double f_rabi;
    LineshapeFunctor(const std::vector<double>& xs, const std::vector<double>& ys, double fr)
        : Eigen::DenseFunctor<double>(4, static_cast<int>(xs.size())), x(&xs), y(&ys), f_rabi(fr) {}
    int operator()(const InputType& p, ValueType& r) const {
        for (std::size_t i = 0; i < x->size(); ++i)
            r(static_cast<Eigen::Index>(i)) = rabi_lineshape_scan((*x)[i], p(0), f_rabi, p(1), p(2), p(3)) - (*y)[i];
        return 0;
    }
};

}  // namespace detail

/// Fits f0, A, phi and T of rabi_lineshape_scan to a frequency scan.
///
/// f0 is first located by a grid search over the scanned range with the
/// remaining parameters solved linearly (as A, A cos phi, A sin phi at the
/// guessed T), then all four are refined by Levenberg-Marquardt.
inline RabiLineshapeFit fit_rabi_lineshape(const std::vector<double>& x, const std::vector<double>& y, double f_rabi,
                                           double duration_guess) {
    detail::require(x.size() == y.size() && x.size() >= 6, "need at least six scan points");
    detail::require(f_rabi > 0.0 && duration_guess > 0.0, "Rabi frequency and duration must be positive");
    const auto [xmin, xmax] = std::minmax_element(x.begin(), x.end());
    double best_f0 = 0.0, best_cost = INFINITY;
    Eigen::Vector3d best_lin = Eigen::Vector3d::Zero();
    const std::size_t n_grid = 2000;
    Eigen::MatrixXd M(static_cast<Eigen::Index>(x.size()), 3);
    Eigen::VectorXd Y = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
    for (std::size_t g = 0; g <= n_grid; ++g) {
        const double f0 = *xmin + (*xmax - *xmin) * static_cast<double>(g) / static_cast<double>(n_grid);
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double d = x[i] - f0;
            const double g2 = d * d + f_rabi * f_rabi;
            const double l = f_rabi * f_rabi / g2;
            const double arg = duration_guess * std::sqrt(g2);
            const auto r = static_cast<Eigen::Index>(i);
            M(r, 0) = l;
            M(r, 1) = l * std::cos(arg);
            M(r, 2) = -l * std::sin(arg);
        }
        const Eigen::Vector3d p = M.colPivHouseholderQr().solve(Y);
        const double cost = (M * p - Y).squaredNorm();
        if (cost < best_cost) {
            best_cost = cost;
            best_f0 = f0;
            best_lin = p;
        }
    }
    Eigen::VectorXd p(4);
    p << best_f0, std::hypot(best_lin(1), best_lin(2)), std::atan2(best_lin(2), best_lin(1)), duration_guess;

    detail::LineshapeFunctor functor(x, y, f_rabi);
    Eigen::NumericalDiff<detail::LineshapeFunctor> numdiff(functor);
    Eigen::LevenbergMarquardt<Eigen::NumericalDiff<detail::LineshapeFunctor>> lm(numdiff);
    lm.setMaxfev(2000);
    lm.minimize(p);

    RabiLineshapeFit fit;
    fit.f0_shift = p(0);
    fit.amplitude = p(1);
    fit.phase = std::remainder(p(2), kTwoPi);
    fit.duration = p(3);
    if (fit.amplitude < 0.0) {
        fit.amplitude = -fit.amplitude;
        fit.phase = std::remainder(fit.phase + kPi, kTwoPi);
    }
    Eigen::VectorXd r(static_cast<Eigen::Index>(x.size()));
    functor(p, r);
    const double dof = static_cast<double>(x.size()) - 4.0;
    const double s2 = dof > 0 ? r.squaredNorm() / dof : 0.0;
    fit.chi2_per_dof = s2;
    Eigen::MatrixXd J(static_cast<Eigen::Index>(x.size()), 4);
    numdiff.df(p, J);
    const Eigen::Matrix4d JtJ = J.transpose() * J;
    fit.covariance = s2 * JtJ.inverse();
    return fit;
}

struct DressingLaw {
    double kappa = 0.0;  // shift = kappa * f_R^2, 1/Hz
    double kappa_error = 0.0;
    double chi2_per_dof = 0.0;
};

struct DressingPoint {
    double rabi_hz = 0.0;
    double shift_hz = 0.0;
};

/// Least-squares shift = kappa * f_R^2 through the origin.
inline DressingLaw dressing_calibration(const std::vector<DressingPoint>& pts) {
    std::vector<double> distinct;
    for (const auto& p : pts) distinct.push_back(p.rabi_hz);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 3) throw InsufficientData("dressing calibration needs at least three distinct Rabi frequencies");
    double s22 = 0.0, s2y = 0.0;
    for (const auto& p : pts) {
        const double q = p.rabi_hz * p.rabi_hz;
        s22 += q * q;
        s2y += q * p.shift_hz;
    }
    DressingLaw law;
    law.kappa = s2y / s22;
    double rss = 0.0;
    for (const auto& p : pts) {
        const double r = p.shift_hz - law.kappa * p.rabi_hz * p.rabi_hz;
        rss += r * r;
    }
    const double dof = static_cast<double>(pts.size() - 1);
    law.chi2_per_dof = rss / dof;
    law.kappa_error = std::sqrt(law.chi2_per_dof / s22);
    return law;
}

struct MeasurementConfig {
    std::vector<double> f0_grid;    // Hz
    std::vector<double> durations;  // s, at least three
    std::size_t samples_per_point = 30;
    double noise_sigma = 0.05;
    std::uint64_t seed = 0;
    bool bias_run = true;
    double alpha = kDefaultAlpha;
    double t1 = std::numeric_limits<double>::infinity();
    double dressing_kappa = 0.0;     // 1/Hz
    bool compensate_dressing = true; // drive re-tuned so the shift cancels
    std::size_t bootstrap = 0;       // Bloch-level bootstrap, not needed for the fit
    unsigned threads = 1;
};

struct ScanRecord {
    double f0 = 0.0;
    double t = 0.0;
    double c_true = 0.0;
    EnvelopeEstimate estimate;
    std::vector<double> z;
};

struct MeasuredSpectrum {
    BathSpectrum spectrum;
    std::vector<RatePoint> rates;
    RatePoint bias{};
    std::vector<ScanRecord> scans;
};

namespace detail {

inline RatePoint rate_from_scans(double f0, const std::vector<double>& durations, const std::vector<double>& c_true,
                                 const MeasurementConfig& cfg, std::uint64_t stream, std::vector<ScanRecord>& log) {
    CoherenceCurve curve;
    curve.times = durations;
    for (std::size_t k = 0; k < durations.size(); ++k) {
        ScanRecord rec;
        rec.f0 = f0;
        rec.t = durations[k];
        rec.c_true = std::clamp(c_true[k], 0.0, 1.0);
        rec.z = synthesize_scan(rec.c_true, cfg.samples_per_point, cfg.noise_sigma, cfg.seed,
                                stream * durations.size() + k);
        rec.estimate = mle_envelope(rec.z, cfg.noise_sigma);
        curve.values.push_back(rec.estimate.c_hat);
        // Half-width of the 68 % interval, floored at the single-sample noise scale.
        const double half = 0.5 * (rec.estimate.upper - rec.estimate.lower);
        curve.std_errors.push_back(std::max(half, cfg.noise_sigma / std::sqrt(static_cast<double>(cfg.samples_per_point))));
        log.push_back(std::move(rec));
    }
    const auto fit = fit_decay_rate(curve);
    return {f0, fit.rate, fit.rate_error};
}

}  // namespace detail

/// End-to-end spectrum measurement over a detuning ensemble.
///
/// For every drive frequency the ensemble is evolved under a constant drive,
/// each (f0, duration) coherence is turned into a randomized-phase scan and
/// re-estimated by maximum likelihood, a decay rate is fitted across the
/// durations, and the rates are inverted with G = 4 (R - bias). The bias
/// comes from the same procedure applied to a noiseless, undriven ensemble
/// carrying only the T1 envelope.
template <TraceSource S>
MeasuredSpectrum measure_spectrum(const S& source, const MeasurementConfig& cfg) {
    detail::require(!cfg.f0_grid.empty(), "empty drive-frequency grid");
    if (cfg.durations.size() < 3) throw InvalidArgument("need at least three pulse durations");
    std::vector<double> durations = cfg.durations;
    std::sort(durations.begin(), durations.end());
    for (double f0 : cfg.f0_grid)
        if (f0 * durations.front() < kDriveMinProduct)
            throw PreconditionViolation("every drive needs f0 * t >= 10 at the shortest duration");

    std::vector<ControlWaveform> waves;
    for (double f0 : cfg.f0_grid) waves.push_back(ConstantDrive{f0});
    EnsembleOptions eo;
    eo.threads = cfg.threads;
    eo.bootstrap = cfg.bootstrap;
    eo.seed = cfg.seed;
    eo.t1 = cfg.t1;
    if (!cfg.compensate_dressing) eo.bloch.dressing_kappa = cfg.dressing_kappa;
    const auto curves = ensemble_coherence(source, waves, durations, eo);

    MeasuredSpectrum out;
    for (std::size_t i = 0; i < cfg.f0_grid.size(); ++i)
        out.rates.push_back(detail::rate_from_scans(cfg.f0_grid[i], durations, curves[i].values, cfg, i, out.scans));

    double bias = 0.0, bias_sigma = 0.0;
    if (cfg.bias_run) {
        std::vector<double> c0(durations.size());
        for (std::size_t k = 0; k < durations.size(); ++k)
            c0[k] = std::isfinite(cfg.t1) ? std::exp(-2.0 * durations[k] / cfg.t1) : 1.0;
        out.bias = detail::rate_from_scans(0.0, durations, c0, cfg, cfg.f0_grid.size(), out.scans);
        bias = out.bias.rate;
        bias_sigma = out.bias.sigma;
    }
    out.spectrum = invert_spectrum(out.rates, bias, bias_sigma);
    return out;
}

}  // namespace ddspec
