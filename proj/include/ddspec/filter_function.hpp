#pragma once

// Filter functions F_t(f) = |int_0^t exp(-2 pi i f s) cos(theta(s)) ds|^2.
//
// Besides the values on the user grid, every FilterFunction carries a
// quadrature representation of F on [0, f_end] (Gauss-Legendre nodes on
// subpanels no wider than 1/t) and the coefficient K of the cycle-averaged
// tail F ~ K / f^2 beyond f_end. Overlap integrals use that representation,
// so they do not depend on how coarse the display grid is.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <cstddef>
#include <string>
#include <vector>

#include "ddspec/constants.hpp"
#include "ddspec/errors.hpp"
#include "ddspec/frequency_grid.hpp"
#include "ddspec/parallel.hpp"
#include "ddspec/quadrature.hpp"
#include "ddspec/waveform.hpp"

namespace ddspec {

struct QuadratureSettings {
    double tolerance = 1e-6;        // relative, checked by step halving
    std::size_t max_refinements = 6;
    std::size_t nodes_per_panel = 10;
    unsigned threads = 1;           // 0 = hardware concurrency
};

class FilterFunction {
public:
    FilterFunction() = default;

    FilterFunction(FrequencyGrid grid, std::vector<double> values, double t, std::string summary,
                   std::vector<double> nodes, std::vector<double> weights, std::vector<double> node_values,
                   double tail_coefficient)
        : grid_(std::move(grid)), values_(std::move(values)), t_(t), summary_(std::move(summary)),
          nodes_(std::move(nodes)), weights_(std::move(weights)), node_values_(std::move(node_values)),
          tail_(tail_coefficient) {
        f_end_ = grid_.back();
    }

    const FrequencyGrid& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    double observation_time() const { return t_; }
    const std::string& summary() const { return summary_; }

    const std::vector<double>& quadrature_nodes() const { return nodes_; }
    const std::vector<double>& quadrature_weights() const { return weights_; }
    const std::vector<double>& quadrature_values() const { return node_values_; }
    double tail_coefficient() const { return tail_; }
    double f_end() const { return f_end_; }

    /// int_0^inf F df, tail included. Half of the two-sided Parseval integral.
    double integral() const {
        double s = 0.0;
        for (std::size_t i = 0; i < nodes_.size(); ++i) s += weights_[i] * node_values_[i];
        return s + (f_end_ > 0.0 ? tail_ / f_end_ : 0.0);
    }

    /// int_a^b F df over the quadrature representation (a, b within [0, f_end]).
    /// Subpanels straddling a or b are counted by node membership.
    double band_integral(double a, double b) const {
        double s = 0.0;
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            if (nodes_[i] >= a && nodes_[i] < b) s += weights_[i] * node_values_[i];
        return s;
    }

    /// Linear interpolation of the grid values (0 outside the grid).
    double value_at(double f) const {
        const auto& x = grid_.values();
        if (f < x.front() || f > x.back()) return 0.0;
        auto it = std::lower_bound(x.begin(), x.end(), f);
        const std::size_t k = static_cast<std::size_t>(it - x.begin());
        if (k == 0) return values_[0];
        const double s = (f - x[k - 1]) / (x[k] - x[k - 1]);
        return values_[k - 1] + s * (values_[k] - values_[k - 1]);
    }

private:
    FrequencyGrid grid_;
    std::vector<double> values_;
    double t_ = 0.0;
    std::string summary_;
    std::vector<double> nodes_;
    std::vector<double> weights_;
    std::vector<double> node_values_;
    double tail_ = 0.0;
    double f_end_ = 0.0;
};

namespace detail {

inline double sinc(double x) {
    if (std::abs(x) < 1e-8) return 1.0 - (kPi * x) * (kPi * x) / 6.0;
    const double px = kPi * x;
    return std::sin(px) / px;
}

/// Gauss-Legendre nodes and weights covering [0, f_end]: breakpoints at 0
/// and at every grid value, each gap split into subpanels of width <= 1/t.
inline void frequency_nodes(const FrequencyGrid& grid, double t, std::size_t n, std::vector<double>& nodes,
                            std::vector<double>& weights) {
    const auto& rule = gauss_legendre(n);
    std::vector<double> breaks{0.0};
    for (double f : grid.values())
        if (f > breaks.back()) breaks.push_back(f);
    nodes.clear();
    weights.clear();
    for (std::size_t i = 1; i < breaks.size(); ++i) {
        const double a = breaks[i - 1];
        const double b = breaks[i];
        const auto m = static_cast<std::size_t>(std::max(1.0, std::ceil((b - a) * t - 1e-9)));
        const double h = (b - a) / static_cast<double>(m);
        for (std::size_t p = 0; p < m; ++p) {
            const double mid = a + (static_cast<double>(p) + 0.5) * h;
            for (std::size_t j = 0; j < n; ++j) {
                nodes.push_back(mid + 0.5 * h * rule.nodes[j]);
                weights.push_back(0.5 * h * rule.weights[j]);
            }
        }
    }
}

template <class Eval>
FilterFunction build_filter(const FrequencyGrid& grid, double t, std::string summary, double tail,
                            std::size_t nodes_per_panel, Eval&& eval) {
    std::vector<double> nodes, weights;
    frequency_nodes(grid, t, nodes_per_panel, nodes, weights);
    std::vector<double> values = eval(grid.values());
    std::vector<double> node_values = eval(nodes);
    return FilterFunction(grid, std::move(values), t, std::move(summary), std::move(nodes), std::move(weights),
                          std::move(node_values), tail);
}

inline void check_pulse_times(const std::vector<double>& times, double t) {
    if (!(t > 0.0)) throw InvalidArgument("observation time must be positive");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < 0.0 || times[i] > t) throw InvalidArgument("pulse time outside [0, t]");
        if (i > 0 && !(times[i] > times[i - 1])) throw InvalidArgument("pulse times must be sorted and distinct");
    }
}

/// Fourier amplitude of the +-1 switching function of an ideal pulse train.
inline std::complex<double> switching_amplitude(const std::vector<double>& times, double t, double f) {
    std::complex<double> s = 0.0;
    double a = 0.0;
    double sign = 1.0;
    for (std::size_t k = 0; k <= times.size(); ++k) {
        const double b = k < times.size() ? times[k] : t;
        const double d = b - a;
        if (d > 0.0) s += sign * d * sinc(f * d) * std::polar(1.0, -kPi * f * (a + b));
        a = b;
        sign = -sign;
    }
    return s;
}

}  // namespace detail

/// F_t for ideal (instantaneous) pi pulses at `times`; exact closed form.
inline FilterFunction filter_pulse_train(const std::vector<double>& times, double t, const FrequencyGrid& grid,
                                         std::size_t nodes_per_panel = 10) {
    detail::check_pulse_times(times, t);
    const double tail = (2.0 + 4.0 * static_cast<double>(times.size())) / (4.0 * kPi * kPi);
    auto eval = [&](const std::vector<double>& f) {
        std::vector<double> out(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) out[i] = std::norm(detail::switching_amplitude(times, t, f[i]));
        return out;
    };
    return detail::build_filter(grid, t,
                                "pulse train: " + std::to_string(times.size()) + " ideal pi pulses, t = " +
                                    std::to_string(t) + " s",
                                tail, nodes_per_panel, eval);
}

inline FilterFunction filter_pulse_train(const PulseTrain& train, const FrequencyGrid& grid) {
    return filter_pulse_train(train.times, train.total_time, grid);
}

/// Continuous resonant drive:
/// F = (t^2/4) [sinc^2(t (f - f0)) + sinc^2(t (f + f0))], sinc(x) = sin(pi x)/(pi x).
/// The cross term between the two lobes is dropped; it is O(1/(f0 t)).
inline FilterFunction filter_constant_drive(double f0, double t, const FrequencyGrid& grid,
                                            std::size_t nodes_per_panel = 10) {
    detail::require(f0 > 0.0, "drive frequency must be positive");
    detail::require(t > 0.0, "observation time must be positive");
    auto eval = [&](const std::vector<double>& f) {
        std::vector<double> out(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) {
            const double a = detail::sinc(t * (f[i] - f0));
            const double b = detail::sinc(t * (f[i] + f0));
            out[i] = 0.25 * t * t * (a * a + b * b);
        }
        return out;
    };
    return detail::build_filter(grid, t,
                                "constant drive: " + std::to_string(f0) + " Hz, t = " + std::to_string(t) + " s",
                                1.0 / (4.0 * kPi * kPi), nodes_per_panel, eval);
}

namespace detail {

/// Quadrature of int_0^t exp(-2 pi i f s) c(s) ds for many f at once.
///
/// Frequencies are grouped into octave bands; in each band the integrand
/// weights c(s) are tabulated once on Gauss-Legendre panels no wider than
/// 1/(10 (f_top + f_drive)) / 2^level, and the oscillating factor is built
/// by complex recurrence along each interval.
class NumericFourier {
public:
    template <class CosTheta>
    NumericFourier(CosTheta&& c, std::vector<double> breaks, double drive_hz, double t)
        : breaks_(std::move(breaks)), drive_hz_(drive_hz), t_(t), cos_theta_(std::forward<CosTheta>(c)) {}

    std::vector<std::complex<double>> evaluate(const std::vector<double>& freqs, std::size_t level,
                                               unsigned threads) const {
        std::vector<std::complex<double>> out(freqs.size());
        const double base = 1.0 / t_;
        std::vector<std::vector<std::size_t>> bands;
        for (std::size_t i = 0; i < freqs.size(); ++i) {
            const double f = freqs[i];
            const std::size_t b = f <= base ? 0 : static_cast<std::size_t>(std::ceil(std::log2(f / base) - 1e-12));
            if (b >= bands.size()) bands.resize(b + 1);
            bands[b].push_back(i);
        }
        const auto& rule = gauss_legendre(kNodes);
        for (std::size_t b = 0; b < bands.size(); ++b) {
            if (bands[b].empty()) continue;
            const double top = base * std::ldexp(1.0, static_cast<int>(b));
            const double hmax = 1.0 / (10.0 * (top + drive_hz_)) / std::ldexp(1.0, static_cast<int>(level));
            // Tabulate w_j c(s) per interval.
            struct Interval {
                double a;
                double h;
                std::size_t m;
                std::size_t offset;
            };
            std::vector<Interval> intervals;
            std::vector<double> wc;
            for (std::size_t k = 1; k < breaks_.size(); ++k) {
                const double a = breaks_[k - 1];
                const double len = breaks_[k] - a;
                const auto m = static_cast<std::size_t>(std::max(1.0, std::ceil(len / hmax)));
                const double h = len / static_cast<double>(m);
                intervals.push_back({a, h, m, wc.size()});
                for (std::size_t p = 0; p < m; ++p) {
                    const double mid = a + (static_cast<double>(p) + 0.5) * h;
                    for (std::size_t j = 0; j < kNodes; ++j)
                        wc.push_back(0.5 * h * rule.weights[j] * cos_theta_(mid + 0.5 * h * rule.nodes[j]));
                }
            }
            const auto& idx = bands[b];
            parallel_for(idx.size(), threads, [&](std::size_t ii) {
                const double f = freqs[idx[ii]];
                std::complex<double> total = 0.0;
                for (const auto& iv : intervals) {
                    std::complex<double> q[kNodes];
                    for (std::size_t j = 0; j < kNodes; ++j) q[j] = std::polar(1.0, -kPi * f * iv.h * rule.nodes[j]);
                    const std::complex<double> r = std::polar(1.0, -kTwoPi * f * iv.h);
                    std::complex<double> z = std::polar(1.0, -kTwoPi * f * (iv.a + 0.5 * iv.h));
                    std::complex<double> acc = 0.0;
                    const double* w = wc.data() + iv.offset;
                    for (std::size_t p = 0; p < iv.m; ++p, w += kNodes) {
                        std::complex<double> panel = 0.0;
                        for (std::size_t j = 0; j < kNodes; ++j) panel += w[j] * q[j];
                        acc += z * panel;
                        z *= r;
                    }
                    total += acc;
                }
                out[idx[ii]] = total;
            });
        }
        return out;
    }

private:
    static constexpr std::size_t kNodes = 4;
    std::vector<double> breaks_;
    double drive_hz_;
    double t_;
    std::function<double(double)> cos_theta_;
};

}  // namespace detail

/// F_t by direct quadrature of the Fourier integral for any waveform.
///
/// Point values are verified by step halving: the panel width is halved
/// until |S_h - S_{h/2}| / max(|S_{h/2}|, 1e-3 t) <= quad.tolerance on every
/// grid frequency. Throws NumericFailure with the achieved error otherwise.
inline FilterFunction filter_numeric(const ControlWaveform& w, double t, const FrequencyGrid& grid,
                                     const QuadratureSettings& quad = {}) {
    detail::require(t > 0.0, "observation time must be positive");
    validate(w);
    ControlWaveform wave = w;
    if (const auto* p = std::get_if<PulseTrain>(&w); p && p->pulse_duration > 0.0) wave = to_sampled(*p, p->pulse_duration);

    std::vector<double> breaks{0.0, t};
    double tail = 0.0;
    std::function<double(double)> c;
    if (const auto* p = std::get_if<PulseTrain>(&wave)) {
        detail::check_pulse_times(p->times, t);
        breaks.insert(breaks.end(), p->times.begin(), p->times.end());
        tail = (2.0 + 4.0 * static_cast<double>(p->times.size())) / (4.0 * kPi * kPi);
        const auto times = p->times;
        c = [times](double s) {
            const auto n = std::upper_bound(times.begin(), times.end(), s) - times.begin();
            return (n % 2 == 0) ? 1.0 : -1.0;
        };
    } else {
        if (const auto* s = std::get_if<Sampled>(&wave)) {
            if (s->end_time() < t * (1.0 - 1e-12)) throw InvalidArgument("sampled envelope shorter than t");
            for (double k : s->times())
                if (k > 0.0 && k < t) breaks.push_back(k);
        }
        c = [wave, t](double s) { return std::cos(accumulated_phase(wave, std::min(s, t))); };
        const double c0 = c(0.0);
        const double ct = c(t);
        tail = (c0 * c0 + ct * ct) / (4.0 * kPi * kPi);
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    const double drive_hz = max_rabi_omega(wave) / kTwoPi;
    detail::NumericFourier fourier(c, breaks, drive_hz, t);

    std::size_t level = 0;
    auto coarse = fourier.evaluate(grid.values(), level, quad.threads);
    double err = 0.0;
    for (;;) {
        auto fine = fourier.evaluate(grid.values(), level + 1, quad.threads);
        err = 0.0;
        for (std::size_t i = 0; i < fine.size(); ++i)
            err = std::max(err, std::abs(coarse[i] - fine[i]) / std::max(std::abs(fine[i]), 1e-3 * t));
        if (err <= quad.tolerance) break;
        if (level + 1 >= quad.max_refinements)
            throw NumericFailure("filter quadrature did not converge", err);
        coarse = std::move(fine);
        ++level;
    }

    auto eval = [&](const std::vector<double>& f) {
        const auto amp = fourier.evaluate(f, level, quad.threads);
        std::vector<double> out(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) out[i] = std::norm(amp[i]);
        return out;
    };
    return detail::build_filter(grid, t, describe(w) + ", t = " + std::to_string(t) + " s (numeric)", tail,
                                quad.nodes_per_panel, eval);
}

/// Picks the closed form where one exists and quadrature otherwise.
inline FilterFunction filter_for(const ControlWaveform& w, double t, const FrequencyGrid& grid,
                                 const QuadratureSettings& quad = {}) {
    if (const auto* p = std::get_if<PulseTrain>(&w); p && p->pulse_duration == 0.0)
        return filter_pulse_train(p->times, t, grid, quad.nodes_per_panel);
    if (const auto* d = std::get_if<ConstantDrive>(&w)) return filter_constant_drive(d->rabi_hz, t, grid, quad.nodes_per_panel);
    return filter_numeric(w, t, grid, quad);
}

}  // namespace ddspec
