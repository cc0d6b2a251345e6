#pragma once

// Stochastic Bloch evolution of single realizations and ensemble coherence.
//
// The Bloch vector obeys dr/dt = (Omega cos phi, Omega sin phi, delta) x r.
// Each step is one exact rotation (Rodrigues) about the step's rotation
// vector (delta_theta cos phi, delta_theta sin phi, delta dt), where
// delta_theta is the increment of the accumulated drive phase. Ideal pi
// pulses are instantaneous rotations about their equatorial axis.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <variant>
#include <vector>

#include "ddspec/coherence.hpp"
#include "ddspec/constants.hpp"
#include "ddspec/errors.hpp"
#include "ddspec/noise.hpp"
#include "ddspec/parallel.hpp"
#include "ddspec/rng.hpp"
#include "ddspec/waveform.hpp"

namespace ddspec {

struct BlochState {
    double u = 1.0;
    double v = 0.0;
    double w = 0.0;

    double norm() const { return std::sqrt(u * u + v * v + w * w); }
};

struct BlochOptions {
    /// Drive-induced shift of the transition, kappa * f_R^2 in Hz with f_R
    /// the instantaneous Rabi frequency in Hz (kappa in 1/Hz). Off when 0.
    double dressing_kappa = 0.0;
    /// Skip the dt resolution check (used by tests probing the integrator itself).
    bool check_resolution = true;
};

namespace detail {

/// Rotation of s by the angle |(ax, ay, az)| about its direction.
inline void rotate(BlochState& s, double ax, double ay, double az) {
    const double th2 = ax * ax + ay * ay + az * az;
    if (th2 == 0.0) return;
    const double th = std::sqrt(th2);
    double sinc_th, vers;  // sin(th)/th, (1 - cos th)/th^2
    if (th < 1e-4) {
        sinc_th = 1.0 - th2 / 6.0;
        vers = 0.5 - th2 / 24.0;
    } else {
        sinc_th = std::sin(th) / th;
        vers = (1.0 - std::cos(th)) / th2;
    }
    const double cos_th = std::cos(th);
    const double dot = ax * s.u + ay * s.v + az * s.w;
    const double cx = ay * s.w - az * s.v;
    const double cy = az * s.u - ax * s.w;
    const double cz = ax * s.v - ay * s.u;
    BlochState r;
    r.u = s.u * cos_th + cx * sinc_th + ax * dot * vers;
    r.v = s.v * cos_th + cy * sinc_th + ay * dot * vers;
    r.w = s.w * cos_th + cz * sinc_th + az * dot * vers;
    s = r;
}

inline void pi_pulse(BlochState& s, double phase, double area) {
    rotate(s, area * std::cos(phase), area * std::sin(phase), 0.0);
}

/// Drive evaluated on [a, b]: phase increment, axis phase and mid-point Rabi angular frequency.
struct DriveStep {
    double dtheta;
    double phase;
    double omega_mid;
};

inline DriveStep drive_step(const ConstantDrive& d, double a, double b) {
    const double om = kTwoPi * d.rabi_hz;
    return {om * (b - a), d.phase, om};
}

inline DriveStep drive_step(const SidebandDrive& d, double a, double b) {
    auto th = [&](double t) { return kTwoPi * d.carrier_hz * t + d.modulation_index * std::sin(kTwoPi * d.modulation_hz * t); };
    const double m = 0.5 * (a + b);
    const double om = kTwoPi * d.carrier_hz * (1.0 + d.modulation_index * d.modulation_hz / d.carrier_hz *
                                                          std::cos(kTwoPi * d.modulation_hz * m));
    return {th(b) - th(a), d.phase, om};
}

inline DriveStep drive_step(const Sampled& d, double a, double b) {
    const double m = 0.5 * (a + b);
    return {d.theta(b) - d.theta(a), d.phase()[d.interval(m)], d.omega_at(m)};
}

inline DriveStep drive_step(const PulseTrain&, double a, double b) {
    (void)a;
    (void)b;
    return {0.0, 0.0, 0.0};
}

template <class W>
void evolve_impl(const W& w, std::span<const double> delta, double dt, const std::vector<double>& samples,
                 BlochState s, const BlochOptions& opt, std::span<BlochState> out) {
    // Breakpoints inside the trace grid: pulses, sample times and envelope knots.
    std::vector<double> events;
    std::vector<double> pulse_times, pulse_phases;
    double area = kPi;
    if constexpr (std::is_same_v<W, PulseTrain>) {
        pulse_times = w.times;
        pulse_phases = w.phases;
        area = w.pulse_area;
    }
    if constexpr (std::is_same_v<W, Sampled>) events = w.times();
    events.insert(events.end(), pulse_times.begin(), pulse_times.end());
    events.insert(events.end(), samples.begin(), samples.end());
    std::sort(events.begin(), events.end());
    events.erase(std::unique(events.begin(), events.end()), events.end());

    const double t_end = samples.empty() ? 0.0 : samples.back();
    const double two_pi_kappa = kTwoPi * opt.dressing_kappa;
    std::size_t next_pulse = 0;
    std::size_t next_sample = 0;
    auto flush = [&](double t) {
        while (next_pulse < pulse_times.size() && pulse_times[next_pulse] <= t) {
            pi_pulse(s, pulse_phases[next_pulse], area);
            ++next_pulse;
        }
        while (next_sample < samples.size() && samples[next_sample] <= t) out[next_sample++] = s;
    };
    flush(0.0);
    double t = 0.0;
    std::size_t ev = 0;
    while (ev < events.size() && events[ev] <= 0.0) ++ev;
    for (std::size_t k = 0; k < delta.size() && next_sample < samples.size(); ++k) {
        const double step_end = std::min(static_cast<double>(k + 1) * dt, t_end);
        while (t < step_end) {
            double b = step_end;
            if (ev < events.size() && events[ev] < b) b = events[ev];
            const DriveStep d = drive_step(w, t, b);
            const double det = delta[k] + two_pi_kappa * (d.omega_mid / kTwoPi) * (d.omega_mid / kTwoPi);
            rotate(s, d.dtheta * std::cos(d.phase), d.dtheta * std::sin(d.phase), det * (b - t));
            t = b;
            while (ev < events.size() && events[ev] <= t) ++ev;
            flush(t);
        }
    }
    if (next_sample < samples.size()) throw InvalidArgument("detuning trace does not cover the sample times");
}

}  // namespace detail

/// States at the requested (sorted) sample times for one detuning realization.
inline std::vector<BlochState> evolve_realization(std::span<const double> delta, const ControlWaveform& w, double dt,
                                                  const std::vector<double>& sample_times,
                                                  BlochState initial = {}, const BlochOptions& opt = {}) {
    detail::require(dt > 0.0, "time step must be positive");
    for (std::size_t i = 0; i < sample_times.size(); ++i) {
        detail::require(sample_times[i] >= 0.0, "sample times must be nonnegative");
        if (i > 0) detail::require(sample_times[i] >= sample_times[i - 1], "sample times must be sorted");
    }
    if (!sample_times.empty() && sample_times.back() > dt * static_cast<double>(delta.size()) * (1.0 + 1e-12))
        throw InvalidArgument("detuning trace does not cover the sample times");
    validate(w);
    ControlWaveform wave = w;
    if (const auto* p = std::get_if<PulseTrain>(&w); p && p->pulse_duration > 0.0) wave = to_sampled(*p, p->pulse_duration);
    if (opt.check_resolution) {
        double dmax = 0.0;
        for (double x : delta) dmax = std::max(dmax, std::abs(x));
        const double fmax = std::max(dmax, max_rabi_omega(wave)) / kTwoPi;
        if (fmax > 0.0 && dt > 1.0 / (20.0 * fmax) * (1.0 + 1e-12))
            throw PreconditionViolation("time step too coarse: need dt <= 1/(20 max(|delta|, Omega)/(2 pi))");
    }
    std::vector<BlochState> out(sample_times.size());
    std::visit([&](const auto& v) { detail::evolve_impl(v, delta, dt, sample_times, initial, opt, out); }, wave);
    return out;
}

struct EnsembleOptions {
    unsigned threads = 1;
    std::size_t bootstrap = 200;
    std::uint64_t seed = 0;
    double t1 = std::numeric_limits<double>::infinity();  // s; applies exp(-2 t / T1)
    BlochOptions bloch{};
    BlochState initial{};
};

/// Coherence |<r>| over the ensemble for several waveforms sharing one set
/// of sample times. Each trace is generated once and reused.
template <TraceSource S>
std::vector<CoherenceCurve> ensemble_coherence(const S& source, const std::vector<ControlWaveform>& waveforms,
                                               const std::vector<double>& sample_times,
                                               const EnsembleOptions& opt = {}) {
    const std::size_t atoms = source.n_traces();
    if (atoms == 0) throw InvalidArgument("empty ensemble");
    const std::size_t nw = waveforms.size();
    const std::size_t ns = sample_times.size();
    // states[(atom * nw + wf) * ns + sample]
    std::vector<BlochState> states(atoms * nw * ns);
    parallel_for(atoms, opt.threads, [&](std::size_t a) {
        std::vector<double> trace(source.n_steps());
        source.fill_trace(a, trace);
        for (std::size_t j = 0; j < nw; ++j) {
            const auto r = evolve_realization(trace, waveforms[j], source.dt(), sample_times, opt.initial, opt.bloch);
            std::copy(r.begin(), r.end(), states.begin() + static_cast<std::ptrdiff_t>((a * nw + j) * ns));
        }
    });

    std::vector<CoherenceCurve> curves(nw);
    for (std::size_t j = 0; j < nw; ++j) {
        auto& c = curves[j];
        c.times = sample_times;
        c.values.assign(ns, 0.0);
        c.std_errors.assign(ns, 0.0);
        auto length = [&](const std::vector<std::size_t>* pick, std::size_t s) {
            double u = 0, v = 0, w = 0;
            for (std::size_t i = 0; i < atoms; ++i) {
                const std::size_t a = pick ? (*pick)[i] : i;
                const auto& st = states[(a * nw + j) * ns + s];
                u += st.u;
                v += st.v;
                w += st.w;
            }
            const double n = static_cast<double>(atoms);
            return std::sqrt(u * u + v * v + w * w) / n;
        };
        for (std::size_t s = 0; s < ns; ++s) c.values[s] = length(nullptr, s);
        if (opt.bootstrap > 1 && atoms > 1) {
            CounterRng rng(opt.seed, streams::kBootstrap + j);
            std::vector<double> sum(ns, 0.0), sum2(ns, 0.0);
            std::vector<std::size_t> pick(atoms);
            for (std::size_t b = 0; b < opt.bootstrap; ++b) {
                for (auto& p : pick) p = static_cast<std::size_t>(rng.uniform() * static_cast<double>(atoms));
                for (std::size_t s = 0; s < ns; ++s) {
                    const double l = length(&pick, s);
                    sum[s] += l;
                    sum2[s] += l * l;
                }
            }
            const double B = static_cast<double>(opt.bootstrap);
            for (std::size_t s = 0; s < ns; ++s) {
                const double m = sum[s] / B;
                c.std_errors[s] = std::sqrt(std::max(0.0, (sum2[s] / B - m * m) * B / (B - 1.0)));
            }
        }
        if (std::isfinite(opt.t1)) {
            detail::require(opt.t1 > 0.0, "T1 must be positive");
            for (std::size_t s = 0; s < ns; ++s) {
                const double e = std::exp(-2.0 * sample_times[s] / opt.t1);
                c.values[s] *= e;
                c.std_errors[s] *= e;
            }
        }
    }
    return curves;
}

template <TraceSource S>
CoherenceCurve ensemble_coherence(const S& source, const ControlWaveform& w, const std::vector<double>& sample_times,
                                  const EnsembleOptions& opt = {}) {
    return ensemble_coherence(source, std::vector<ControlWaveform>{w}, sample_times, opt).front();
}

}  // namespace ddspec
