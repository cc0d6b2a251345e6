#pragma once

// Control waveforms and dynamical-decoupling pulse sequences.
//
// Units: times in s, Rabi and modulation frequencies in Hz, the sampled
// Rabi envelope Omega(t) in rad/s, phases and accumulated rotation angles
// in rad.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "ddspec/constants.hpp"
#include "ddspec/errors.hpp"

namespace ddspec {

/// Train of pi pulses. Zero duration means ideal, instantaneous pulses.
struct PulseTrain {
    std::vector<double> times;   // s, strictly increasing, within [0, total_time]
    std::vector<double> phases;  // rad, one per pulse
    double total_time = 0.0;     // s, observation time
    double pulse_area = kPi;
    double pulse_duration = 0.0;
};

/// Continuous resonant drive at Rabi frequency rabi_hz.
///
/// The drive axis is (cos phase, sin phase, 0). It defaults to y so that the
/// default x-polarized superposition is driven transversely.
struct ConstantDrive {
    double rabi_hz = 0.0;
    double phase = kPi / 2;
};

/// Amplitude-modulated drive Omega(t) = 2 pi f0 (1 + beta (f_m / f0) cos(2 pi f_m t)).
struct SidebandDrive {
    double carrier_hz = 0.0;
    double modulation_index = 0.0;
    double modulation_hz = 0.0;
    double phase = kPi / 2;
};

/// Piecewise-linear Rabi envelope on a time grid, with a drive-axis phase
/// per knot (the phase of knot k holds on [t_k, t_{k+1})).
class Sampled {
public:
    Sampled() = default;

    Sampled(std::vector<double> times, std::vector<double> omega, std::vector<double> phase = {})
        : times_(std::move(times)), omega_(std::move(omega)), phase_(std::move(phase)) {
        detail::require(times_.size() >= 2, "sampled waveform needs at least two knots");
        detail::require(omega_.size() == times_.size(), "sampled waveform: omega size mismatch");
        if (phase_.empty()) phase_.assign(times_.size(), kPi / 2);
        detail::require(phase_.size() == times_.size(), "sampled waveform: phase size mismatch");
        detail::require(times_.front() == 0.0, "sampled waveform must start at t = 0");
        for (std::size_t i = 1; i < times_.size(); ++i)
            detail::require(times_[i] > times_[i - 1], "sampled waveform times must be strictly increasing");
        theta_.resize(times_.size());
        theta_[0] = 0.0;
        for (std::size_t i = 1; i < times_.size(); ++i)
            theta_[i] = theta_[i - 1] + 0.5 * (omega_[i] + omega_[i - 1]) * (times_[i] - times_[i - 1]);
    }

    const std::vector<double>& times() const { return times_; }
    const std::vector<double>& omega() const { return omega_; }
    const std::vector<double>& phase() const { return phase_; }
    double end_time() const { return times_.back(); }

    /// Index k with times[k] <= t < times[k+1] (clamped to the last interval).
    std::size_t interval(double t) const {
        auto it = std::upper_bound(times_.begin(), times_.end(), t);
        std::size_t k = it == times_.begin() ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
        return std::min(k, times_.size() - 2);
    }

    double omega_at(double t) const {
        const std::size_t k = interval(t);
        const double s = (t - times_[k]) / (times_[k + 1] - times_[k]);
        return omega_[k] + s * (omega_[k + 1] - omega_[k]);
    }

    /// Exact integral of the piecewise-linear envelope from 0 to t.
    double theta(double t) const {
        const std::size_t k = interval(t);
        const double h = times_[k + 1] - times_[k];
        const double x = t - times_[k];
        return theta_[k] + omega_[k] * x + 0.5 * (omega_[k + 1] - omega_[k]) * x * x / h;
    }

    double max_omega() const {
        double m = 0.0;
        for (double w : omega_) m = std::max(m, std::abs(w));
        return m;
    }

private:
    std::vector<double> times_;
    std::vector<double> omega_;
    std::vector<double> phase_;
    std::vector<double> theta_;
};

using ControlWaveform = std::variant<PulseTrain, ConstantDrive, SidebandDrive, Sampled>;

enum class SequenceKind { Hahn, CPMG, UDD, CDD };
enum class PhasePattern { Uniform, AlternatePairs };

struct SequenceSpec {
    SequenceKind kind = SequenceKind::CPMG;
    std::size_t n_pulses = 1;  // Hahn, CPMG, UDD
    std::size_t cdd_order = 1; // CDD
    double total_time = 1.0;   // s
    PhasePattern phase_pattern = PhasePattern::Uniform;
};

struct ExperimentConfig {
    double observation_time = 1.0;
    double alpha = kDefaultAlpha;
    double t1_time = 0.0;  // s; 0 means no T1 process
    std::uint64_t rng_seed = 0;

    bool has_t1() const { return t1_time > 0.0; }

    void validate() const {
        detail::require(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]");
        detail::require(observation_time > 0.0, "observation time must be positive");
        detail::require(t1_time >= 0.0, "T1 must be positive when present");
    }
};

namespace detail {
inline void check_count_time(std::size_t n, double total_time) {
    if (n == 0) throw InvalidArgument("pulse count must be at least 1");
    if (!(total_time > 0.0)) throw InvalidArgument("total time must be positive");
}
}  // namespace detail

/// CPMG: t_j = (j - 1/2) T / n, j = 1..n.
inline std::vector<double> cpmg_times(std::size_t n, double total_time) {
    detail::check_count_time(n, total_time);
    std::vector<double> t(n);
    for (std::size_t j = 0; j < n; ++j)
        t[j] = (static_cast<double>(j) + 0.5) * total_time / static_cast<double>(n);
    return t;
}

/// UDD: t_j = T sin^2(pi j / (2n + 2)), j = 1..n.
inline std::vector<double> udd_times(std::size_t n, double total_time) {
    detail::check_count_time(n, total_time);
    std::vector<double> t(n);
    for (std::size_t j = 1; j <= n; ++j) {
        const double s = std::sin(kPi * static_cast<double>(j) / (2.0 * static_cast<double>(n) + 2.0));
        t[j - 1] = total_time * s * s;
    }
    return t;
}

/// Number of pulses of cdd_times(order, T): floor(2^(order+2) / 3).
inline std::size_t cdd_pulse_count(std::size_t order) {
    return static_cast<std::size_t>((std::size_t{1} << (order + 2)) / 3);
}

/// Concatenated DD.
///
/// Built from C_0 = free evolution and C_k = C_{k-1} pi C_{k-1} pi. Adjacent
/// pi pairs cancel and a pulse landing on the final boundary is dropped
/// (it only flips the final state). Order k of this function is the
/// concatenation level k + 1, so order 1 is the two-pulse sequence
/// [T/4, 3T/4] and the admissible counts are 2, 5, 10, 21, 42, 85, ...
inline std::vector<double> cdd_times(std::size_t order, double total_time) {
    if (order == 0) throw InvalidArgument("CDD order must be at least 1");
    if (!(total_time > 0.0)) throw InvalidArgument("total time must be positive");
    if (order > 20) throw InvalidArgument("CDD order too large");
    const std::size_t level = order + 1;
    // Sign of the switching function on 2^level equal slots: slot i has
    // sign (-1)^popcount(i) under the concatenation rule.
    const std::size_t slots = std::size_t{1} << level;
    std::vector<double> t;
    int prev = 1;
    for (std::size_t i = 1; i < slots; ++i) {
        const int sign = (__builtin_popcountll(i) % 2 == 0) ? 1 : -1;
        if (sign != prev) t.push_back(total_time * static_cast<double>(i) / static_cast<double>(slots));
        prev = sign;
    }
    return t;
}

/// Uniform: all zero. AlternatePairs: 0, 0, pi, pi, 0, 0, ...
inline std::vector<double> assign_phases(std::size_t n, PhasePattern pattern) {
    std::vector<double> phases(n, 0.0);
    if (pattern == PhasePattern::AlternatePairs)
        for (std::size_t i = 0; i < n; ++i)
            if ((i / 2) % 2 == 1) phases[i] = kPi;
    return phases;
}

inline std::vector<double> sequence_times(const SequenceSpec& spec) {
    switch (spec.kind) {
    case SequenceKind::Hahn: return cpmg_times(1, spec.total_time);
    case SequenceKind::CPMG: return cpmg_times(spec.n_pulses, spec.total_time);
    case SequenceKind::UDD: return udd_times(spec.n_pulses, spec.total_time);
    case SequenceKind::CDD: return cdd_times(spec.cdd_order, spec.total_time);
    }
    throw InvalidArgument("unknown sequence kind");
}

inline void validate(const PulseTrain& p) {
    detail::require(p.total_time > 0.0, "pulse train total time must be positive");
    detail::require(p.phases.size() == p.times.size(), "one phase per pulse required");
    for (std::size_t i = 0; i < p.times.size(); ++i) {
        detail::require(p.times[i] >= 0.0 && p.times[i] <= p.total_time, "pulse time outside [0, T]");
        if (i > 0) detail::require(p.times[i] > p.times[i - 1], "pulse times must be strictly increasing");
    }
}

inline PulseTrain make_pulse_train(std::vector<double> times, double total_time,
                                   PhasePattern pattern = PhasePattern::Uniform) {
    PulseTrain p;
    p.phases = assign_phases(times.size(), pattern);
    p.times = std::move(times);
    p.total_time = total_time;
    validate(p);
    return p;
}

inline PulseTrain make_sequence(const SequenceSpec& spec) {
    return make_pulse_train(sequence_times(spec), spec.total_time, spec.phase_pattern);
}

/// Free evolution over [0, total_time].
inline PulseTrain free_evolution(double total_time) { return make_pulse_train({}, total_time); }

/// Replaces every pulse by a triangular Rabi ramp of the given full width
/// and area pi, centred on the pulse time.
inline Sampled to_sampled(const PulseTrain& train, double ramp_width) {
    validate(train);
    detail::require(ramp_width > 0.0, "ramp width must be positive");
    std::vector<double> t{0.0};
    std::vector<double> w{0.0};
    std::vector<double> ph{train.phases.empty() ? 0.0 : train.phases.front()};
    const double peak = 2.0 * train.pulse_area / ramp_width;
    for (std::size_t i = 0; i < train.times.size(); ++i) {
        const double c = train.times[i];
        const double a = c - 0.5 * ramp_width;
        const double b = c + 0.5 * ramp_width;
        detail::require(a > t.back() && b < train.total_time, "ramps overlap or leave [0, T]");
        t.insert(t.end(), {a, c, b});
        w.insert(w.end(), {0.0, peak, 0.0});
        ph.insert(ph.end(), {train.phases[i], train.phases[i], train.phases[i]});
    }
    t.push_back(train.total_time);
    w.push_back(0.0);
    ph.push_back(ph.back());
    return Sampled(std::move(t), std::move(w), std::move(ph));
}

inline void validate(const ControlWaveform& w) {
    std::visit(
        [](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, PulseTrain>) {
                validate(v);
            } else if constexpr (std::is_same_v<T, ConstantDrive>) {
                detail::require(v.rabi_hz > 0.0, "Rabi frequency must be positive");
            } else if constexpr (std::is_same_v<T, SidebandDrive>) {
                detail::require(v.carrier_hz > 0.0, "carrier frequency must be positive");
                detail::require(v.modulation_hz > 0.0, "modulation frequency must be positive");
                detail::require(v.modulation_index >= 0.0, "modulation index must be nonnegative");
            }
        },
        w);
}

/// theta(t) = int_0^t Omega. Ideal pulse trains step by the pulse area at each
/// pulse (a pulse at exactly t counts as applied).
inline double accumulated_phase(const ControlWaveform& w, double t) {
    if (!(t >= 0.0)) throw InvalidArgument("time must be nonnegative");
    return std::visit(
        [t](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, PulseTrain>) {
                if (t > v.total_time) throw InvalidArgument("time beyond the observation window");
                const auto n = std::upper_bound(v.times.begin(), v.times.end(), t) - v.times.begin();
                return v.pulse_area * static_cast<double>(n);
            } else if constexpr (std::is_same_v<T, ConstantDrive>) {
                return kTwoPi * v.rabi_hz * t;
            } else if constexpr (std::is_same_v<T, SidebandDrive>) {
                return kTwoPi * v.carrier_hz * t + v.modulation_index * std::sin(kTwoPi * v.modulation_hz * t);
            } else {
                if (t > v.end_time() * (1.0 + 1e-12)) throw InvalidArgument("time beyond the sampled envelope");
                return v.theta(std::min(t, v.end_time()));
            }
        },
        w);
}

/// Largest Rabi angular frequency of the waveform in rad/s (0 for ideal pulses).
inline double max_rabi_omega(const ControlWaveform& w) {
    return std::visit(
        [](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, PulseTrain>) {
                return v.pulse_duration > 0.0 ? v.pulse_area / v.pulse_duration : 0.0;
            } else if constexpr (std::is_same_v<T, ConstantDrive>) {
                return kTwoPi * v.rabi_hz;
            } else if constexpr (std::is_same_v<T, SidebandDrive>) {
                return kTwoPi * (v.carrier_hz + v.modulation_index * v.modulation_hz);
            } else {
                return v.max_omega();
            }
        },
        w);
}

inline std::string to_string(SequenceKind k) {
    switch (k) {
    case SequenceKind::Hahn: return "Hahn";
    case SequenceKind::CPMG: return "CPMG";
    case SequenceKind::UDD: return "UDD";
    case SequenceKind::CDD: return "CDD";
    }
    return "?";
}

inline std::string to_string(PhasePattern p) {
    return p == PhasePattern::Uniform ? "Uniform" : "AlternatePairs";
}

/// One-line description used in reports and file headers.
inline std::string describe(const ControlWaveform& w) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, PulseTrain>) {
                return "pulse train: " + std::to_string(v.times.size()) + " pi pulses over " +
                       std::to_string(v.total_time) + " s";
            } else if constexpr (std::is_same_v<T, ConstantDrive>) {
                return "constant drive: " + std::to_string(v.rabi_hz) + " Hz";
            } else if constexpr (std::is_same_v<T, SidebandDrive>) {
                return "sideband drive: carrier " + std::to_string(v.carrier_hz) + " Hz, beta " +
                       std::to_string(v.modulation_index) + ", f_m " + std::to_string(v.modulation_hz) + " Hz";
            } else {
                return "sampled envelope: " + std::to_string(v.times().size()) + " knots over " +
                       std::to_string(v.end_time()) + " s";
            }
        },
        w);
}

}  // namespace ddspec
