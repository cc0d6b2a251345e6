#pragma once

// Classical Monte-Carlo motion of atoms in an optical trap with elastic
// collisions, producing detuning traces delta(t) = eta (U(r(t)) - <U>) / hbar.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ddspec/constants.hpp"
#include "ddspec/errors.hpp"
#include "ddspec/noise.hpp"
#include "ddspec/parallel.hpp"
#include "ddspec/rng.hpp"

namespace ddspec {

/// Harmonic potential; x and y are radial, z is axial.
struct Harmonic3D {};

/// Two Gaussian beams crossing in the x-y plane, symmetric about x.
struct CrossedGaussian {
    double waist = 50e-6;          // m
    double power = 5.0;            // W per beam
    double wavelength = 1.06e-6;   // m
    double crossing_angle = kPi / 2;
};

struct TrapConfig {
    double radial_hz = 600.0;
    double axial_hz = 160.0;
    double temperature = 7e-6;  // K
    double atom_mass = si::rb87_mass;
    double eta = 6.6e-5;  // differential shift / trap potential
    std::variant<Harmonic3D, CrossedGaussian> shape = Harmonic3D{};

    double max_frequency() const { return std::max(radial_hz, axial_hz); }

    void validate() const {
        detail::require(radial_hz > 0.0 && axial_hz > 0.0, "trap frequencies must be positive");
        detail::require(temperature > 0.0, "temperature must be positive");
        detail::require(atom_mass > 0.0, "atom mass must be positive");
        detail::require(eta > 0.0, "differential shift ratio must be positive");
        if (const auto* g = std::get_if<CrossedGaussian>(&shape)) {
            detail::require(g->waist > 0.0 && g->power > 0.0 && g->wavelength > 0.0, "bad Gaussian beam parameters");
            detail::require(g->crossing_angle > 0.0 && g->crossing_angle < kPi, "crossing angle must lie in (0, pi)");
        }
    }
};

/// Collisions: Poisson process of the given mean rate; every event redraws
/// the velocity from the thermal distribution. atom_number is metadata only.
struct CollisionConfig {
    double rate = 0.0;  // 1/s
    double atom_number = 0.0;
};

struct SimulationSettings {
    std::size_t n_atoms = 100;
    double duration = 1.0;  // s
    double dt = 0.0;        // s; 0 picks 1 / (40 f_max)
    std::uint64_t seed = 0;
};

struct AtomState {
    std::array<double, 3> r{};  // m
    std::array<double, 3> v{};  // m/s
};

namespace detail {

/// Two-level dipole potential of Rb-87 D2 light at wavelength lambda, J per (W/m^2).
inline double dipole_coefficient(double lambda) {
    const double omega_a = kTwoPi * si::speed_of_light / 780.241e-9;
    const double gamma = kTwoPi * 6.0666e6;
    const double omega = kTwoPi * si::speed_of_light / lambda;
    const double c = si::speed_of_light;
    return -3.0 * kPi * c * c / (2.0 * omega_a * omega_a * omega_a) *
           (gamma / (omega_a - omega) + gamma / (omega_a + omega));
}

}  // namespace detail

/// Potential energy and dynamics of one atom.
class TrapModel {
public:
    explicit TrapModel(const TrapConfig& cfg) : cfg_(cfg) {
        cfg.validate();
        omega_ = {kTwoPi * cfg.radial_hz, kTwoPi * cfg.radial_hz, kTwoPi * cfg.axial_hz};
        if (const auto* g = std::get_if<CrossedGaussian>(&cfg.shape)) {
            gauss_ = *g;
            coeff_ = detail::dipole_coefficient(g->wavelength);
            z_r_ = kPi * g->waist * g->waist / g->wavelength;
            const double h = 0.5 * g->crossing_angle;
            beams_[0] = {std::cos(h), std::sin(h), 0.0};
            beams_[1] = {std::cos(h), -std::sin(h), 0.0};
            u_min_ = beam_potential({0.0, 0.0, 0.0});
        }
    }

    bool harmonic() const { return std::holds_alternative<Harmonic3D>(cfg_.shape); }
    const std::array<double, 3>& omega() const { return omega_; }

    /// Potential energy in J, zero at the trap bottom.
    double potential(const std::array<double, 3>& r) const {
        if (harmonic()) {
            double u = 0.0;
            for (int k = 0; k < 3; ++k) u += 0.5 * cfg_.atom_mass * omega_[k] * omega_[k] * r[k] * r[k];
            return u;
        }
        return beam_potential(r) - u_min_;
    }

    double kinetic(const std::array<double, 3>& v) const {
        return 0.5 * cfg_.atom_mass * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    }

    double energy(const AtomState& s) const { return potential(s.r) + kinetic(s.v); }

    /// Exact harmonic phase-space rotation over dt.
    void advance_harmonic(AtomState& s, const std::array<double, 3>& c, const std::array<double, 3>& sn) const {
        for (int k = 0; k < 3; ++k) {
            const double x = s.r[k], v = s.v[k], w = omega_[k];
            s.r[k] = x * c[k] + v / w * sn[k];
            s.v[k] = -x * w * sn[k] + v * c[k];
        }
    }

    std::array<double, 3> force(const std::array<double, 3>& r) const {
        const double h = 1e-4 * gauss_.waist;
        std::array<double, 3> f{};
        for (int k = 0; k < 3; ++k) {
            auto a = r, b = r;
            a[k] += h;
            b[k] -= h;
            f[k] = -(beam_potential(a) - beam_potential(b)) / (2.0 * h);
        }
        return f;
    }

    double thermal_velocity_sigma() const { return std::sqrt(si::boltzmann * cfg_.temperature / cfg_.atom_mass); }

    void thermal_velocity(CounterRng& rng, AtomState& s) const {
        const double sv = thermal_velocity_sigma();
        for (double& v : s.v) v = sv * rng.normal();
    }

    /// Position drawn from exp(-U / kT).
    void thermal_position(CounterRng& rng, AtomState& s) const {
        const double kt = si::boltzmann * cfg_.temperature;
        if (harmonic()) {
            for (int k = 0; k < 3; ++k) s.r[k] = std::sqrt(kt / cfg_.atom_mass) / omega_[k] * rng.normal();
            return;
        }
        // Metropolis chain started at the trap centre with harmonic-sized proposals.
        std::array<double, 3> r{0.0, 0.0, 0.0};
        double u = potential(r);
        std::array<double, 3> step;
        for (int k = 0; k < 3; ++k) step[k] = std::sqrt(kt / cfg_.atom_mass) / omega_[k];
        for (int it = 0; it < 400; ++it) {
            std::array<double, 3> q = r;
            for (int k = 0; k < 3; ++k) q[k] += step[k] * rng.normal();
            const double uq = potential(q);
            if (uq <= u || rng.uniform() < std::exp(-(uq - u) / kt)) {
                r = q;
                u = uq;
            }
        }
        s.r = r;
    }

private:
    double beam_potential(const std::array<double, 3>& r) const {
        double u = 0.0;
        for (const auto& n : beams_) {
            const double s = r[0] * n[0] + r[1] * n[1] + r[2] * n[2];
            const double rho2 = r[0] * r[0] + r[1] * r[1] + r[2] * r[2] - s * s;
            const double w2 = gauss_.waist * gauss_.waist * (1.0 + (s / z_r_) * (s / z_r_));
            const double intensity = 2.0 * gauss_.power / (kPi * w2) * std::exp(-2.0 * rho2 / w2);
            u += coeff_ * intensity;
        }
        return u;
    }

    TrapConfig cfg_;
    std::array<double, 3> omega_{};
    CrossedGaussian gauss_{};
    double coeff_ = 0.0;
    double z_r_ = 1.0;
    double u_min_ = 0.0;
    std::array<std::array<double, 3>, 2> beams_{};
};

/// Lazily evaluated ensemble of simulated atoms.
///
/// Atom i draws from the counter-based stream (seed, i), so any trace can be
/// regenerated independently. Construction runs one pass over all atoms to
/// find the ensemble-time mean of eta U / hbar, which fill_trace subtracts.
class BathSimulator {
public:
    BathSimulator(TrapConfig trap, CollisionConfig coll, SimulationSettings sim, unsigned threads = 1)
        : trap_(std::move(trap)), coll_(coll), sim_(sim), model_(trap_) {
        detail::require(sim_.n_atoms >= 1, "need at least one atom");
        detail::require(coll_.rate >= 0.0, "collision rate must be nonnegative");
        if (!(sim_.duration > 0.0)) throw InvalidArgument("simulation duration must be positive");
        const double f_max = trap_.max_frequency();
        if (sim_.dt == 0.0) sim_.dt = 1.0 / (40.0 * f_max);
        if (!(sim_.dt > 0.0)) throw InvalidArgument("time step must be positive");
        if (sim_.dt > 1.0 / (20.0 * f_max) * (1.0 + 1e-12))
            throw PreconditionViolation("time step does not resolve the trap motion: need dt <= 1/(20 f_max)");
        n_steps_ = static_cast<std::size_t>(std::llround(sim_.duration / sim_.dt));
        detail::require(n_steps_ >= 1, "duration shorter than one step");
        for (int k = 0; k < 3; ++k) {
            const double w = model_.omega()[k];
            cos_full_[k] = std::cos(w * sim_.dt);
            sin_full_[k] = std::sin(w * sim_.dt);
            cos_half_[k] = std::cos(0.5 * w * sim_.dt);
            sin_half_[k] = std::sin(0.5 * w * sim_.dt);
        }
        std::vector<double> sums(sim_.n_atoms);
        parallel_for(sim_.n_atoms, threads, [&](std::size_t i) {
            std::vector<double> buf(n_steps_);
            run_atom(i, buf, nullptr);
            double s = 0.0;
            for (double x : buf) s += x;
            sums[i] = s;
        });
        double total = 0.0;
        for (double s : sums) total += s;
        offset_ = total / (static_cast<double>(n_steps_) * static_cast<double>(sim_.n_atoms));
    }

    std::size_t n_traces() const { return sim_.n_atoms; }
    std::size_t n_steps() const { return n_steps_; }
    double dt() const { return sim_.dt; }
    double removed_offset() const { return offset_; }
    const TrapConfig& trap() const { return trap_; }
    const CollisionConfig& collisions() const { return coll_; }
    const SimulationSettings& settings() const { return sim_; }
    const TrapModel& model() const { return model_; }

    void fill_trace(std::size_t i, std::span<double> out) const {
        run_atom(i, out, nullptr);
        for (double& x : out) x -= offset_;
    }

    /// Speeds right after each collision of atom i, for distribution checks.
    std::vector<double> collision_speeds(std::size_t i) const {
        std::vector<double> buf(n_steps_);
        std::vector<double> speeds;
        run_atom(i, buf, &speeds);
        return speeds;
    }

    /// Uncentred eta U / hbar of atom i; optionally records post-collision speeds.
    void run_atom(std::size_t i, std::span<double> out, std::vector<double>* speeds) const {
        CounterRng rng(sim_.seed, streams::kAtoms + i);
        AtomState s;
        model_.thermal_position(rng, s);
        model_.thermal_velocity(rng, s);
        const double dt = sim_.dt;
        const double scale = trap_.eta / si::hbar;
        double next = coll_.rate > 0.0 ? rng.exponential(coll_.rate) : INFINITY;
        auto collision_step = [&] { return std::isfinite(next) ? std::llround(next / dt) : -1ll; };
        long long cstep = collision_step();
        const bool harmonic = model_.harmonic();
        std::array<double, 3> f = harmonic ? std::array<double, 3>{} : model_.force(s.r);
        double u_prev = harmonic ? 0.0 : model_.potential(s.r);
        const double inv_m = 1.0 / trap_.atom_mass;
        for (std::size_t k = 0; k < n_steps_; ++k) {
            while (cstep == static_cast<long long>(k)) {
                model_.thermal_velocity(rng, s);
                if (speeds) speeds->push_back(std::sqrt(s.v[0] * s.v[0] + s.v[1] * s.v[1] + s.v[2] * s.v[2]));
                next += rng.exponential(coll_.rate);
                cstep = collision_step();
            }
            if (harmonic) {
                AtomState mid = s;
                model_.advance_harmonic(mid, cos_half_, sin_half_);
                out[k] = scale * model_.potential(mid.r);
                model_.advance_harmonic(s, cos_full_, sin_full_);
            } else {
                for (int d = 0; d < 3; ++d) {
                    s.v[d] += 0.5 * dt * f[d] * inv_m;
                    s.r[d] += dt * s.v[d];
                }
                f = model_.force(s.r);
                for (int d = 0; d < 3; ++d) s.v[d] += 0.5 * dt * f[d] * inv_m;
                const double u = model_.potential(s.r);
                out[k] = scale * 0.5 * (u_prev + u);
                u_prev = u;
            }
        }
    }

private:
    TrapConfig trap_;
    CollisionConfig coll_;
    SimulationSettings sim_;
    TrapModel model_;
    std::size_t n_steps_ = 0;
    double offset_ = 0.0;
    std::array<double, 3> cos_full_{}, sin_full_{}, cos_half_{}, sin_half_{};
};

/// Convenience wrapper returning the materialized ensemble.
inline DetuningEnsemble simulate_trajectories(const TrapConfig& trap, const CollisionConfig& coll,
                                              const SimulationSettings& sim, unsigned threads = 1) {
    BathSimulator bath(trap, coll, sim, threads);
    return materialize(bath, threads, sim.seed, {}, bath.removed_offset());
}

}  // namespace ddspec
