#pragma once

// Detuning trace sources.
//
// A trace source exposes n_traces(), n_steps(), dt() and
// fill_trace(i, span): value k of trace i is the detuning (rad/s) held over
// [k dt, (k+1) dt). Sources are deterministic functions of their seed and
// the trace index, so traces can be produced in any order on any thread.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ddspec/errors.hpp"
#include "ddspec/parallel.hpp"
#include "ddspec/rng.hpp"

namespace ddspec {

template <class S>
concept TraceSource = requires(const S& s, std::size_t i, std::span<double> out) {
    { s.n_traces() } -> std::convertible_to<std::size_t>;
    { s.n_steps() } -> std::convertible_to<std::size_t>;
    { s.dt() } -> std::convertible_to<double>;
    s.fill_trace(i, out);
};

/// Materialized set of detuning traces on a common time grid.
class DetuningEnsemble {
public:
    DetuningEnsemble() = default;

    DetuningEnsemble(double dt, std::size_t n_steps, std::size_t n_atoms, std::vector<double> data,
                     std::uint64_t seed = 0, std::string config = {}, double removed_offset = 0.0)
        : dt_(dt), n_steps_(n_steps), n_atoms_(n_atoms), data_(std::move(data)), seed_(seed),
          config_(std::move(config)), removed_offset_(removed_offset) {
        detail::require(dt_ > 0.0, "time step must be positive");
        detail::require(data_.size() == n_steps_ * n_atoms_, "trace data size mismatch");
    }

    std::size_t n_traces() const { return n_atoms_; }
    std::size_t n_steps() const { return n_steps_; }
    double dt() const { return dt_; }
    double duration() const { return dt_ * static_cast<double>(n_steps_); }
    std::uint64_t seed() const { return seed_; }
    const std::string& config() const { return config_; }
    double removed_offset() const { return removed_offset_; }

    std::span<const double> trace(std::size_t i) const { return {data_.data() + i * n_steps_, n_steps_}; }

    void fill_trace(std::size_t i, std::span<double> out) const {
        const auto t = trace(i);
        std::copy(t.begin(), t.end(), out.begin());
    }

    const std::vector<double>& data() const { return data_; }

private:
    double dt_ = 1.0;
    std::size_t n_steps_ = 0;
    std::size_t n_atoms_ = 0;
    std::vector<double> data_;
    std::uint64_t seed_ = 0;
    std::string config_;
    double removed_offset_ = 0.0;
};

template <TraceSource S>
DetuningEnsemble materialize(const S& source, unsigned threads = 1, std::uint64_t seed = 0, std::string config = {},
                             double removed_offset = 0.0) {
    const std::size_t n = source.n_steps();
    std::vector<double> data(n * source.n_traces());
    parallel_for(source.n_traces(), threads,
                 [&](std::size_t i) { source.fill_trace(i, std::span<double>(data.data() + i * n, n)); });
    return DetuningEnsemble(source.dt(), n, source.n_traces(), std::move(data), seed, std::move(config),
                            removed_offset);
}

struct NoiseGrid {
    std::size_t n_traces = 1;
    std::size_t n_steps = 1;
    double dt = 1e-4;
    std::uint64_t seed = 0;
};

/// Ornstein-Uhlenbeck detuning: stationary Gaussian with variance sigma^2 and
/// correlation e^{-rate |tau|}, sampled exactly as an AR(1) chain.
/// rate = 0 gives a static Gaussian offset per trace.
class OrnsteinUhlenbeckNoise {
public:
    OrnsteinUhlenbeckNoise(double sigma, double rate, NoiseGrid grid) : sigma_(sigma), rate_(rate), grid_(grid) {
        detail::require(sigma >= 0.0 && rate >= 0.0, "noise sigma and rate must be nonnegative");
        detail::require(grid.dt > 0.0 && grid.n_steps > 0, "bad noise grid");
    }

    std::size_t n_traces() const { return grid_.n_traces; }
    std::size_t n_steps() const { return grid_.n_steps; }
    double dt() const { return grid_.dt; }

    void fill_trace(std::size_t i, std::span<double> out) const {
        CounterRng rng(grid_.seed, streams::kSynthetic + i);
        const double a = std::exp(-rate_ * grid_.dt);
        const double b = sigma_ * std::sqrt(std::max(0.0, 1.0 - a * a));
        double x = sigma_ * rng.normal();
        for (std::size_t k = 0; k < grid_.n_steps; ++k) {
            out[k] = x;
            x = a * x + b * rng.normal();
        }
    }

private:
    double sigma_;
    double rate_;
    NoiseGrid grid_;
};

/// Telegraph-like process: the value is redrawn from N(0, sigma^2) at Poisson
/// times of the given rate, which also yields correlation sigma^2 e^{-rate |tau|}.
class PoissonRedrawNoise {
public:
    PoissonRedrawNoise(double sigma, double rate, NoiseGrid grid) : sigma_(sigma), rate_(rate), grid_(grid) {
        detail::require(sigma >= 0.0 && rate >= 0.0, "noise sigma and rate must be nonnegative");
        detail::require(grid.dt > 0.0 && grid.n_steps > 0, "bad noise grid");
    }

    std::size_t n_traces() const { return grid_.n_traces; }
    std::size_t n_steps() const { return grid_.n_steps; }
    double dt() const { return grid_.dt; }

    void fill_trace(std::size_t i, std::span<double> out) const {
        CounterRng rng(grid_.seed, streams::kSynthetic + i);
        double x = sigma_ * rng.normal();
        double next = rate_ > 0.0 ? rng.exponential(rate_) : INFINITY;
        for (std::size_t k = 0; k < grid_.n_steps; ++k) {
            const double mid = (static_cast<double>(k) + 0.5) * grid_.dt;
            while (next <= mid) {
                x = sigma_ * rng.normal();
                next += rng.exponential(rate_);
            }
            out[k] = x;
        }
    }

private:
    double sigma_;
    double rate_;
    NoiseGrid grid_;
};

class ZeroNoise {
public:
    explicit ZeroNoise(NoiseGrid grid) : grid_(grid) {}
    std::size_t n_traces() const { return grid_.n_traces; }
    std::size_t n_steps() const { return grid_.n_steps; }
    double dt() const { return grid_.dt; }
    void fill_trace(std::size_t, std::span<double> out) const { std::fill(out.begin(), out.end(), 0.0); }

private:
    NoiseGrid grid_;
};

}  // namespace ddspec
