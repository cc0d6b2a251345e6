#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "ddspec/errors.hpp"

namespace ddspec {

enum class GridSpacing { Uniform, Log, Custom };

/// Sorted, nonnegative frequency samples in Hz.
class FrequencyGrid {
public:
    FrequencyGrid() = default;

    explicit FrequencyGrid(std::vector<double> values, GridSpacing spacing = GridSpacing::Custom)
        : values_(std::move(values)), spacing_(spacing) {
        detail::require(!values_.empty(), "frequency grid must not be empty");
        detail::require(values_.front() >= 0.0, "frequency grid values must be nonnegative");
        for (std::size_t i = 1; i < values_.size(); ++i)
            detail::require(values_[i] > values_[i - 1], "frequency grid must be strictly increasing");
    }

    static FrequencyGrid uniform(double lo, double hi, std::size_t n) {
        detail::require(n >= 2 && hi > lo && lo >= 0.0, "bad uniform grid bounds");
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
        v.back() = hi;
        return FrequencyGrid(std::move(v), GridSpacing::Uniform);
    }

    static FrequencyGrid log(double lo, double hi, std::size_t n) {
        detail::require(n >= 2 && hi > lo && lo > 0.0, "bad log grid bounds");
        std::vector<double> v(n);
        const double r = std::log(hi / lo);
        for (std::size_t i = 0; i < n; ++i) v[i] = lo * std::exp(r * static_cast<double>(i) / static_cast<double>(n - 1));
        v.front() = lo;
        v.back() = hi;
        return FrequencyGrid(std::move(v), GridSpacing::Log);
    }

    const std::vector<double>& values() const { return values_; }
    GridSpacing spacing() const { return spacing_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    double front() const { return values_.front(); }
    double back() const { return values_.back(); }

private:
    std::vector<double> values_;
    GridSpacing spacing_ = GridSpacing::Custom;
};

/// Default filter grid: 400 log-spaced points from 0.1/t up to
/// max(10 f0, 20 n / t, 100 / t), which covers the central lobe, the
/// CPMG harmonics and the drive resonance.
inline FrequencyGrid default_grid(double t, double drive_hz = 0.0, std::size_t n_pulses = 0, std::size_t points = 400) {
    detail::require(t > 0.0, "observation time must be positive");
    const double hi = std::max({10.0 * drive_hz, 20.0 * static_cast<double>(n_pulses) / t, 100.0 / t});
    return FrequencyGrid::log(0.1 / t, hi, points);
}

inline std::string to_string(GridSpacing s) {
    switch (s) {
    case GridSpacing::Uniform: return "uniform";
    case GridSpacing::Log: return "log";
    case GridSpacing::Custom: return "custom";
    }
    return "custom";
}

}  // namespace ddspec
