#pragma once

// One-sided bath coupling spectrum G(f), 1/s, f in Hz.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "ddspec/constants.hpp"
#include "ddspec/errors.hpp"
#include "ddspec/frequency_grid.hpp"

namespace ddspec {

enum class SpectrumOrigin { Analytic, Simulated, Measured };

/// G(f) = g0 / (1 + (f / f_c)^2).
struct Lorentzian {
    double g0 = 0.0;   // 1/s
    double f_c = 1.0;  // Hz
};

/// Linear interpolation between grid points, clamped to the end values.
struct Tabulated {
    FrequencyGrid grid;
    std::vector<double> values;
    std::vector<double> sigma;  // empty when unknown
    std::vector<bool> clamped;  // set by invert_spectrum where R fell below the bias
};

class BathSpectrum {
public:
    BathSpectrum() : model_(Lorentzian{0.0, 1.0}) {}

    BathSpectrum(Lorentzian l, SpectrumOrigin origin = SpectrumOrigin::Analytic) : model_(l), origin_(origin) {
        detail::require(l.g0 >= 0.0, "Lorentzian g0 must be nonnegative");
        detail::require(l.f_c > 0.0, "Lorentzian corner frequency must be positive");
    }

    BathSpectrum(Tabulated t, SpectrumOrigin origin = SpectrumOrigin::Measured) : model_(std::move(t)), origin_(origin) {
        const auto& tab = std::get<Tabulated>(model_);
        detail::require(tab.values.size() == tab.grid.size(), "spectrum values do not match grid");
        detail::require(tab.sigma.empty() || tab.sigma.size() == tab.grid.size(), "spectrum sigma does not match grid");
        for (double v : tab.values) {
            if (!(v >= 0.0)) throw InvalidArgument("spectrum values must be nonnegative");
        }
    }

    /// Spectrum of exponentially correlated noise with variance sigma^2 (rad/s)^2
    /// and correlation rate gamma (1/s): G(f) = 2 sigma^2 gamma / (gamma^2 + (2 pi f)^2).
    static BathSpectrum lorentzian_for(double sigma, double gamma) {
        detail::require(gamma > 0.0, "correlation rate must be positive");
        return BathSpectrum(Lorentzian{2.0 * sigma * sigma / gamma, gamma / kTwoPi});
    }

    static BathSpectrum zero() { return BathSpectrum(Lorentzian{0.0, 1.0}); }

    double operator()(double f) const {
        f = std::abs(f);
        if (const auto* l = std::get_if<Lorentzian>(&model_)) {
            const double x = f / l->f_c;
            return l->g0 / (1.0 + x * x);
        }
        const auto& t = std::get<Tabulated>(model_);
        const auto& x = t.grid.values();
        if (x.size() == 1 || f <= x.front()) return t.values.front();
        if (f >= x.back()) return t.values.back();
        auto it = std::upper_bound(x.begin(), x.end(), f);
        const std::size_t k = static_cast<std::size_t>(it - x.begin());
        const double s = (f - x[k - 1]) / (x[k] - x[k - 1]);
        return t.values[k - 1] + s * (t.values[k] - t.values[k - 1]);
    }

    bool is_lorentzian() const { return std::holds_alternative<Lorentzian>(model_); }
    const Lorentzian& lorentzian() const { return std::get<Lorentzian>(model_); }
    const Tabulated& tabulated() const { return std::get<Tabulated>(model_); }
    SpectrumOrigin origin() const { return origin_; }

    /// Frequency support for overlap checks; Lorentzians cover [0, inf).
    double support_min() const { return is_lorentzian() ? 0.0 : tabulated().grid.front(); }
    double support_max() const { return is_lorentzian() ? INFINITY : tabulated().grid.back(); }

    BathSpectrum scaled(double c) const {
        detail::require(c >= 0.0, "scale must be nonnegative");
        if (is_lorentzian()) {
            auto l = lorentzian();
            l.g0 *= c;
            return BathSpectrum(l, origin_);
        }
        auto t = tabulated();
        for (double& v : t.values) v *= c;
        for (double& s : t.sigma) s *= c;
        return BathSpectrum(std::move(t), origin_);
    }

private:
    std::variant<Lorentzian, Tabulated> model_;
    SpectrumOrigin origin_ = SpectrumOrigin::Analytic;
};

inline std::string to_string(SpectrumOrigin o) {
    switch (o) {
    case SpectrumOrigin::Analytic: return "analytic";
    case SpectrumOrigin::Simulated: return "simulated";
    case SpectrumOrigin::Measured: return "measured";
    }
    return "analytic";
}

struct LorentzianFit {
    Lorentzian params;
    double chi2 = 0.0;
    std::size_t points = 0;
};

/// Least-squares Lorentzian through tabulated data.
///
/// For fixed f_c the best g0 is linear, so only log f_c is searched (golden
/// section over [f_lo, f_hi]). Points are weighted by 1/sigma^2 when sigma is
/// available and positive, uniformly otherwise.
inline LorentzianFit fit_lorentzian(const std::vector<double>& f, const std::vector<double>& g,
                                    const std::vector<double>& sigma = {}, double f_lo = 0.0, double f_hi = 0.0) {
    detail::require(f.size() == g.size() && f.size() >= 2, "need at least two spectrum points");
    detail::require(sigma.empty() || sigma.size() == f.size(), "sigma size mismatch");
    std::vector<double> w(f.size(), 1.0);
    if (!sigma.empty()) {
        double smin = INFINITY;
        for (double s : sigma)
            if (s > 0.0) smin = std::min(smin, s);
        for (std::size_t i = 0; i < f.size(); ++i) {
            const double s = sigma[i] > 0.0 ? sigma[i] : (std::isfinite(smin) ? smin : 1.0);
            w[i] = 1.0 / (s * s);
        }
    }
    if (f_lo <= 0.0) f_lo = std::max(1e-3, 0.01 * *std::max_element(f.begin(), f.end()) / static_cast<double>(f.size()));
    if (f_hi <= 0.0) f_hi = 100.0 * *std::max_element(f.begin(), f.end());
    auto solve = [&](double fc, double& g0) {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            const double b = 1.0 / (1.0 + (f[i] / fc) * (f[i] / fc));
            num += w[i] * g[i] * b;
            den += w[i] * b * b;
        }
        g0 = den > 0.0 ? std::max(0.0, num / den) : 0.0;
        double chi2 = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            const double r = g[i] - g0 / (1.0 + (f[i] / fc) * (f[i] / fc));
            chi2 += w[i] * r * r;
        }
        return chi2;
    };
    // Coarse scan then golden section on log f_c.
    const std::size_t n_scan = 200;
    double best_x = std::log(f_lo);
    double best = INFINITY;
    const double x_lo = std::log(f_lo), x_hi = std::log(f_hi);
    const double step = (x_hi - x_lo) / static_cast<double>(n_scan);
    double g0;
    for (std::size_t i = 0; i <= n_scan; ++i) {
        const double x = x_lo + step * static_cast<double>(i);
        const double c = solve(std::exp(x), g0);
        if (c < best) {
            best = c;
            best_x = x;
        }
    }
    double a = std::max(x_lo, best_x - step), b = std::min(x_hi, best_x + step);
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = solve(std::exp(x1), g0), f2 = solve(std::exp(x2), g0);
    for (int it = 0; it < 100 && b - a > 1e-12; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = solve(std::exp(x1), g0);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = solve(std::exp(x2), g0);
        }
    }
    LorentzianFit out;
    const double fc = std::exp(0.5 * (a + b));
    out.chi2 = solve(fc, g0);
    out.params = Lorentzian{g0, fc};
    out.points = f.size();
    return out;
}

inline LorentzianFit fit_lorentzian(const BathSpectrum& s) {
    detail::require(!s.is_lorentzian(), "spectrum is already a Lorentzian");
    const auto& t = s.tabulated();
    return fit_lorentzian(t.grid.values(), t.values, t.sigma);
}

}  // namespace ddspec
