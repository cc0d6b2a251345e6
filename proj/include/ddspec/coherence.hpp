#pragma once

// Coherence curves and exponential decay fits.

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "ddspec/errors.hpp"

namespace ddspec {

struct DecayFit {
    double rate = 0.0;        // 1/s
    double rate_error = 0.0;  // 1/s, one standard deviation
    double intercept = 0.0;   // ln C at t = 0
    double chi2_per_dof = 0.0;
    std::size_t used_points = 0;
    bool nonexponential = false;
};

struct CoherenceCurve {
    std::vector<double> times;   // s
    std::vector<double> values;  // dimensionless
    std::vector<double> std_errors; // dimensionless, 0 for exact predictions
    std::optional<DecayFit> fit;

    std::size_t size() const { return times.size(); }
};

/// Reduced chi-square above which a curve is reported as nonexponential.
inline constexpr double kNonexponentialChi2 = 4.0;

/// Weighted least squares of ln C = b - R t.
///
/// Points with C <= 0 are skipped. The weight of a point is (C / stderr)^2;
/// a zero stderr takes the smallest positive one in the curve. When every
/// stderr is zero the fit is unweighted, the error comes from the residual
/// scatter, and no nonexponential flag is computed.
inline DecayFit fit_decay_rate(const CoherenceCurve& curve) {
    detail::require(curve.values.size() == curve.times.size(), "coherence curve size mismatch");
    const bool has_err = curve.std_errors.size() == curve.times.size();
    double smin = INFINITY;
    if (has_err)
        for (std::size_t i = 0; i < curve.size(); ++i)
            if (curve.std_errors[i] > 0.0 && curve.values[i] > 0.0) smin = std::min(smin, curve.std_errors[i]);
    const bool weighted = std::isfinite(smin);

    std::vector<double> x, y, w;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const double c = curve.values[i];
        if (!(c > 0.0)) continue;
        x.push_back(curve.times[i]);
        y.push_back(std::log(c));
        if (weighted) {
            const double s = curve.std_errors[i] > 0.0 ? curve.std_errors[i] : smin;
            w.push_back((c / s) * (c / s));
        } else {
            w.push_back(1.0);
        }
    }
    if (x.size() < 3) throw InsufficientData("need at least three positive coherence values to fit a decay rate");

    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sw += w[i];
        sx += w[i] * x[i];
        sy += w[i] * y[i];
        sxx += w[i] * x[i] * x[i];
        sxy += w[i] * x[i] * y[i];
    }
    const double det = sw * sxx - sx * sx;
    if (!(det > 0.0)) throw InsufficientData("coherence times must not all coincide");
    const double slope = (sw * sxy - sx * sy) / det;
    const double intercept = (sxx * sy - sx * sxy) / det;
    double chi2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (intercept + slope * x[i]);
        chi2 += w[i] * r * r;
    }
    const double dof = static_cast<double>(x.size() - 2);

    DecayFit fit;
    fit.rate = -slope;
    fit.intercept = intercept;
    fit.used_points = x.size();
    fit.chi2_per_dof = chi2 / dof;
    double var_slope = sw / det;
    if (weighted) {
        fit.nonexponential = fit.chi2_per_dof > kNonexponentialChi2;
    } else {
        var_slope *= fit.chi2_per_dof;
    }
    fit.rate_error = std::sqrt(var_slope);
    return fit;
}

}  // namespace ddspec
