#pragma once

/// @file fitness.hpp
/// @brief Error metrics: 1 - R^2 on Pearson correlation (the evolution
/// objective), scaling of predictions onto the observed response, and RMSE.
///
/// Standard deviations are population (divide by n) throughout.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "expression.hpp"

namespace pgp {

struct QualityVector {
    std::size_t complexity = 1;
    double error = 1.0;
    std::size_t age = 0;

    friend bool operator==(const QualityVector&, const QualityVector&) = default;
};

struct MomentSummary {
    double mean = 0.0;
    double stddev = 0.0;
};

inline MomentSummary moments(std::span<const double> v) {
    if (v.empty()) return {};
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return {m, std::sqrt(ss / static_cast<double>(v.size()))};
}

inline bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

/// Pearson correlation; nullopt if either side has zero variance or a
/// non-finite entry.
inline std::optional<double> pearson(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2) return std::nullopt;
    if (!all_finite(a) || !all_finite(b)) return std::nullopt;
    const auto ma = moments(a).mean;
    const auto mb = moments(b).mean;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma, db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa <= 0.0 || sbb <= 0.0) return std::nullopt;
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

/// 1 - corr(pred, obs)^2, in [0, 1]. Non-finite or constant predictions score 1.
inline double scaled_correlation_error(std::span<const double> pred, std::span<const double> obs) {
    if (pred.size() != obs.size())
        throw InputError("scaled_correlation_error: length mismatch (" + std::to_string(pred.size()) + " vs " +
                         std::to_string(obs.size()) + ")");
    if (pred.size() < 2) throw InputError("scaled_correlation_error: need at least 2 samples");
    const auto r = pearson(pred, obs);
    if (!r) return 1.0;
    return std::clamp(1.0 - *r * *r, 0.0, 1.0);
}

/// Affine map a + b * pred giving the scaled prediction.
struct LinearScaling {
    double intercept = 0.0;
    double slope = 1.0;

    [[nodiscard]] double operator()(double v) const { return intercept + slope * v; }
    friend bool operator==(const LinearScaling&, const LinearScaling&) = default;
};

/// Scaling that gives `pred` the mean and standard deviation of `obs`, with
/// the sign chosen so the result correlates positively with `obs`. Returns
/// nullopt for constant or non-finite predictions.
inline std::optional<LinearScaling> fit_scaling(std::span<const double> pred, std::span<const double> obs) {
    if (pred.size() != obs.size() || pred.empty())
        throw InputError("fit_scaling: length mismatch or empty input");
    if (!all_finite(pred)) return std::nullopt;
    const auto mp = moments(pred);
    const auto mo = moments(obs);
    if (mp.stddev <= 0.0) return std::nullopt;
    const auto r = pearson(pred, obs);
    const double sign = (r && *r < 0.0) ? -1.0 : 1.0;
    const double slope = sign * mo.stddev / mp.stddev;
    return LinearScaling{mo.mean - slope * mp.mean, slope};
}

/// Scaled predictions; nullopt signals a constant or non-finite `pred`, for
/// which callers report the observed mean instead.
inline std::optional<std::vector<double>> scale_to_observed(std::span<const double> pred,
                                                            std::span<const double> obs) {
    const auto s = fit_scaling(pred, obs);
    if (!s) return std::nullopt;
    const auto mp = moments(pred).mean;
    const auto mo = moments(obs).mean;
    const double ratio = s->slope;
    std::vector<double> out(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) out[i] = (pred[i] - mp) * ratio + mo;
    return out;
}

inline double rmse(std::span<const double> pred, std::span<const double> obs) {
    if (pred.size() != obs.size() || pred.empty()) throw InputError("rmse: length mismatch or empty input");
    double ss = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) ss += (obs[i] - pred[i]) * (obs[i] - pred[i]);
    return std::sqrt(ss / static_cast<double>(pred.size()));
}

/// RMSE divided by the observed range, as a fraction.
inline double normalized_rmse(std::span<const double> pred, std::span<const double> obs) {
    const double e = rmse(pred, obs);
    const auto [lo, hi] = std::minmax_element(obs.begin(), obs.end());
    if (*hi - *lo <= 0.0) throw InputError("normalized_rmse: observed response is constant");
    return e / (*hi - *lo);
}

}  // namespace pgp
