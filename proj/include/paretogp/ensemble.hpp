#pragma once

/// @file ensemble.hpp
/// @brief Diverse model ensembles: median prediction with the member
/// standard deviation as the confidence band.
///
/// Evolved trees are scored by correlation, so their raw outputs live on an
/// arbitrary scale. Each member therefore carries the linear scaling that maps
/// its training predictions onto the observed response; ensemble statistics
/// are computed over scaled member outputs.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_set>
#include <vector>

#include "analysis.hpp"
#include "dataset.hpp"
#include "evolution.hpp"
#include "fitness.hpp"
#include "text.hpp"

namespace pgp {

struct EnsembleMember {
    GPModel model;
    LinearScaling scaling;
};

struct Ensemble {
    Schema schema;
    std::vector<EnsembleMember> members;
    std::size_t complexity_cap = 0;
    std::size_t requested_size = 0;
};

struct PredictionBand {
    double point = std::numeric_limits<double>::quiet_NaN();  // median of member outputs
    double spread = std::numeric_limits<double>::quiet_NaN(); // population std of member outputs
    bool valid = false;  // false when every member output is non-finite
};

/// Median (mean of the two central values for even counts) and population
/// standard deviation of the finite entries.
inline PredictionBand band_of(std::vector<double> values) {
    values.erase(std::remove_if(values.begin(), values.end(), [](double v) { return !std::isfinite(v); }), values.end());
    PredictionBand b;
    if (values.empty()) return b;
    b.valid = true;
    b.point = median_of(values);
    b.spread = moments(values).stddev;
    return b;
}

namespace detail {

inline double abs_corr(const std::vector<double>& a, const std::vector<double>& b) {
    const auto r = pearson(a, b);
    return r ? std::abs(*r) : 0.0;
}

}  // namespace detail

/// Greedy residual-diversity selection. Eligible: distinct expressions with
/// complexity <= cap and finite, non-constant training predictions. The seed
/// is the most typical candidate (highest median |corr| of its residuals to
/// everyone else's); each further pick minimises its maximum |corr| to the
/// members chosen so far. Ties go to lower error, then lower complexity,
/// then expression text.
inline Ensemble create_ensemble(const ModelSet& set, const AlignedDataset& training, std::size_t size,
                                std::size_t complexity_cap) {
    if (size == 0) throw InputError("create_ensemble: size must be positive");
    if (training.variables != set.schema.variables)
        throw InputError("create_ensemble: training data does not match the model set schema");
    struct Candidate {
        const GPModel* model;
        std::string text;
        LinearScaling scaling;
        std::vector<double> residual;
    };
    std::vector<Candidate> cands;
    std::unordered_set<std::string> seen;
    BatchEvaluator eval;
    for (const auto& m : set.models) {
        if (m.quality.complexity > complexity_cap) continue;
        auto text = format(m.tree);
        if (!seen.insert(text).second) continue;
        const auto pred = eval(m.tree, training.columns, training.rows());
        const auto s = fit_scaling(pred, training.response);
        if (!s) continue;
        std::vector<double> res(pred.size());
        for (std::size_t i = 0; i < pred.size(); ++i) res[i] = training.response[i] - (*s)(pred[i]);
        cands.push_back({&m, std::move(text), *s, std::move(res)});
    }
    if (cands.size() < size)
        throw InputError("create_ensemble: need " + std::to_string(size) + " eligible models under complexity " +
                         std::to_string(complexity_cap) + " but only " + std::to_string(cands.size()) +
                         " are available (short by " + std::to_string(size - cands.size()) + ")");

    const std::size_t n = cands.size();
    std::vector<std::vector<double>> corr(n, std::vector<double>(n, 1.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) corr[i][j] = corr[j][i] = detail::abs_corr(cands[i].residual, cands[j].residual);

    auto tie_break = [&](std::size_t a, std::size_t b) {
        const auto& qa = cands[a].model->quality;
        const auto& qb = cands[b].model->quality;
        if (qa.error != qb.error) return qa.error < qb.error;
        if (qa.complexity != qb.complexity) return qa.complexity < qb.complexity;
        return cands[a].text < cands[b].text;
    };

    std::size_t seed = 0;
    double best_typical = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> others;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) others.push_back(corr[i][j]);
        const double typical = others.empty() ? 0.0 : median_of(others);
        if (typical > best_typical || (typical == best_typical && tie_break(i, seed))) {
            best_typical = typical;
            seed = i;
        }
    }

    std::vector<std::size_t> chosen{seed};
    std::vector<bool> taken(n, false);
    taken[seed] = true;
    while (chosen.size() < size) {
        std::size_t pick = n;
        double pick_score = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            if (taken[i]) continue;
            double worst = 0.0;
            for (auto c : chosen) worst = std::max(worst, corr[i][c]);
            if (pick == n || worst < pick_score || (worst == pick_score && tie_break(i, pick))) {
                pick = i;
                pick_score = worst;
            }
        }
        taken[pick] = true;
        chosen.push_back(pick);
    }

    Ensemble e;
    e.schema = set.schema;
    e.complexity_cap = complexity_cap;
    e.requested_size = size;
    for (auto i : chosen) e.members.push_back({*cands[i].model, cands[i].scaling});
    return e;
}

/// Scaled output of every member for every row: out[member][row].
inline std::vector<std::vector<double>> member_predictions(const Ensemble& e, const AlignedDataset& rows) {
    if (rows.variables != e.schema.variables)
        throw InputError("ensemble_predict: dataset variables do not match the ensemble schema");
    BatchEvaluator eval;
    std::vector<std::vector<double>> out;
    for (const auto& m : e.members) {
        auto p = eval(m.model.tree, rows.columns, rows.rows());
        for (auto& v : p) v = m.scaling(v);
        out.push_back(std::move(p));
    }
    return out;
}

inline std::vector<PredictionBand> ensemble_predict(const Ensemble& e, const AlignedDataset& rows) {
    const auto preds = member_predictions(e, rows);
    std::vector<PredictionBand> out(rows.rows());
    std::vector<double> col(e.members.size());
    for (std::size_t r = 0; r < rows.rows(); ++r) {
        for (std::size_t k = 0; k < preds.size(); ++k) col[k] = preds[k][r];
        out[r] = band_of(col);
    }
    return out;
}

struct MemberReport {
    std::string expression;
    std::size_t complexity = 0;
    double train_error = 1.0;
    double test_error = 1.0;
    double test_normalized_rmse = std::numeric_limits<double>::quiet_NaN();
};

struct EnsembleReport {
    double normalized_rmse = std::numeric_limits<double>::quiet_NaN();
    double rmse = std::numeric_limits<double>::quiet_NaN();
    std::size_t invalid_rows = 0;
    std::vector<MemberReport> members;
    std::vector<double> observed;
    std::vector<PredictionBand> bands;
};

/// Test-set quality of the ensemble and of each member. Train errors are the
/// members' archived qualities. Rows where every member is non-finite are
/// counted and left out of the RMSE.
inline EnsembleReport evaluate_ensemble(const Ensemble& e, const AlignedDataset& test) {
    if (test.rows() == 0) throw InputError("evaluate_ensemble: empty test data");
    EnsembleReport rep;
    rep.observed = test.response;
    rep.bands = ensemble_predict(e, test);
    const auto preds = member_predictions(e, test);
    for (std::size_t k = 0; k < e.members.size(); ++k) {
        const auto& m = e.members[k];
        MemberReport mr;
        mr.expression = format(m.model.tree, e.schema.variables);
        mr.complexity = m.model.quality.complexity;
        mr.train_error = m.model.quality.error;
        mr.test_error = test.rows() >= 2 ? scaled_correlation_error(preds[k], test.response) : 1.0;
        if (all_finite(preds[k]) && moments(test.response).stddev > 0.0)
            mr.test_normalized_rmse = normalized_rmse(preds[k], test.response);
        rep.members.push_back(std::move(mr));
    }
    std::vector<double> p, o;
    for (std::size_t r = 0; r < test.rows(); ++r) {
        if (!rep.bands[r].valid) {
            ++rep.invalid_rows;
            continue;
        }
        p.push_back(rep.bands[r].point);
        o.push_back(test.response[r]);
    }
    if (!p.empty()) {
        rep.rmse = rmse(p, o);
        const auto [lo, hi] = std::minmax_element(o.begin(), o.end());
        if (*hi > *lo) rep.normalized_rmse = rep.rmse / (*hi - *lo);
    }
    return rep;
}

}  // namespace pgp
