#pragma once

/// @file analysis.hpp
/// @brief Post-run model curation and feature selection.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "dataset.hpp"
#include "evolution.hpp"
#include "fitness.hpp"
#include "interval.hpp"
#include "pareto.hpp"
#include "text.hpp"

namespace pgp {

struct SelectionSpec {
    double max_error = 1.0;
    std::size_t max_complexity = 1000;
    double retain_fraction = 1.0;

    friend bool operator==(const SelectionSpec&, const SelectionSpec&) = default;
};

struct ModelSet {
    Schema schema;
    std::vector<GPModel> models;
    SelectionSpec spec;
    std::size_t source_size = 0;       // models offered to the selection
    std::size_t after_thresholds = 0;  // models passing both thresholds
    std::string diagnostics;           // set when the selection came out empty
};

/// True when interval propagation over `ranges` is bounded and singularity free.
inline bool is_robust(const Tree& t, std::span<const Interval> ranges) {
    return !interval_eval(t, ranges).pathological;
}

/// Keeps models with a bounded, non-pathological response over `ranges`,
/// deduplicated by expression text.
inline std::vector<GPModel> filter_robust(const std::vector<GPModel>& models, std::span<const Interval> ranges) {
    std::vector<GPModel> out;
    std::unordered_set<std::string> seen;
    for (const auto& m : models)
        if (is_robust(m.tree, ranges) && seen.insert(format(m.tree)).second) out.push_back(m);
    return out;
}

inline ModelCollection filter_robust(const ModelCollection& c) {
    return {c.schema, filter_robust(c.models, c.schema.ranges)};
}

/// Threshold filter, then the share `retain_fraction` (rounded up) closest to
/// the 2-D (complexity, error) front: whole layers first, the overflowing
/// layer ordered by error, then complexity, then text.
inline ModelSet select_model_set(const ModelCollection& source, const SelectionSpec& spec) {
    if (source.models.empty()) throw InputError("select_model_set: no models to select from");
    if (!(spec.retain_fraction > 0.0 && spec.retain_fraction <= 1.0))
        throw InputError("select_model_set: retain_fraction must lie in (0, 1]");
    ModelSet out;
    out.schema = source.schema;
    out.spec = spec;
    out.source_size = source.models.size();
    std::vector<GPModel> pool;
    for (const auto& m : source.models)
        if (m.quality.error <= spec.max_error && m.quality.complexity <= spec.max_complexity) pool.push_back(m);
    out.after_thresholds = pool.size();
    if (pool.empty()) {
        out.diagnostics = "no model satisfies error <= " + format_number(spec.max_error) + " and complexity <= " +
                          std::to_string(spec.max_complexity) + " (" + std::to_string(source.models.size()) +
                          " candidates)";
        return out;
    }
    const auto keep = static_cast<std::size_t>(std::ceil(spec.retain_fraction * static_cast<double>(pool.size()) - 1e-9));
    std::vector<Objectives<2>> obj;
    std::vector<std::string> text;
    for (const auto& m : pool) {
        obj.push_back(objectives2(m));
        text.push_back(format(m.tree));
    }
    const auto idx = select_by_layers<2>(obj, std::max<std::size_t>(keep, 1), [&](std::size_t a, std::size_t b) {
        if (obj[a][1] != obj[b][1]) return obj[a][1] < obj[b][1];
        if (obj[a][0] != obj[b][0]) return obj[a][0] < obj[b][0];
        return text[a] < text[b];
    });
    for (auto i : idx) out.models.push_back(pool[i]);
    return out;
}

struct VariableStat {
    std::size_t index = 0;
    std::string name;
    double presence = 0.0;                // share of models using the variable
    std::optional<double> contribution;   // median error increase; nullopt when absent from every model
    std::size_t models_with = 0;
    std::size_t rank = 0;                 // 1-based within the report's ordering
};

/// Presence of every schema variable, sorted by presence descending (ties by index).
inline std::vector<VariableStat> variable_presence(const ModelSet& set) {
    if (set.models.empty()) throw InputError("variable_presence: empty model set");
    const std::size_t k = set.schema.variables.size();
    std::vector<VariableStat> out(k);
    for (std::size_t v = 0; v < k; ++v) out[v] = {v, set.schema.variables[v], 0.0, std::nullopt, 0, 0};
    for (const auto& m : set.models)
        for (auto v : variables_used(m.tree))
            if (v < k) ++out[v].models_with;
    for (auto& s : out) s.presence = static_cast<double>(s.models_with) / static_cast<double>(set.models.size());
    std::stable_sort(out.begin(), out.end(), [](const VariableStat& a, const VariableStat& b) { return a.presence > b.presence; });
    for (std::size_t r = 0; r < out.size(); ++r) out[r].rank = r + 1;
    return out;
}

inline double median_of(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Error increase of `tree` when each used variable's column is replaced by
/// its training mean, floored at zero. Keys are variable indices.
inline std::map<std::uint32_t, double> ablation_contributions(const Tree& tree, const AlignedDataset& training,
                                                              BatchEvaluator& eval) {
    std::map<std::uint32_t, double> out;
    const double base = model_error(tree, training, eval);
    auto columns = training.columns;
    for (auto v : variables_used(tree)) {
        const double mean = moments(training.columns[v]).mean;
        std::fill(columns[v].begin(), columns[v].end(), mean);
        const auto pred = eval(tree, columns, training.rows());
        out[v] = std::max(0.0, scaled_correlation_error(pred, training.response) - base);
        columns[v] = training.columns[v];
    }
    return out;
}

/// Median mean-ablation contribution per variable over the models that use
/// it, sorted descending; variables no model uses come last with no value.
inline std::vector<VariableStat> variable_contribution(const ModelSet& set, const AlignedDataset& training) {
    if (set.models.empty()) throw InputError("variable_contribution: empty model set");
    if (training.variables != set.schema.variables)
        throw InputError("variable_contribution: training data does not match the model set schema");
    const std::size_t k = set.schema.variables.size();
    std::vector<std::vector<double>> per(k);
    BatchEvaluator eval;
    for (const auto& m : set.models)
        for (const auto& [v, c] : ablation_contributions(m.tree, training, eval)) per[v].push_back(c);
    std::vector<VariableStat> out(k);
    for (std::size_t v = 0; v < k; ++v) {
        out[v] = {v, set.schema.variables[v], static_cast<double>(per[v].size()) / static_cast<double>(set.models.size()),
                  std::nullopt, per[v].size(), 0};
        if (!per[v].empty()) out[v].contribution = median_of(per[v]);
    }
    std::stable_sort(out.begin(), out.end(), [](const VariableStat& a, const VariableStat& b) {
        if (a.contribution.has_value() != b.contribution.has_value()) return a.contribution.has_value();
        return a.contribution.value_or(0.0) > b.contribution.value_or(0.0);
    });
    for (std::size_t r = 0; r < out.size(); ++r) out[r].rank = r + 1;
    return out;
}

struct Niche {
    std::vector<std::uint32_t> variables;  // sorted indices
    std::size_t count = 0;
    double best_error = 1.0;
};

/// Groups models by their exact set of used variables, sorted by best error
/// (ties by variable list).
inline std::vector<Niche> niche_by_variable_combination(const ModelSet& set) {
    if (set.models.empty()) throw InputError("niche_by_variable_combination: empty model set");
    std::map<std::vector<std::uint32_t>, Niche> groups;
    for (const auto& m : set.models) {
        const auto used = variables_used(m.tree);
        std::vector<std::uint32_t> key(used.begin(), used.end());
        auto [it, inserted] = groups.try_emplace(key, Niche{key, 0, m.quality.error});
        ++it->second.count;
        it->second.best_error = std::min(it->second.best_error, m.quality.error);
    }
    std::vector<Niche> out;
    for (auto& [key, n] : groups) out.push_back(std::move(n));
    std::stable_sort(out.begin(), out.end(), [](const Niche& a, const Niche& b) { return a.best_error < b.best_error; });
    return out;
}

/// One row of the complexity/error scatter behind the model-set plots.
struct ScatterPoint {
    std::size_t complexity = 0;
    double error = 1.0;
    bool front = false;     // on the 2-D Pareto front of the source
    bool selected = false;  // member of the model set
    std::string expression;
};

inline std::vector<ScatterPoint> pareto_scatter(const ModelCollection& source, const ModelSet& set) {
    std::unordered_set<std::string> chosen;
    for (const auto& m : set.models) chosen.insert(format(m.tree));
    std::vector<Objectives<2>> obj;
    for (const auto& m : source.models) obj.push_back(objectives2(m));
    std::vector<bool> front(source.models.size(), false);
    const auto layers = nondominated_sort<2>(obj);
    if (!layers.empty())
        for (auto i : layers.front()) front[i] = true;
    std::vector<ScatterPoint> out;
    for (std::size_t i = 0; i < source.models.size(); ++i) {
        const auto& m = source.models[i];
        auto text = format(m.tree, source.schema.variables);
        out.push_back({m.quality.complexity, m.quality.error, front[i], chosen.count(format(m.tree)) > 0, std::move(text)});
    }
    return out;
}

}  // namespace pgp
