#pragma once

/// @file dataset.hpp
/// @brief Column-major input matrix plus response, the unit every modelling
/// stage consumes.

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "expression.hpp"
#include "interval.hpp"

namespace pgp {

/// Variable names and the modelling ranges models are screened against.
struct Schema {
    std::vector<std::string> variables;
    std::vector<Interval> ranges;

    friend bool operator==(const Schema&, const Schema&) = default;
};

struct AlignedDataset {
    std::vector<std::string> variables;
    std::string response_name = "response";
    std::vector<std::vector<double>> columns;  // columns[v][row]
    std::vector<double> response;
    std::vector<std::int64_t> timestamps;      // UTC seconds; empty when untimed
    std::vector<Interval> ranges;              // per variable

    [[nodiscard]] std::size_t rows() const noexcept { return response.size(); }
    [[nodiscard]] std::size_t num_variables() const noexcept { return variables.size(); }

    [[nodiscard]] std::vector<double> row(std::size_t r) const {
        std::vector<double> out(columns.size());
        for (std::size_t v = 0; v < columns.size(); ++v) out[v] = columns[v][r];
        return out;
    }

    [[nodiscard]] Schema schema() const { return {variables, ranges}; }

    /// Tight [min, max] per column.
    void compute_ranges() {
        ranges.assign(columns.size(), Interval{});
        for (std::size_t v = 0; v < columns.size(); ++v) {
            if (columns[v].empty()) continue;
            const auto [lo, hi] = std::minmax_element(columns[v].begin(), columns[v].end());
            ranges[v] = Interval{*lo, *hi, false};
        }
    }

    [[nodiscard]] std::size_t index_of(const std::string& name) const {
        auto it = std::find(variables.begin(), variables.end(), name);
        if (it == variables.end()) throw InputError("dataset has no variable '" + name + "'");
        return static_cast<std::size_t>(it - variables.begin());
    }

    /// Shape consistency; throws InputError describing the first problem.
    void check() const {
        if (columns.size() != variables.size()) throw InputError("dataset: column/name count mismatch");
        for (const auto& c : columns)
            if (c.size() != response.size()) throw InputError("dataset: ragged columns");
        if (!timestamps.empty() && timestamps.size() != response.size())
            throw InputError("dataset: timestamp count mismatch");
        if (!ranges.empty() && ranges.size() != variables.size())
            throw InputError("dataset: range count mismatch");
    }
};

/// Builds a dataset from row-major inputs; ranges are computed from the data.
inline AlignedDataset make_dataset(std::vector<std::string> names, const std::vector<std::vector<double>>& rows,
                                   std::vector<double> response) {
    AlignedDataset ds;
    ds.variables = std::move(names);
    ds.columns.assign(ds.variables.size(), std::vector<double>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != ds.variables.size()) throw InputError("make_dataset: row width mismatch");
        for (std::size_t v = 0; v < rows[r].size(); ++v) ds.columns[v][r] = rows[r][v];
    }
    ds.response = std::move(response);
    ds.check();
    ds.compute_ranges();
    return ds;
}

/// Keeps only the named variables, in the given order. Ranges carry over.
inline AlignedDataset select_variables(const AlignedDataset& ds, const std::vector<std::string>& keep) {
    AlignedDataset out;
    out.response_name = ds.response_name;
    out.response = ds.response;
    out.timestamps = ds.timestamps;
    for (const auto& name : keep) {
        const auto v = ds.index_of(name);
        out.variables.push_back(name);
        out.columns.push_back(ds.columns[v]);
        if (!ds.ranges.empty()) out.ranges.push_back(ds.ranges[v]);
    }
    return out;
}

/// Subset of rows, ranges recomputed from the subset.
inline AlignedDataset take_rows(const AlignedDataset& ds, const std::vector<std::size_t>& rows) {
    AlignedDataset out;
    out.variables = ds.variables;
    out.response_name = ds.response_name;
    out.columns.assign(ds.columns.size(), {});
    for (std::size_t v = 0; v < ds.columns.size(); ++v) {
        out.columns[v].reserve(rows.size());
        for (auto r : rows) out.columns[v].push_back(ds.columns[v][r]);
    }
    for (auto r : rows) {
        out.response.push_back(ds.response[r]);
        if (!ds.timestamps.empty()) out.timestamps.push_back(ds.timestamps[r]);
    }
    out.compute_ranges();
    return out;
}

}  // namespace pgp
