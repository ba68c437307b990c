#pragma once

/// @file pareto.hpp
/// @brief Nondominated sorting (minimisation) and layer-wise truncation.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

namespace pgp {

template <std::size_t D>
using Objectives = std::array<double, D>;

/// `a` dominates `b`: no worse in every objective and strictly better in one.
template <std::size_t D>
constexpr bool dominates(const Objectives<D>& a, const Objectives<D>& b) noexcept {
    bool strictly = false;
    for (std::size_t k = 0; k < D; ++k) {
        if (a[k] > b[k]) return false;
        if (a[k] < b[k]) strictly = true;
    }
    return strictly;
}

/// Layer 0 is the nondominated set; layer k is nondominated once layers < k
/// are removed. Indices inside a layer are ascending. NaN objectives must be
/// replaced by the caller.
template <std::size_t D>
std::vector<std::vector<std::size_t>> nondominated_sort(std::span<const Objectives<D>> pts) {
    const std::size_t n = pts.size();
    std::vector<std::vector<std::size_t>> dominated(n);
    std::vector<std::size_t> count(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (dominates(pts[i], pts[j])) {
                dominated[i].push_back(j);
                ++count[j];
            } else if (dominates(pts[j], pts[i])) {
                dominated[j].push_back(i);
                ++count[i];
            }
        }
    }
    std::vector<std::vector<std::size_t>> layers;
    std::vector<std::size_t> current;
    for (std::size_t i = 0; i < n; ++i)
        if (count[i] == 0) current.push_back(i);
    while (!current.empty()) {
        std::vector<std::size_t> next;
        for (auto i : current)
            for (auto j : dominated[i])
                if (--count[j] == 0) next.push_back(j);
        std::sort(next.begin(), next.end());
        layers.push_back(std::move(current));
        current = std::move(next);
    }
    return layers;
}

template <std::size_t D>
std::vector<std::vector<std::size_t>> nondominated_sort(const std::vector<Objectives<D>>& pts) {
    return nondominated_sort<D>(std::span<const Objectives<D>>(pts));
}

/// Picks `count` indices by admitting whole layers in order; the layer that
/// would overflow is ordered by `before` (a strict weak order on indices,
/// ties kept in index order) and truncated. Returned indices follow
/// admission order.
template <std::size_t D>
std::vector<std::size_t> select_by_layers(std::span<const Objectives<D>> pts, std::size_t count,
                                          const std::function<bool(std::size_t, std::size_t)>& before) {
    std::vector<std::size_t> out;
    if (count == 0) return out;
    for (auto& layer : nondominated_sort<D>(pts)) {
        if (out.size() + layer.size() <= count) {
            out.insert(out.end(), layer.begin(), layer.end());
        } else {
            std::stable_sort(layer.begin(), layer.end(), before);
            out.insert(out.end(), layer.begin(), layer.begin() + static_cast<std::ptrdiff_t>(count - out.size()));
        }
        if (out.size() == count) break;
    }
    return out;
}

}  // namespace pgp
