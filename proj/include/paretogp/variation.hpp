#pragma once

/// @file variation.hpp
/// @brief Random tree generation and the three variation operators
/// (subtree crossover, subtree mutation, depth-preserving subtree mutation).
///
/// Every evolved tree has a Plus node at the root. Variation never selects
/// the root as the replacement point, so the template survives. Operators
/// that would exceed the complexity cap retry a bounded number of times and
/// then fall back to a copy of the (first) parent.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "expression.hpp"

namespace pgp {

using Rng = std::mt19937_64;

struct TreeGenConfig {
    std::size_t num_variables = 1;
    std::size_t max_complexity = 1000;
    double variable_probability = 2.0 / 3.0;  // leaf is a variable rather than a constant
    double grow_leaf_probability = 0.3;       // early termination in grow mode
    double constant_range = 10.0;             // constants drawn from [-range, range]
    std::size_t max_root_arity = 3;
    std::size_t min_init_depth = 2;
    std::size_t max_init_depth = 6;
    std::size_t mutation_max_depth = 4;
    std::size_t variation_retries = 8;
};

namespace detail {

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

inline bool coin(Rng& rng, double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p; }

inline double random_constant(const TreeGenConfig& cfg, Rng& rng) {
    const auto r = static_cast<long long>(cfg.constant_range);
    if (coin(rng, 0.5)) return static_cast<double>(std::uniform_int_distribution<long long>(-r, r)(rng));
    const double v = std::uniform_real_distribution<double>(-cfg.constant_range, cfg.constant_range)(rng);
    return std::round(v * 1e4) / 1e4;
}

inline Tree random_leaf(const TreeGenConfig& cfg, Rng& rng) {
    if (cfg.num_variables > 0 && coin(rng, cfg.variable_probability))
        return Tree::variable(static_cast<std::uint32_t>(uniform_index(rng, cfg.num_variables)));
    return Tree::constant(random_constant(cfg, rng));
}

inline std::size_t random_arity(Op op, Rng& rng) {
    if (is_unary(op)) return 1;
    if (is_binary(op)) return 2;
    // Variadic: binary half of the time, otherwise 3..5.
    return coin(rng, 0.5) ? 2 : 3 + uniform_index(rng, kMaxVariadicArity - 2);
}

enum class Mode { Grow, Full, Exact };

// Exact: at least one leaf sits at depth `d` and none deeper.
inline Tree build(const TreeGenConfig& cfg, Rng& rng, std::size_t d, Mode mode) {
    if (d <= 1) return random_leaf(cfg, rng);
    if (mode == Mode::Grow && coin(rng, cfg.grow_leaf_probability)) return random_leaf(cfg, rng);
    const Op op = kPrimitives[uniform_index(rng, kPrimitives.size())];
    const std::size_t k = random_arity(op, rng);
    const std::size_t deep = mode == Mode::Exact ? uniform_index(rng, k) : k;
    std::vector<Tree> children;
    children.reserve(k);
    for (std::size_t c = 0; c < k; ++c) {
        Mode m = mode;
        if (mode == Mode::Exact) m = (c == deep) ? Mode::Exact : Mode::Grow;
        children.push_back(build(cfg, rng, d - 1, m));
    }
    return Tree::make(op, std::move(children));
}

// Non-root node index, biased 90/10 toward internal nodes when any exist.
inline std::size_t pick_point(const Tree& t, Rng& rng) {
    std::vector<std::size_t> internal, leaves;
    for (std::size_t i = 1; i < t.size(); ++i) (t[i].arity > 0 ? internal : leaves).push_back(i);
    if (!internal.empty() && (leaves.empty() || coin(rng, 0.9))) return internal[uniform_index(rng, internal.size())];
    return leaves[uniform_index(rng, leaves.size())];
}

}  // namespace detail

/// Ramped half-and-half style generator: grow or full (50/50) down to
/// `depth_limit`. A depth limit of 1 yields a single leaf. Trees over the
/// complexity cap are regenerated with a smaller depth.
inline Tree random_tree(const TreeGenConfig& cfg, Rng& rng, std::size_t depth_limit) {
    if (depth_limit < 1) throw std::invalid_argument("random_tree: depth_limit must be >= 1");
    std::size_t d = depth_limit;
    for (;;) {
        for (std::size_t attempt = 0; attempt < cfg.variation_retries; ++attempt) {
            const auto mode = detail::coin(rng, 0.5) ? detail::Mode::Grow : detail::Mode::Full;
            Tree t = detail::build(cfg, rng, d, mode);
            if (complexity(t) <= cfg.max_complexity) return t;
        }
        if (d == 1) return detail::random_leaf(cfg, rng);
        --d;
    }
}

/// Random tree whose depth is exactly `d`, used by depth-preserving mutation.
inline Tree random_tree_exact_depth(const TreeGenConfig& cfg, Rng& rng, std::size_t d) {
    return detail::build(cfg, rng, d, detail::Mode::Exact);
}

/// A fresh individual: Plus template root over 1..max_root_arity random subtrees.
inline Tree random_individual(const TreeGenConfig& cfg, Rng& rng, std::size_t depth_limit) {
    const std::size_t depth = std::max<std::size_t>(depth_limit, 2);
    for (;;) {
        const std::size_t k = 1 + detail::uniform_index(rng, std::min(cfg.max_root_arity, kMaxVariadicArity));
        std::vector<Tree> kids;
        for (std::size_t c = 0; c < k; ++c) kids.push_back(random_tree(cfg, rng, depth - 1));
        Tree t = Tree::make(Op::Plus, std::move(kids));
        if (complexity(t) <= cfg.max_complexity) return t;
    }
}

/// Subtree crossover: a non-root node of a copy of `a` is replaced by a random
/// non-root subtree of `b`.
inline Tree crossover(const Tree& a, const Tree& b, Rng& rng, const TreeGenConfig& cfg) {
    if (a.size() < 2 || b.size() < 2) return a;
    for (std::size_t attempt = 0; attempt < cfg.variation_retries; ++attempt) {
        const std::size_t at = detail::pick_point(a, rng);
        const std::size_t from = detail::pick_point(b, rng);
        Tree child = a.replace_subtree(at, b.subtree(from));
        if (complexity(child) <= cfg.max_complexity) return child;
    }
    return a;
}

/// Replaces a random non-root subtree with a fresh random subtree.
inline Tree subtree_mutation(const Tree& t, Rng& rng, const TreeGenConfig& cfg) {
    if (t.size() < 2) return t;
    for (std::size_t attempt = 0; attempt < cfg.variation_retries; ++attempt) {
        const std::size_t at = detail::pick_point(t, rng);
        const std::size_t d = 1 + detail::uniform_index(rng, cfg.mutation_max_depth);
        Tree child = t.replace_subtree(at, random_tree(cfg, rng, d));
        if (complexity(child) <= cfg.max_complexity) return child;
    }
    return t;
}

/// Replaces a random non-root subtree with a fresh subtree of the same depth.
inline Tree depth_preserving_mutation(const Tree& t, Rng& rng, const TreeGenConfig& cfg) {
    if (t.size() < 2) return t;
    for (std::size_t attempt = 0; attempt < cfg.variation_retries; ++attempt) {
        const std::size_t at = detail::pick_point(t, rng);
        Tree child = t.replace_subtree(at, random_tree_exact_depth(cfg, rng, depth(t, at)));
        if (complexity(child) <= cfg.max_complexity) return child;
    }
    return t;
}

}  // namespace pgp
