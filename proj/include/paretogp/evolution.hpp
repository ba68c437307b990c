#pragma once

/// @file evolution.hpp
/// @brief Pareto genetic programming over (complexity, error, age).
///
/// One generation:
///   1. elite = first nondominated layers of the population, up to elite_size
///   2. offspring = population_size children of Pareto-tournament winners
///   3. population = (elite + offspring) reduced by nondominated layers
/// Survivors age by one per generation; a child's age is its root parent's
/// age plus one. A 2-D (complexity, error) archive collects the best
/// trade-offs seen; at the end it is merged with the final population.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

#include "dataset.hpp"
#include "expression.hpp"
#include "fitness.hpp"
#include "pareto.hpp"
#include "text.hpp"
#include "variation.hpp"

namespace pgp {

struct Provenance {
    std::uint64_t run = 0;
    std::size_t born = 0;  // generation of creation

    friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct GPModel {
    Tree tree;
    QualityVector quality;
    Provenance provenance;

    friend bool operator==(const GPModel&, const GPModel&) = default;
};

/// A schema plus the models defined over it.
struct ModelCollection {
    Schema schema;
    std::vector<GPModel> models;
};

struct EvolutionConfig {
    std::size_t population_size = 300;
    std::size_t elite_size = 50;
    std::size_t tournament_size = 30;
    double crossover_rate = 0.9;
    double subtree_mutation_rate = 0.05;
    double depth_preserving_mutation_rate = 0.05;
    std::size_t max_complexity = 1000;
    double time_budget_seconds = 2000.0;
    std::optional<std::size_t> max_generations;
    std::size_t independent_evolutions = 10;
    std::uint64_t rng_seed = 0;
    TreeGenConfig generation;  // num_variables / max_complexity filled in per run

    void validate() const {
        if (population_size == 0) throw InputError("population_size must be positive");
        if (elite_size == 0 || elite_size >= population_size)
            throw InputError("elite_size must be positive and smaller than population_size");
        if (tournament_size == 0) throw InputError("tournament_size must be positive");
        const double rates = crossover_rate + subtree_mutation_rate + depth_preserving_mutation_rate;
        if (crossover_rate < 0 || subtree_mutation_rate < 0 || depth_preserving_mutation_rate < 0 || rates > 1.0 + 1e-12)
            throw InputError("variation rates must be non-negative and sum to at most 1");
        if (max_complexity < 3) throw InputError("max_complexity must be at least 3");
        if (time_budget_seconds < 0) throw InputError("time_budget_seconds must be non-negative");
        if (independent_evolutions == 0) throw InputError("independent_evolutions must be positive");
    }
};

struct RunArchive {
    Schema schema;
    EvolutionConfig config;
    std::uint64_t run_id = 0;
    std::uint64_t seed = 0;
    std::size_t generations = 0;
    std::vector<GPModel> models;
};

struct GenerationStats {
    std::uint64_t run = 0;
    std::size_t generation = 0;
    std::size_t population = 0;
    double best_error = 1.0;
    std::size_t front_size = 0;
};

using ProgressFn = std::function<void(const GenerationStats&)>;

struct TreeHash {
    std::size_t operator()(const Tree& t) const noexcept {
        std::uint64_t h = 1469598103934665603ull;
        auto mix = [&h](std::uint64_t v) {
            h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        };
        for (const auto& n : t.nodes()) {
            mix(static_cast<std::uint64_t>(n.op) | (static_cast<std::uint64_t>(n.arity) << 8) |
                (static_cast<std::uint64_t>(n.var) << 16));
            std::uint64_t bits;
            std::memcpy(&bits, &n.value, sizeof bits);
            mix(bits);
        }
        return static_cast<std::size_t>(h);
    }
};

inline Objectives<3> objectives3(const GPModel& m) {
    const double e = std::isfinite(m.quality.error) ? m.quality.error : 1.0;
    return {static_cast<double>(m.quality.complexity), e, static_cast<double>(m.quality.age)};
}
inline Objectives<2> objectives2(const GPModel& m) {
    const double e = std::isfinite(m.quality.error) ? m.quality.error : 1.0;
    return {static_cast<double>(m.quality.complexity), e};
}

/// Truncation order inside a partially admitted layer.
inline bool error_first(const GPModel& a, const GPModel& b) {
    const auto oa = objectives3(a), ob = objectives3(b);
    if (oa[1] != ob[1]) return oa[1] < ob[1];
    if (oa[0] != ob[0]) return oa[0] < ob[0];
    return oa[2] < ob[2];
}

/// `count` models chosen by successive 3-D Pareto layers.
inline std::vector<GPModel> reduce_by_layers(const std::vector<GPModel>& pool, std::size_t count) {
    std::vector<Objectives<3>> obj;
    obj.reserve(pool.size());
    for (const auto& m : pool) obj.push_back(objectives3(m));
    const auto idx = select_by_layers<3>(obj, count, [&](std::size_t a, std::size_t b) { return error_first(pool[a], pool[b]); });
    std::vector<GPModel> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(pool[i]);
    return out;
}

/// Samples `tournament_size` distinct members and returns the indices of the
/// sample's 3-D nondominated members, in sampling order.
inline std::vector<std::size_t> pareto_tournament(const std::vector<GPModel>& population, Rng& rng,
                                                  const EvolutionConfig& config) {
    const std::size_t n = population.size();
    const std::size_t k = std::min(config.tournament_size, n);
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + detail::uniform_index(rng, n - i);
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    std::vector<std::size_t> winners;
    for (auto i : idx) {
        const auto oi = objectives3(population[i]);
        const bool beaten = std::any_of(idx.begin(), idx.end(), [&](std::size_t j) {
            return j != i && dominates(objectives3(population[j]), oi);
        });
        if (!beaten) winners.push_back(i);
    }
    return winners;
}

/// Training error (1 - R^2) of `tree` on `data`.
inline double model_error(const Tree& tree, const AlignedDataset& data, BatchEvaluator& eval) {
    const auto pred = eval(tree, data.columns, data.rows());
    return scaled_correlation_error(pred, data.response);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t run) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(run), static_cast<std::uint32_t>(run >> 32)};
    std::uint32_t out[2];
    seq.generate(out, out + 2);
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

inline void check_training_data(const AlignedDataset& data) {
    data.check();
    if (data.rows() < 2) throw InputError("evolve: dataset needs at least 2 rows");
    if (data.num_variables() == 0) throw InputError("evolve: dataset needs at least 1 input column");
    if (!all_finite(data.response)) throw InputError("evolve: response contains non-finite values");
    if (moments(data.response).stddev <= 0.0) throw InputError("evolve: response has zero variance");
    for (const auto& c : data.columns)
        if (!all_finite(c)) throw InputError("evolve: inputs contain non-finite values");
}

namespace detail {

class Engine {
public:
    Engine(const AlignedDataset& data, const EvolutionConfig& config, std::uint64_t run, std::uint64_t seed)
        : data_(data), cfg_(config), gen_cfg_(config.generation), run_(run), rng_(seed) {
        gen_cfg_.num_variables = data.num_variables();
        gen_cfg_.max_complexity = config.max_complexity;
    }

    RunArchive run(const ProgressFn& progress) {
        const auto start = std::chrono::steady_clock::now();
        auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };

        population_.reserve(cfg_.population_size);
        const std::size_t span = gen_cfg_.max_init_depth - gen_cfg_.min_init_depth + 1;
        for (std::size_t i = 0; i < cfg_.population_size; ++i)
            population_.push_back(fresh(gen_cfg_.min_init_depth + i % span, 0));
        update_archive();

        std::size_t generation = 0;
        while (elapsed() < cfg_.time_budget_seconds &&
               (!cfg_.max_generations || generation < *cfg_.max_generations)) {
            ++generation;
            step(generation);
            update_archive();
            if (progress) progress(stats(generation));
        }

        RunArchive out;
        out.schema = data_.schema();
        out.config = cfg_;
        out.run_id = run_;
        out.seed = cfg_.rng_seed;
        out.generations = generation;
        std::unordered_set<Tree, TreeHash> seen;
        for (const auto* group : {&population_, &archive_})
            for (const auto& m : *group)
                if (seen.insert(m.tree).second) out.models.push_back(m);
        std::vector<std::string> text(out.models.size());
        for (std::size_t i = 0; i < out.models.size(); ++i) text[i] = format(out.models[i].tree);
        std::vector<std::size_t> order(out.models.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const auto& qa = out.models[a].quality;
            const auto& qb = out.models[b].quality;
            if (qa.complexity != qb.complexity) return qa.complexity < qb.complexity;
            if (qa.error != qb.error) return qa.error < qb.error;
            return text[a] < text[b];
        });
        std::vector<GPModel> sorted;
        sorted.reserve(order.size());
        for (auto i : order) sorted.push_back(std::move(out.models[i]));
        out.models = std::move(sorted);
        return out;
    }

private:
    GPModel evaluated(Tree t, std::size_t age, std::size_t born) {
        GPModel m;
        m.quality.complexity = complexity(t);
        m.quality.error = model_error(t, data_, eval_);
        m.quality.age = age;
        m.provenance = {run_, born};
        m.tree = std::move(t);
        return m;
    }

    GPModel fresh(std::size_t depth, std::size_t born) {
        return evaluated(random_individual(gen_cfg_, rng_, depth), 0, born);
    }

    GPModel vary(const GPModel& parent, std::size_t generation) {
        const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
        Tree child;
        if (u < cfg_.crossover_rate) {
            const auto mates = pareto_tournament(population_, rng_, cfg_);
            const auto& mate = population_[mates[uniform_index(rng_, mates.size())]];
            child = crossover(parent.tree, mate.tree, rng_, gen_cfg_);
        } else if (u < cfg_.crossover_rate + cfg_.subtree_mutation_rate) {
            child = subtree_mutation(parent.tree, rng_, gen_cfg_);
        } else if (u < cfg_.crossover_rate + cfg_.subtree_mutation_rate + cfg_.depth_preserving_mutation_rate) {
            child = depth_preserving_mutation(parent.tree, rng_, gen_cfg_);
        } else {
            child = parent.tree;
        }
        return evaluated(std::move(child), parent.quality.age + 1, generation);
    }

    void step(std::size_t generation) {
        auto elite = reduce_by_layers(population_, cfg_.elite_size);
        std::vector<GPModel> offspring;
        offspring.reserve(cfg_.population_size);
        while (offspring.size() < cfg_.population_size) {
            for (auto w : pareto_tournament(population_, rng_, cfg_)) {
                if (offspring.size() == cfg_.population_size) break;
                offspring.push_back(vary(population_[w], generation));
            }
        }
        std::vector<GPModel> merged;
        merged.reserve(elite.size() + offspring.size());
        std::unordered_set<Tree, TreeHash> seen;
        for (auto& m : elite) {
            ++m.quality.age;
            if (seen.insert(m.tree).second) merged.push_back(std::move(m));
        }
        for (auto& m : offspring)
            if (seen.insert(m.tree).second) merged.push_back(std::move(m));
        const std::size_t span = gen_cfg_.max_init_depth - gen_cfg_.min_init_depth + 1;
        while (merged.size() < cfg_.population_size) {
            auto m = fresh(gen_cfg_.min_init_depth + uniform_index(rng_, span), generation);
            if (seen.insert(m.tree).second) merged.push_back(std::move(m));
        }
        population_ = reduce_by_layers(merged, cfg_.population_size);
    }

    void update_archive() {
        std::vector<GPModel> pool;
        pool.reserve(archive_.size() + population_.size());
        std::unordered_set<Tree, TreeHash> seen;
        for (const auto* group : {&archive_, &population_})
            for (const auto& m : *group)
                if (seen.insert(m.tree).second) pool.push_back(m);
        std::vector<Objectives<2>> obj;
        obj.reserve(pool.size());
        for (const auto& m : pool) obj.push_back(objectives2(m));
        const auto layers = nondominated_sort<2>(obj);
        std::vector<GPModel> front;
        if (!layers.empty())
            for (auto i : layers.front()) front.push_back(pool[i]);
        archive_ = std::move(front);
    }

    GenerationStats stats(std::size_t generation) const {
        GenerationStats s;
        s.run = run_;
        s.generation = generation;
        s.population = population_.size();
        for (const auto& m : population_) s.best_error = std::min(s.best_error, objectives2(m)[1]);
        std::vector<Objectives<2>> obj;
        for (const auto& m : population_) obj.push_back(objectives2(m));
        const auto layers = nondominated_sort<2>(obj);
        s.front_size = layers.empty() ? 0 : layers.front().size();
        return s;
    }

    const AlignedDataset& data_;
    EvolutionConfig cfg_;
    TreeGenConfig gen_cfg_;
    std::uint64_t run_;
    Rng rng_;
    BatchEvaluator eval_;
    std::vector<GPModel> population_;
    std::vector<GPModel> archive_;
};

}  // namespace detail

/// One independent evolution seeded with config.rng_seed. Stops at the time
/// budget or at max_generations, whichever comes first; the budget is
/// checked between generations.
inline RunArchive evolve(const AlignedDataset& data, const EvolutionConfig& config, const ProgressFn& progress = {},
                         std::uint64_t run_id = 0) {
    config.validate();
    check_training_data(data);
    return detail::Engine(data, config, run_id, config.rng_seed).run(progress);
}

/// config.independent_evolutions runs with seeds derived from config.rng_seed.
inline std::vector<RunArchive> evolve_independent(const AlignedDataset& data, const EvolutionConfig& config,
                                                  const ProgressFn& progress = {}) {
    config.validate();
    std::vector<RunArchive> out;
    for (std::size_t r = 0; r < config.independent_evolutions; ++r) {
        EvolutionConfig c = config;
        c.rng_seed = derive_seed(config.rng_seed, r);
        out.push_back(evolve(data, c, progress, r));
    }
    return out;
}

/// Union of run archives, deduplicated by expression text (first occurrence kept).
inline ModelCollection merge_runs(const std::vector<RunArchive>& archives) {
    if (archives.empty()) throw InputError("merge_runs: no archives");
    ModelCollection out;
    out.schema = archives.front().schema;
    std::unordered_set<std::string> seen;
    for (const auto& a : archives) {
        if (a.schema.variables != out.schema.variables) throw InputError("merge_runs: archives use different variable schemas");
        for (const auto& m : a.models)
            if (seen.insert(format(m.tree)).second) out.models.push_back(m);
    }
    return out;
}

}  // namespace pgp
