#include <gtest/gtest.h>

#include <chrono>
#include <set>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "paretogp/evolution.hpp"
#include "paretogp/synthetic.hpp"

using namespace pgp;

namespace {

EvolutionConfig small_config(std::size_t generations, std::uint64_t seed = 1) {
    EvolutionConfig c;
    c.population_size = 60;
    c.elite_size = 10;
    c.tournament_size = 8;
    c.max_generations = generations;
    c.time_budget_seconds = 600;
    c.independent_evolutions = 3;
    c.rng_seed = seed;
    return c;
}

GPModel model(const char* text, std::size_t age, double error) {
    GPModel m;
    m.tree = parse(text);
    m.quality = {complexity(m.tree), error, age};
    return m;
}

}  // namespace

TEST(Config, Validation) {
    EvolutionConfig c;
    EXPECT_NO_THROW(c.validate());
    c.elite_size = c.population_size;
    EXPECT_THROW(c.validate(), InputError);
    c = {};
    c.crossover_rate = 0.95;
    EXPECT_THROW(c.validate(), InputError);
    c = {};
    c.tournament_size = 0;
    EXPECT_THROW(c.validate(), InputError);
}

TEST(Evolve, RejectsUnusableData) {
    const auto cfg = small_config(1);
    EXPECT_THROW(evolve(make_dataset({"x"}, {{1}, {2}, {3}}, {5, 5, 5}), cfg), InputError);
    EXPECT_THROW(evolve(make_dataset({"x"}, {{1}}, {1}), cfg), InputError);
    EXPECT_THROW(evolve(make_dataset({"x"}, {{1}, {std::nan("")}}, {1, 2}), cfg), InputError);
}

TEST(Evolve, ArchiveModelsRespectStructuralInvariants) {
    const auto ds = synthetic::linear(200, 0.02, 3);
    auto cfg = small_config(15);
    cfg.max_complexity = 60;
    const auto a = evolve(ds, cfg);
    EXPECT_EQ(a.generations, 15u);
    ASSERT_FALSE(a.models.empty());
    std::set<std::string> texts;
    for (const auto& m : a.models) {
        EXPECT_TRUE(is_valid(m.tree));
        EXPECT_EQ(m.tree.root().op, Op::Plus);
        EXPECT_LE(m.quality.complexity, 60u);
        EXPECT_EQ(m.quality.complexity, complexity(m.tree));
        EXPECT_LE(m.quality.age, a.generations);
        EXPECT_LE(m.provenance.born, a.generations);
        EXPECT_NEAR(m.quality.error, scaled_correlation_error(
                                         [&] {
                                             std::vector<double> p;
                                             for (std::size_t r = 0; r < ds.rows(); ++r)
                                                 p.push_back(evaluate(m.tree, ds.row(r)));
                                             return p;
                                         }(),
                                         ds.response),
                    1e-12);
        EXPECT_TRUE(texts.insert(format(m.tree)).second) << "duplicate " << format(m.tree);
    }
    for (std::size_t i = 1; i < a.models.size(); ++i)
        EXPECT_LE(a.models[i - 1].quality.complexity, a.models[i].quality.complexity);
}

TEST(Evolve, ArchiveHoldsTheTwoObjectiveFront) {
    const auto ds = synthetic::linear(150, 0.05, 4);
    const auto a = evolve(ds, small_config(10));
    std::vector<std::array<double, 2>> pts;
    for (const auto& m : a.models) pts.push_back({static_cast<double>(m.quality.complexity), m.quality.error});
    const auto front = oracle::brute_layers<2>(pts).front();
    // The best-error model is on the front and the front is nonempty.
    double best = 1.0;
    for (const auto& m : a.models) best = std::min(best, m.quality.error);
    bool best_on_front = false;
    for (auto i : front) best_on_front = best_on_front || a.models[i].quality.error == best;
    EXPECT_TRUE(best_on_front);
}

TEST(Evolve, BestErrorNeverRegresses) {
    const auto ds = synthetic::correlated_drivers(200, 5);
    std::vector<double> best;
    evolve(ds, small_config(25), [&](const GenerationStats& s) { best.push_back(s.best_error); });
    ASSERT_EQ(best.size(), 25u);
    for (std::size_t i = 1; i < best.size(); ++i) EXPECT_LE(best[i], best[i - 1]);
}

TEST(Evolve, SameSeedSameArchive) {
    const auto ds = synthetic::correlated_drivers(150, 6);
    const auto a = evolve(ds, small_config(8, 42));
    const auto b = evolve(ds, small_config(8, 42));
    const auto c = evolve(ds, small_config(8, 43));
    EXPECT_EQ(a.models, b.models);
    EXPECT_NE(a.models, c.models);
}

TEST(Evolve, ZeroGenerationsReturnsTheInitialPopulation) {
    const auto ds = synthetic::linear(50, 0.02, 7);
    const auto a = evolve(ds, small_config(0));
    EXPECT_EQ(a.generations, 0u);
    for (const auto& m : a.models) {
        EXPECT_EQ(m.quality.age, 0u);
        EXPECT_EQ(m.provenance.born, 0u);
    }
}

TEST(Evolve, TimeBudgetOvershootsByAtMostOneGeneration) {
    const auto ds = synthetic::correlated_drivers(300, 8);
    auto cfg = small_config(0);
    cfg.max_generations.reset();
    cfg.time_budget_seconds = 0.3;
    std::vector<double> stamps;
    const auto start = std::chrono::steady_clock::now();
    auto a = evolve(ds, cfg, [&](const GenerationStats&) {
        stamps.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    });
    const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    ASSERT_GE(stamps.size(), 2u);
    double longest = stamps.front();
    for (std::size_t i = 1; i < stamps.size(); ++i) longest = std::max(longest, stamps[i] - stamps[i - 1]);
    // Slack covers the final archive assembly.
    EXPECT_LE(total, cfg.time_budget_seconds + 2 * longest + 0.1);
    EXPECT_EQ(a.generations, stamps.size());
}

TEST(Evolve, RecoversAnAffineRelationship) {
    const auto ds = synthetic::linear(300, 0.02, 9);
    const auto a = evolve(ds, small_config(20));
    double best = 1.0;
    for (const auto& m : a.models) best = std::min(best, m.quality.error);
    EXPECT_LE(best, 0.02);
}

TEST(Tournament, FullSampleWinnersAreTheFirstLayer) {
    std::vector<GPModel> pop;
    Rng gen(3);
    std::uniform_int_distribution<int> age(0, 4), err(0, 9);
    const char* shapes[] = {"+(x0)", "x0 + 1", "x0*x0 + x0", "sqrt(x0) + x0*x0 + 3"};
    for (int i = 0; i < 40; ++i) pop.push_back(model(shapes[i % 4], static_cast<std::size_t>(age(gen)), err(gen) / 10.0));
    std::vector<std::array<double, 3>> pts;
    for (const auto& m : pop) pts.push_back(objectives3(m));
    const auto want = oracle::brute_layers<3>(pts).front();
    EvolutionConfig cfg;
    cfg.tournament_size = pop.size();
    Rng rng(1);
    auto got = pareto_tournament(pop, rng, cfg);
    std::sort(got.begin(), got.end());
    EXPECT_EQ(got, want);
}

TEST(Tournament, WinnersAreMutuallyNondominated) {
    std::vector<GPModel> pop;
    for (int i = 0; i < 50; ++i) pop.push_back(model(i % 2 ? "x0 + 1" : "x0*x0 + x0", static_cast<std::size_t>(i % 5), (i % 7) / 7.0));
    EvolutionConfig cfg;
    cfg.tournament_size = 10;
    Rng rng(2);
    for (int t = 0; t < 100; ++t) {
        const auto w = pareto_tournament(pop, rng, cfg);
        ASSERT_FALSE(w.empty());
        EXPECT_EQ(std::set<std::size_t>(w.begin(), w.end()).size(), w.size());
        for (auto a : w)
            for (auto b : w) EXPECT_FALSE(dominates(objectives3(pop[a]), objectives3(pop[b])));
    }
}

TEST(ReduceByLayers, TruncatesByErrorThenComplexityThenAge) {
    // All four are mutually nondominated in 3-D.
    std::vector<GPModel> pool{model("+(x0)", 3, 0.5), model("x0 + 1", 2, 0.4), model("x0*x0 + x0", 1, 0.4),
                              model("x0*x0*x0 + x0 + 1", 0, 0.1)};
    const auto kept = reduce_by_layers(pool, 2);
    ASSERT_EQ(kept.size(), 2u);
    EXPECT_EQ(kept[0].quality.error, 0.1);
    EXPECT_EQ(format(kept[1].tree), "x0 + 1");
}

TEST(ReduceByLayers, NonFiniteErrorsRankAsWorst) {
    std::vector<GPModel> pool{model("x0 + 1", 0, std::nan("")), model("x0 + 1 + 2", 0, 0.9)};
    EXPECT_EQ(reduce_by_layers(pool, 1)[0].quality.error, 0.9);
}

TEST(Seeds, DerivedSeedsDiffer) {
    std::set<std::uint64_t> seeds;
    for (std::uint64_t r = 0; r < 100; ++r) seeds.insert(derive_seed(7, r));
    EXPECT_EQ(seeds.size(), 100u);
    EXPECT_EQ(derive_seed(7, 3), derive_seed(7, 3));
}

TEST(MergeRuns, DeduplicatesByText) {
    const auto ds = synthetic::linear(80, 0.05, 10);
    auto cfg = small_config(5);
    const auto runs = evolve_independent(ds, cfg);
    ASSERT_EQ(runs.size(), 3u);
    EXPECT_NE(runs[0].seed, runs[1].seed);
    const auto one = merge_runs({runs[0]});
    EXPECT_EQ(one.models, runs[0].models);

    std::set<std::string> all;
    for (const auto& r : runs)
        for (const auto& m : r.models) all.insert(format(m.tree));
    const auto merged = merge_runs(runs);
    EXPECT_EQ(merged.models.size(), all.size());

    auto twice = merge_runs({runs[0], runs[0]});
    EXPECT_EQ(twice.models.size(), runs[0].models.size());

    auto other = runs[1];
    other.schema.variables = {"something_else"};
    EXPECT_THROW(merge_runs({runs[0], other}), InputError);
    EXPECT_THROW(merge_runs({}), InputError);
}
