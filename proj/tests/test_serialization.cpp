#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "paretogp/serialization.hpp"
#include "paretogp/synthetic.hpp"

using namespace pgp;

namespace {

RunArchive small_run() {
    const auto ds = synthetic::correlated_drivers(120, 4);
    EvolutionConfig cfg;
    cfg.population_size = 40;
    cfg.elite_size = 8;
    cfg.tournament_size = 6;
    cfg.max_generations = 6;
    cfg.rng_seed = 77;
    return evolve(ds, cfg, {}, 3);
}

std::filesystem::path temp_file(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "paretogp_serialization_test";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST(Serialization, RunArchiveRoundTrip) {
    const auto a = small_run();
    const auto path = temp_file("run.json");
    write_json(path, to_json(a));
    const auto b = run_archive_from_json(read_json(path));
    EXPECT_EQ(b.run_id, 3u);
    EXPECT_EQ(b.seed, a.seed);
    EXPECT_EQ(b.generations, a.generations);
    EXPECT_EQ(b.schema, a.schema);
    EXPECT_EQ(b.models, a.models);
    EXPECT_EQ(b.config.max_generations, a.config.max_generations);
    EXPECT_EQ(b.config.rng_seed, 77u);
    EXPECT_EQ(to_json(b).dump(), to_json(a).dump());
}

TEST(Serialization, ModelCollectionAndSetRoundTrip) {
    const auto c = merge_runs({small_run()});
    const auto c2 = model_collection_from_json(json::parse(to_json(c).dump()));
    EXPECT_EQ(c2.schema, c.schema);
    EXPECT_EQ(c2.models, c.models);

    const auto s = select_model_set(c, {0.9, 200, 0.5});
    const auto s2 = model_set_from_json(json::parse(to_json(s).dump()));
    EXPECT_EQ(s2.spec, s.spec);
    EXPECT_EQ(s2.models, s.models);
    EXPECT_EQ(s2.source_size, s.source_size);
    EXPECT_EQ(s2.after_thresholds, s.after_thresholds);
}

TEST(Serialization, EnsembleRoundTripPredictsIdentically) {
    const auto ds = synthetic::correlated_drivers(120, 4);
    auto set = select_model_set(merge_runs({small_run()}), {1.0, 1000, 1.0});
    const auto e = create_ensemble(set, ds, 4, 1000);
    const auto e2 = ensemble_from_json(json::parse(to_json(e).dump()));
    ASSERT_EQ(e2.members.size(), e.members.size());
    for (std::size_t k = 0; k < e.members.size(); ++k) {
        EXPECT_EQ(e2.members[k].model, e.members[k].model);
        EXPECT_EQ(e2.members[k].scaling, e.members[k].scaling);
    }
    const auto p = ensemble_predict(e, ds), p2 = ensemble_predict(e2, ds);
    for (std::size_t r = 0; r < ds.rows(); ++r) {
        EXPECT_EQ(p[r].point, p2[r].point);
        EXPECT_EQ(p[r].spread, p2[r].spread);
    }
}

TEST(Serialization, ConfigReadsOverDefaults) {
    const auto c = evolution_config_from_json(json{{"population_size", 120}, {"max_generations", 12}});
    EXPECT_EQ(c.population_size, 120u);
    EXPECT_EQ(c.max_generations, 12u);
    EXPECT_EQ(c.elite_size, EvolutionConfig{}.elite_size);
    EXPECT_FALSE(evolution_config_from_json(json{{"max_generations", nullptr}}).max_generations);
    const auto back = evolution_config_from_json(to_json(c));
    EXPECT_EQ(to_json(back), to_json(c));
}

TEST(Serialization, CorruptDocumentsAreInputErrors) {
    const Schema s{{"a", "b"}, {{0, 1}, {0, 1}}};
    EXPECT_THROW(model_from_json(json{{"expression", "a + b"}, {"complexity", 99}, {"error", 0.1}}, s), InputError);
    EXPECT_THROW(model_from_json(json{{"expression", "a + zz"}, {"complexity", 3}, {"error", 0.1}}, s), InputError);
    EXPECT_THROW(schema_from_json(json{{"variables", {"a", "b"}}, {"ranges", {{0, 1}}}}), InputError);

    const auto path = temp_file("broken.json");
    std::ofstream(path) << "{ not json";
    EXPECT_THROW(read_json(path), InputError);
    EXPECT_THROW(read_json(temp_file("does_not_exist.json")), InputError);
}
