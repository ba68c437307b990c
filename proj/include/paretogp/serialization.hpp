#pragma once

/// @file serialization.hpp
/// @brief JSON documents for run archives, model collections, model sets and
/// ensembles. Trees are stored as infix text over the schema's variable names.

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "analysis.hpp"
#include "ensemble.hpp"
#include "evolution.hpp"

namespace pgp {

using json = nlohmann::json;

inline json to_json(const Schema& s) {
    json j;
    j["variables"] = s.variables;
    auto& r = j["ranges"] = json::array();
    for (const auto& iv : s.ranges) r.push_back({iv.lo, iv.hi});
    return j;
}

inline Schema schema_from_json(const json& j) {
    Schema s;
    s.variables = j.at("variables").get<std::vector<std::string>>();
    for (const auto& r : j.at("ranges")) s.ranges.push_back({r.at(0).get<double>(), r.at(1).get<double>(), false});
    if (!s.ranges.empty() && s.ranges.size() != s.variables.size()) throw InputError("schema: range count mismatch");
    return s;
}

inline json to_json(const GPModel& m, const Schema& s) {
    return json{{"expression", format(m.tree, s.variables)},
                {"complexity", m.quality.complexity},
                {"error", m.quality.error},
                {"age", m.quality.age},
                {"run", m.provenance.run},
                {"born", m.provenance.born}};
}

inline GPModel model_from_json(const json& j, const Schema& s) {
    GPModel m;
    m.tree = parse(j.at("expression").get<std::string>(), s.variables);
    m.quality.complexity = j.at("complexity").get<std::size_t>();
    m.quality.error = j.at("error").get<double>();
    m.quality.age = j.value("age", std::size_t{0});
    m.provenance.run = j.value("run", std::uint64_t{0});
    m.provenance.born = j.value("born", std::size_t{0});
    if (m.quality.complexity != complexity(m.tree))
        throw InputError("model '" + j.at("expression").get<std::string>() + "': stored complexity does not match its tree");
    return m;
}

inline json models_to_json(const std::vector<GPModel>& models, const Schema& s) {
    json arr = json::array();
    for (const auto& m : models) arr.push_back(to_json(m, s));
    return arr;
}

inline std::vector<GPModel> models_from_json(const json& arr, const Schema& s) {
    std::vector<GPModel> out;
    for (const auto& j : arr) out.push_back(model_from_json(j, s));
    return out;
}

inline json to_json(const EvolutionConfig& c) {
    json j{{"population_size", c.population_size},
           {"elite_size", c.elite_size},
           {"tournament_size", c.tournament_size},
           {"crossover_rate", c.crossover_rate},
           {"subtree_mutation_rate", c.subtree_mutation_rate},
           {"depth_preserving_mutation_rate", c.depth_preserving_mutation_rate},
           {"max_complexity", c.max_complexity},
           {"time_budget_seconds", c.time_budget_seconds},
           {"independent_evolutions", c.independent_evolutions},
           {"rng_seed", c.rng_seed}};
    j["max_generations"] = c.max_generations ? json(*c.max_generations) : json(nullptr);
    return j;
}

/// Reads the fields present in `j` over the defaults in `base`.
inline EvolutionConfig evolution_config_from_json(const json& j, EvolutionConfig base = {}) {
    base.population_size = j.value("population_size", base.population_size);
    base.elite_size = j.value("elite_size", base.elite_size);
    base.tournament_size = j.value("tournament_size", base.tournament_size);
    base.crossover_rate = j.value("crossover_rate", base.crossover_rate);
    base.subtree_mutation_rate = j.value("subtree_mutation_rate", base.subtree_mutation_rate);
    base.depth_preserving_mutation_rate = j.value("depth_preserving_mutation_rate", base.depth_preserving_mutation_rate);
    base.max_complexity = j.value("max_complexity", base.max_complexity);
    base.time_budget_seconds = j.value("time_budget_seconds", base.time_budget_seconds);
    base.independent_evolutions = j.value("independent_evolutions", base.independent_evolutions);
    base.rng_seed = j.value("rng_seed", base.rng_seed);
    if (j.contains("max_generations"))
        base.max_generations = j["max_generations"].is_null() ? std::nullopt
                                                              : std::optional<std::size_t>(j["max_generations"].get<std::size_t>());
    return base;
}

inline json to_json(const RunArchive& a) {
    json j;
    j["kind"] = "run_archive";
    j["run_id"] = a.run_id;
    j["seed"] = a.seed;
    j["generations"] = a.generations;
    j["config"] = to_json(a.config);
    j["schema"] = to_json(a.schema);
    j["models"] = models_to_json(a.models, a.schema);
    return j;
}

inline RunArchive run_archive_from_json(const json& j) {
    RunArchive a;
    a.run_id = j.at("run_id").get<std::uint64_t>();
    a.seed = j.at("seed").get<std::uint64_t>();
    a.generations = j.at("generations").get<std::size_t>();
    a.config = evolution_config_from_json(j.at("config"));
    a.schema = schema_from_json(j.at("schema"));
    a.models = models_from_json(j.at("models"), a.schema);
    return a;
}

inline json to_json(const ModelCollection& c) {
    return json{{"kind", "model_collection"}, {"schema", to_json(c.schema)}, {"models", models_to_json(c.models, c.schema)}};
}

inline ModelCollection model_collection_from_json(const json& j) {
    ModelCollection c;
    c.schema = schema_from_json(j.at("schema"));
    c.models = models_from_json(j.at("models"), c.schema);
    return c;
}

inline json to_json(const ModelSet& s) {
    json j;
    j["kind"] = "model_set";
    j["schema"] = to_json(s.schema);
    j["selection"] = {{"max_error", s.spec.max_error},
                      {"max_complexity", s.spec.max_complexity},
                      {"retain_fraction", s.spec.retain_fraction}};
    j["source_size"] = s.source_size;
    j["after_thresholds"] = s.after_thresholds;
    j["diagnostics"] = s.diagnostics;
    j["models"] = models_to_json(s.models, s.schema);
    return j;
}

inline ModelSet model_set_from_json(const json& j) {
    ModelSet s;
    s.schema = schema_from_json(j.at("schema"));
    const auto& sel = j.at("selection");
    s.spec = {sel.at("max_error").get<double>(), sel.at("max_complexity").get<std::size_t>(),
              sel.at("retain_fraction").get<double>()};
    s.source_size = j.at("source_size").get<std::size_t>();
    s.after_thresholds = j.value("after_thresholds", std::size_t{0});
    s.diagnostics = j.value("diagnostics", std::string{});
    s.models = models_from_json(j.at("models"), s.schema);
    return s;
}

inline json to_json(const Ensemble& e) {
    json j;
    j["kind"] = "ensemble";
    j["schema"] = to_json(e.schema);
    j["complexity_cap"] = e.complexity_cap;
    j["requested_size"] = e.requested_size;
    auto& arr = j["members"] = json::array();
    for (const auto& m : e.members) {
        auto mj = to_json(m.model, e.schema);
        mj["intercept"] = m.scaling.intercept;
        mj["slope"] = m.scaling.slope;
        arr.push_back(std::move(mj));
    }
    return j;
}

inline Ensemble ensemble_from_json(const json& j) {
    Ensemble e;
    e.schema = schema_from_json(j.at("schema"));
    e.complexity_cap = j.at("complexity_cap").get<std::size_t>();
    e.requested_size = j.value("requested_size", std::size_t{0});
    for (const auto& mj : j.at("members"))
        e.members.push_back({model_from_json(mj, e.schema), {mj.at("intercept").get<double>(), mj.at("slope").get<double>()}});
    return e;
}

inline void write_json(const std::filesystem::path& path, const json& j) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
}

inline json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

}  // namespace pgp
