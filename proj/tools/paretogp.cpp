// Command-line driver for the two-stage symbolic regression workflow:
// ingest -> evolve -> select -> analyze -> evolve (reduced) -> select ->
// ensemble -> predict -> report. Every command reads its inputs from the
// output directory and writes plain CSV/JSON next to them.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "paretogp/paretogp.hpp"

namespace fs = std::filesystem;
using pgp::json;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitMissing = 3;
constexpr double kDriverShare = 0.10;

class MissingArtifact : public std::runtime_error {
public:
    explicit MissingArtifact(const fs::path& p)
        : std::runtime_error("missing upstream artifact '" + p.string() + "'") {}
};

struct TableSpec {
    fs::path path;
    pgp::TableFormat format;
};

struct ProjectConfig {
    TableSpec predictors;
    TableSpec response;
    std::string response_column;
    int utc_offset_minutes = 0;
    double missing_threshold = 0.75;
    int window_minutes = 25;
    pgp::TimeRange train_range;
    pgp::TimeRange test_range;
    pgp::EvolutionConfig evolution;
    pgp::SelectionSpec stage1{0.30, 350, 1.0};
    pgp::SelectionSpec stage2{0.30, 250, 0.25};
    std::vector<std::string> stage2_variables;
    std::size_t ensemble_cap = 150;
    std::size_t ensemble_size = 6;
    fs::path output_dir = "out";
};

pgp::SelectionSpec selection_from_json(const json& j, pgp::SelectionSpec base) {
    base.max_error = j.value("max_error", base.max_error);
    base.max_complexity = j.value("max_complexity", base.max_complexity);
    base.retain_fraction = j.value("retain_fraction", base.retain_fraction);
    if (!(base.max_error > 0.0) || base.max_complexity == 0 || !(base.retain_fraction > 0.0))
        throw pgp::InputError("selection thresholds must be positive");
    return base;
}

TableSpec table_from_json(const json& j, const fs::path& base) {
    TableSpec t;
    t.path = base / j.at("path").get<std::string>();
    const auto delim = j.value("delimiter", std::string(","));
    if (delim.size() != 1) throw pgp::InputError("delimiter must be a single character");
    t.format.delimiter = delim[0];
    t.format.timestamp_column = j.value("timestamp_column", t.format.timestamp_column);
    t.format.timestamp_format = j.value("timestamp_format", t.format.timestamp_format);
    t.format.utc_offset_minutes = pgp::parse_utc_offset(j.value("timezone", std::string("UTC")));
    return t;
}

pgp::TimeRange range_from_json(const json& j, int offset) {
    if (!j.is_array() || j.size() != 2) throw pgp::InputError("date ranges are [begin, end] pairs");
    return {pgp::parse_datetime(j[0].get<std::string>(), offset), pgp::parse_datetime(j[1].get<std::string>(), offset)};
}

ProjectConfig load_config(const fs::path& path) {
    const json j = pgp::read_json(path);
    const fs::path base = path.parent_path();
    ProjectConfig c;
    try {
        const auto& d = j.at("data");
        c.predictors = table_from_json(d.at("predictors"), base);
        c.response = table_from_json(d.at("response"), base);
        c.response_column = d.value("response_column", std::string{});
        c.utc_offset_minutes = pgp::parse_utc_offset(d.value("timezone", std::string("UTC")));
        c.missing_threshold = d.value("missing_threshold", c.missing_threshold);
        c.window_minutes = d.value("window_minutes", c.window_minutes);
        c.train_range = range_from_json(d.at("train_range"), c.utc_offset_minutes);
        c.test_range = range_from_json(d.at("test_range"), c.utc_offset_minutes);
        if (j.contains("evolution")) c.evolution = pgp::evolution_config_from_json(j["evolution"]);
        if (j.contains("stage1")) c.stage1 = selection_from_json(j["stage1"], c.stage1);
        if (j.contains("stage2")) {
            c.stage2 = selection_from_json(j["stage2"], c.stage2);
            c.stage2_variables = j["stage2"].value("variables", std::vector<std::string>{});
        }
        if (j.contains("ensemble")) {
            c.ensemble_cap = j["ensemble"].value("complexity_cap", c.ensemble_cap);
            c.ensemble_size = j["ensemble"].value("size", c.ensemble_size);
        }
        if (j.contains("output_dir")) c.output_dir = base / j["output_dir"].get<std::string>();
        c.evolution.rng_seed = j.value("seed", c.evolution.rng_seed);
    } catch (const json::exception& e) {
        throw pgp::InputError(path.string() + ": " + e.what());
    }
    c.evolution.validate();
    return c;
}

// Output layout

struct Layout {
    fs::path root;

    [[nodiscard]] fs::path data(const std::string& stem, const char* ext) const { return root / "data" / (stem + ext); }
    [[nodiscard]] fs::path stage(int s) const { return root / ("stage" + std::to_string(s)); }
    [[nodiscard]] fs::path runs(int s) const { return stage(s) / "runs"; }
    [[nodiscard]] fs::path superset(int s) const { return stage(s) / "superset.json"; }
    [[nodiscard]] fs::path modelset(int s) const { return stage(s) / "modelset.json"; }
    [[nodiscard]] fs::path scatter(int s) const { return stage(s) / "pareto_scatter.csv"; }
    [[nodiscard]] fs::path analysis(int s) const { return stage(s) / "analysis"; }
    [[nodiscard]] fs::path ensemble() const { return root / "ensemble" / "ensemble.json"; }
    [[nodiscard]] fs::path members() const { return root / "ensemble" / "members.csv"; }
    [[nodiscard]] fs::path predictions() const { return root / "predict" / "predictions.csv"; }
    [[nodiscard]] fs::path report() const { return root / "report"; }
};

void require(const fs::path& p) {
    if (!fs::exists(p)) throw MissingArtifact(p);
}

pgp::AlignedDataset load_split(const Layout& out, const std::string& stem) {
    const auto csv = out.data(stem, ".csv");
    const auto sidecar = out.data(stem, ".json");
    require(csv);
    require(sidecar);
    return pgp::read_dataset(csv, sidecar);
}

json load_artifact(const fs::path& p) {
    require(p);
    return pgp::read_json(p);
}

/// Stage-2 data keeps only the configured variables.
pgp::AlignedDataset stage_data(const ProjectConfig& cfg, const pgp::AlignedDataset& ds, int stage) {
    if (stage == 1) return ds;
    if (cfg.stage2_variables.empty()) throw pgp::InputError("stage2.variables must list the retained variables");
    return pgp::select_variables(ds, cfg.stage2_variables);
}

const pgp::SelectionSpec& stage_spec(const ProjectConfig& cfg, int stage) {
    return stage == 1 ? cfg.stage1 : cfg.stage2;
}

std::ofstream open_out(const fs::path& p) {
    fs::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary);
    if (!f) throw pgp::InputError("cannot write '" + p.string() + "'");
    return f;
}

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

std::string num(double v) { return std::isfinite(v) ? pgp::format_number(v) : std::string("nan"); }

// Commands

void cmd_ingest(const ProjectConfig& cfg, const Layout& out) {
    for (const auto* t : {&cfg.predictors, &cfg.response})
        if (!fs::exists(t->path)) throw pgp::InputError("input file '" + t->path.string() + "' does not exist");
    const auto raw = pgp::parse_table(cfg.predictors.path, cfg.predictors.format);
    const auto resp = pgp::parse_table(cfg.response.path, cfg.response.format);
    const auto screened = pgp::screen_variables(raw, cfg.missing_threshold);
    pgp::AlignOptions opt;
    opt.utc_offset_minutes = cfg.utc_offset_minutes;
    opt.window_minutes = cfg.window_minutes;
    opt.response_column = cfg.response_column;
    const auto ds = pgp::align(screened, resp, opt);
    const auto [train, test] = pgp::split_by_date(ds, cfg.train_range, cfg.test_range);

    std::vector<std::string> log = screened.log;
    log.insert(log.end(), resp.log.begin(), resp.log.end());
    log.push_back("aligned " + std::to_string(ds.rows()) + " of " + std::to_string(screened.rows()) + " predictor rows");
    fs::create_directories(out.root / "data");
    pgp::write_dataset(ds, out.data("dataset", ".csv"), out.data("dataset", ".json"), log);
    pgp::write_dataset(train, out.data("train", ".csv"), out.data("train", ".json"));
    pgp::write_dataset(test, out.data("test", ".csv"), out.data("test", ".json"));
    std::cout << "ingest: " << ds.rows() << " rows, " << ds.num_variables() << " variables; train " << train.rows()
              << ", test " << test.rows() << '\n';
}

void cmd_evolve(const ProjectConfig& cfg, const Layout& out, int stage) {
    const auto train = stage_data(cfg, load_split(out, "train"), stage);
    auto ecfg = cfg.evolution;
    if (stage == 2) ecfg.rng_seed = pgp::derive_seed(cfg.evolution.rng_seed, 1000);
    const auto progress = [stage](const pgp::GenerationStats& s) {
        std::cerr << "stage " << stage << " run " << s.run << " gen " << s.generation << " best_error "
                  << num(s.best_error) << " front " << s.front_size << '\n';
    };
    const auto archives = pgp::evolve_independent(train, ecfg, progress);
    fs::create_directories(out.runs(stage));
    for (const auto& a : archives) {
        char name[32];
        std::snprintf(name, sizeof name, "run_%02llu.json", static_cast<unsigned long long>(a.run_id));
        pgp::write_json(out.runs(stage) / name, pgp::to_json(a));
    }
    const auto superset = pgp::merge_runs(archives);
    pgp::write_json(out.superset(stage), pgp::to_json(superset));
    std::cout << "evolve: stage " << stage << ", " << archives.size() << " runs, superset of " << superset.models.size()
              << " models\n";
}

void cmd_select(const ProjectConfig& cfg, const Layout& out, int stage) {
    const auto superset = pgp::model_collection_from_json(load_artifact(out.superset(stage)));
    const auto robust = pgp::filter_robust(superset);
    if (robust.models.empty()) throw pgp::InputError("select: no robust models in " + out.superset(stage).string());
    const auto set = pgp::select_model_set(robust, stage_spec(cfg, stage));
    pgp::write_json(out.modelset(stage), pgp::to_json(set));
    auto f = open_out(out.scatter(stage));
    f << "complexity,error,front,selected,expression\n";
    for (const auto& p : pgp::pareto_scatter(robust, set))
        f << p.complexity << ',' << num(p.error) << ',' << p.front << ',' << p.selected << ',' << quoted(p.expression)
          << '\n';
    std::cout << "select: stage " << stage << ", " << robust.models.size() << " robust of " << superset.models.size()
              << ", " << set.models.size() << " selected\n";
    if (set.models.empty()) std::cout << "select: " << set.diagnostics << '\n';
}

pgp::ModelSet load_nonempty_set(const Layout& out, int stage) {
    auto set = pgp::model_set_from_json(load_artifact(out.modelset(stage)));
    if (set.models.empty())
        throw pgp::InputError("model set " + out.modelset(stage).string() + " is empty: " + set.diagnostics);
    return set;
}

void cmd_analyze(const ProjectConfig& cfg, const Layout& out, int stage) {
    const auto set = load_nonempty_set(out, stage);
    const auto train = stage_data(cfg, load_split(out, "train"), stage);
    const auto dir = out.analysis(stage);
    {
        auto f = open_out(dir / "presence.csv");
        f << "rank,variable,presence,models\n";
        for (const auto& v : pgp::variable_presence(set))
            f << v.rank << ',' << v.name << ',' << num(v.presence) << ',' << v.models_with << '\n';
    }
    {
        auto f = open_out(dir / "contribution.csv");
        f << "rank,variable,median_contribution,models\n";
        for (const auto& v : pgp::variable_contribution(set, train))
            f << v.rank << ',' << v.name << ',' << (v.contribution ? num(*v.contribution) : std::string()) << ','
              << v.models_with << '\n';
    }
    {
        auto f = open_out(dir / "niches.csv");
        f << "variables,count,best_error\n";
        for (const auto& n : pgp::niche_by_variable_combination(set)) {
            std::string names;
            for (auto v : n.variables) names += (names.empty() ? "" : " ") + set.schema.variables[v];
            f << quoted(names) << ',' << n.count << ',' << num(n.best_error) << '\n';
        }
    }
    std::cout << "analyze: stage " << stage << ", " << set.models.size() << " models\n";
}

void cmd_ensemble(const ProjectConfig& cfg, const Layout& out) {
    const auto set = load_nonempty_set(out, 2);
    const auto train = stage_data(cfg, load_split(out, "train"), 2);
    const auto test = stage_data(cfg, load_split(out, "test"), 2);
    const auto e = pgp::create_ensemble(set, train, cfg.ensemble_size, cfg.ensemble_cap);
    pgp::write_json(out.ensemble(), pgp::to_json(e));
    const auto rep = pgp::evaluate_ensemble(e, test);
    auto f = open_out(out.members());
    f << "expression,complexity,train_error,test_error,test_normalized_rmse\n";
    for (const auto& m : rep.members)
        f << quoted(m.expression) << ',' << m.complexity << ',' << num(m.train_error) << ',' << num(m.test_error) << ','
          << num(m.test_normalized_rmse) << '\n';
    std::cout << "ensemble: " << e.members.size() << " members\n";
}

pgp::AlignedDataset test_for(const pgp::Ensemble& e, const Layout& out) {
    return pgp::select_variables(load_split(out, "test"), e.schema.variables);
}

void cmd_predict(const Layout& out) {
    const auto e = pgp::ensemble_from_json(load_artifact(out.ensemble()));
    const auto test = test_for(e, out);
    const auto bands = pgp::ensemble_predict(e, test);
    auto f = open_out(out.predictions());
    f << "row,timestamp,point,spread,lower,upper,observed\n";
    for (std::size_t r = 0; r < bands.size(); ++r) {
        const auto& b = bands[r];
        f << r << ',' << (test.timestamps.empty() ? std::string() : pgp::format_iso_utc(test.timestamps[r])) << ','
          << num(b.point) << ',' << num(b.spread) << ',' << num(b.point - b.spread) << ',' << num(b.point + b.spread)
          << ',' << num(test.response[r]) << '\n';
    }
    std::cout << "predict: " << bands.size() << " rows\n";
}

void cmd_report(const Layout& out) {
    const auto e = pgp::ensemble_from_json(load_artifact(out.ensemble()));
    const auto set1 = load_nonempty_set(out, 1);
    for (int s : {1, 2}) require(out.scatter(s));
    const auto test = test_for(e, out);
    const auto train = load_split(out, "train");
    const auto rep = pgp::evaluate_ensemble(e, test);
    const auto dir = out.report();
    fs::create_directories(dir);
    for (int s : {1, 2})
        fs::copy_file(out.scatter(s), dir / ("pareto_stage" + std::to_string(s) + ".csv"),
                      fs::copy_options::overwrite_existing);
    {
        auto f = open_out(dir / "predicted_vs_actual.csv");
        f << "observed,predicted,spread\n";
        for (std::size_t r = 0; r < rep.bands.size(); ++r)
            f << num(rep.observed[r]) << ',' << num(rep.bands[r].point) << ',' << num(rep.bands[r].spread) << '\n';
    }
    const auto contrib = pgp::variable_contribution(set1, train);
    const double top = contrib.front().contribution.value_or(0.0);
    json drivers = json::array();
    for (const auto& v : contrib)
        if (v.contribution && top > 0.0 && *v.contribution >= kDriverShare * top) drivers.push_back(v.name);
    json members = json::array();
    for (const auto& m : rep.members)
        members.push_back({{"expression", m.expression},
                           {"complexity", m.complexity},
                           {"train_error", m.train_error},
                           {"test_error", m.test_error}});
    json summary{{"normalized_rmse", std::isfinite(rep.normalized_rmse) ? json(rep.normalized_rmse) : json(nullptr)},
                 {"rmse", std::isfinite(rep.rmse) ? json(rep.rmse) : json(nullptr)},
                 {"test_rows", test.rows()},
                 {"invalid_rows", rep.invalid_rows},
                 {"driver_variables", drivers},
                 {"selected_variables", e.schema.variables},
                 {"ensemble", members}};
    pgp::write_json(dir / "summary.json", summary);
    std::cout << "report: normalized RMSE " << num(rep.normalized_rmse) << ", drivers " << drivers.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pareto-GP symbolic regression pipeline"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::optional<std::size_t> max_generations;
    app.add_option("--config", config_path, "Project configuration (JSON)")->required();
    app.add_option("--seed", seed, "Override the configured seed");
    app.add_option("--out", out_dir, "Override the output directory");
    app.add_option("--max-generations", max_generations, "Generation cap (overrides the time budget)");

    int stage = 1;
    auto* ingest = app.add_subcommand("ingest", "Parse, screen, align and split the raw tables");
    auto* evolve = app.add_subcommand("evolve", "Run the independent evolutions of a stage");
    auto* select = app.add_subcommand("select", "Robustness screening and model-set selection");
    auto* analyze = app.add_subcommand("analyze", "Variable presence, contribution and niches");
    auto* ensemble = app.add_subcommand("ensemble", "Build the ensemble from the stage-2 model set");
    auto* predict = app.add_subcommand("predict", "Ensemble predictions on the test split");
    auto* report = app.add_subcommand("report", "Bundle scatter data, predictions and summary");
    for (auto* sub : {evolve, select, analyze})
        sub->add_option("--stage", stage, "Modelling stage")->check(CLI::Range(1, 2));

    CLI11_PARSE(app, argc, argv);

    try {
        auto cfg = load_config(config_path);
        if (seed) cfg.evolution.rng_seed = *seed;
        if (max_generations) {
            cfg.evolution.max_generations = *max_generations;
            cfg.evolution.time_budget_seconds = std::numeric_limits<double>::max();
        }
        const Layout out{out_dir.empty() ? cfg.output_dir : fs::path(out_dir)};
        if (*ingest) cmd_ingest(cfg, out);
        else if (*evolve) cmd_evolve(cfg, out, stage);
        else if (*select) cmd_select(cfg, out, stage);
        else if (*analyze) cmd_analyze(cfg, out, stage);
        else if (*ensemble) cmd_ensemble(cfg, out);
        else if (*predict) cmd_predict(out);
        else if (*report) cmd_report(out);
    } catch (const MissingArtifact& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitMissing;
    } catch (const pgp::InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return EXIT_SUCCESS;
}
