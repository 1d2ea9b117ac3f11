#include "debtlens/depgraph.hpp"
#include "debtlens/error.hpp"
#include "debtlens/pipeline.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace debtlens;

namespace {

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

struct CliOptions {
    std::string config_file;
    RunConfig config;
    std::string catalog_format = "csv";
    std::string percent_convention, alternative, history_mode, intro_mode, affected_mode;
    std::string plot_transform, ccn_aggregate;
    std::string filter_indicator, filter_category, filter_source;
    std::string metrics_file;     // analyze input
    std::string lifecycles_file;  // measure input
    std::string diagnostics_file; // analyze folder-only source
};

void add_common_flags(CLI::App* cmd, CliOptions& o) {
    cmd->add_option("--config", o.config_file, "JSON config file with RunConfig fields");
    cmd->add_option("--catalog", o.config.catalog_path, "catalog file (csv or json)");
    cmd->add_option("--catalog-format", o.catalog_format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--repo-cache", o.config.repo_cache_dir,
                    "directory with local clones (env DEBTLENS_CACHE)");
    cmd->add_option("--out", o.config.output_dir, "output directory");
    cmd->add_option("--alpha", o.config.alpha, "significance level (default 0.05)");
    cmd->add_option("--percent-convention", o.percent_convention, "after|before denominator")
        ->check(CLI::IsMember({"after", "before", "after_denominator", "before_denominator"}));
    cmd->add_option("--adapter", o.config.adapter, "language adapter id (default java)");
    cmd->add_flag("--affected-only-graph", o.config.affected_only_graph,
                  "induce the graph on affected files instead of the full snapshot");
    cmd->add_option("--alternative", o.alternative,
                    "two_sided|less|greater (less = introduction below payment)")
        ->check(CLI::IsMember({"two_sided", "two-sided", "less", "greater"}));
    cmd->add_option("--history-mode", o.history_mode, "first_parent|all_parents")
        ->check(CLI::IsMember({"first_parent", "first-parent", "all_parents", "all-parents"}));
    cmd->add_option("--intro-mode", o.intro_mode, "catalog|blame introduction resolution")
        ->check(CLI::IsMember({"catalog", "blame"}));
    cmd->add_option("--affected-mode", o.affected_mode, "payment|union diff scope")
        ->check(CLI::IsMember({"payment", "union"}));
    cmd->add_option("--rename-threshold", o.config.rename_threshold,
                    "rename similarity percent (default 50)");
    cmd->add_option("--jobs", o.config.jobs, "parallel item workers (default 1)");
    cmd->add_option("--plot-transform", o.plot_transform, "log1p|identity")
        ->check(CLI::IsMember({"log1p", "identity"}));
    cmd->add_option("--ccn-aggregate", o.ccn_aggregate, "sum|average file complexity")
        ->check(CLI::IsMember({"sum", "average"}));
    cmd->add_option("--fetch-hook", [&o](const std::vector<std::string>& v) {
        o.config.fetch_hook = v.front();
        return true;
    }, "shell command run when a repo is missing (DEBTLENS_URL/DEBTLENS_DEST set)");
    cmd->add_option("--indicator", o.filter_indicator, "filter: VioMod|ObsTech|None");
    cmd->add_option("--category", o.filter_category, "filter: ATD|NonATD");
    cmd->add_option("--source", o.filter_source, "filter: IS|PS|CM");
}

RunConfig finalize(CliOptions& o, CLI::App* cmd) {
    RunConfig config;
    apply_env(config);
    if (!o.config_file.empty()) config = load_config_file(o.config_file);

    auto given = [&](const std::string& name) { return cmd->count(name) > 0; };
    if (given("--catalog")) config.catalog_path = o.config.catalog_path;
    if (given("--catalog-format"))
        config.catalog_format =
            o.catalog_format == "json" ? CatalogFormat::Json : CatalogFormat::Csv;
    if (given("--repo-cache")) config.repo_cache_dir = o.config.repo_cache_dir;
    if (given("--out")) config.output_dir = o.config.output_dir;
    if (given("--alpha")) config.alpha = o.config.alpha;
    if (given("--percent-convention"))
        config.percent_convention = stats::percent_convention_from_string(
            o.percent_convention == "after" ? "after_denominator"
            : o.percent_convention == "before" ? "before_denominator"
                                               : o.percent_convention);
    if (given("--adapter")) config.adapter = o.config.adapter;
    if (given("--affected-only-graph")) config.affected_only_graph = o.config.affected_only_graph;
    if (given("--alternative"))
        config.alternative = stats::alternative_from_string(o.alternative);
    if (given("--history-mode"))
        config.history_mode = (o.history_mode == "all_parents" || o.history_mode == "all-parents")
                                  ? HistoryMode::AllParents
                                  : HistoryMode::FirstParent;
    if (given("--intro-mode"))
        config.introduction_mode =
            o.intro_mode == "blame" ? IntroductionMode::Blame : IntroductionMode::Catalog;
    if (given("--affected-mode"))
        config.affected_mode =
            o.affected_mode == "union" ? AffectedMode::UnionDiffs : AffectedMode::PaymentDiff;
    if (given("--rename-threshold")) config.rename_threshold = o.config.rename_threshold;
    if (given("--jobs")) config.jobs = o.config.jobs;
    if (given("--plot-transform"))
        config.plot_transform = o.plot_transform == "identity" ? report::PlotTransform::Identity
                                                               : report::PlotTransform::Log1p;
    if (given("--ccn-aggregate"))
        config.ccn_aggregate =
            o.ccn_aggregate == "average" ? CcnAggregate::Average : CcnAggregate::Sum;
    if (o.config.fetch_hook) config.fetch_hook = o.config.fetch_hook;
    if (given("--indicator")) config.filter_indicator = indicator_from_string(o.filter_indicator);
    if (given("--category")) config.filter_category = category_from_string(o.filter_category);
    if (given("--source")) config.filter_source = source_from_string(o.filter_source);

    if (config.alpha <= 0.0 || config.alpha >= 1.0) throw Error("alpha must be in (0, 1)");
    return config;
}

int cmd_ingest(const RunConfig& config, bool dedupe, const std::string& out_path) {
    Catalog catalog = stage_ingest(config);
    std::size_t parsed = catalog.items.size();
    Catalog result = dedupe ? dedupe_and_filter(catalog, config.filter_indicator,
                                                config.filter_category, config.filter_source)
                            : catalog;
    std::cout << "catalog: " << config.catalog_path << "\n"
              << "items parsed: " << parsed << "\n";
    if (dedupe) std::cout << "items after dedupe/filter: " << result.items.size() << "\n";
    std::size_t atd = 0;
    for (const auto& item : result.items)
        if (item.category == Category::ATD) ++atd;
    std::cout << "ATD: " << atd << ", NonATD: " << result.items.size() - atd << "\n";
    if (!out_path.empty())
        write_text(out_path, serialize_catalog(result, config.catalog_format));
    return 0;
}

int cmd_mine(const RunConfig& config) {
    Catalog catalog = stage_ingest(config);
    fs::create_directories(config.output_dir);
    MineResult mine = stage_mine(config, catalog);
    write_text(fs::path(config.output_dir) / "lifecycles.json",
               lifecycles_to_json(mine.lifecycles));
    write_text(fs::path(config.output_dir) / "diagnostics.json",
               diagnostics_to_json(mine.diagnostics));
    std::cout << "mined " << mine.lifecycles.size() << " items, skipped "
              << mine.diagnostics.skipped() << "\n";
    return mine.diagnostics.skipped() > 0 ? 2 : 0;
}

int cmd_measure(const RunConfig& config, const std::string& lifecycles_file) {
    Catalog catalog = stage_ingest(config);
    fs::path in = lifecycles_file.empty()
                      ? fs::path(config.output_dir) / "lifecycles.json"
                      : fs::path(lifecycles_file);
    auto lifecycles = lifecycles_from_json(read_text(in));

    // Re-pair lifecycles with their catalog rows.
    std::vector<DebtItem> items;
    Diagnostics diagnostics;
    fs::path diag_path = fs::path(config.output_dir) / "diagnostics.json";
    if (fs::exists(diag_path)) diagnostics = diagnostics_from_json(read_text(diag_path));
    std::vector<LifecycleResolution> paired;
    for (const auto& life : lifecycles) {
        for (const auto& item : catalog.items)
            if (item.item_id == life.item_id) {
                items.push_back(item);
                paired.push_back(life);
                break;
            }
    }
    if (diagnostics.items.empty()) {
        for (const auto& item : items)
            diagnostics.items.push_back({item.item_id, item.category, "ok", "", {}, 0, {}});
    }

    auto records = stage_measure(config, items, paired, diagnostics);
    fs::create_directories(config.output_dir);
    write_text(fs::path(config.output_dir) / "metrics.csv", write_metrics_csv(records));
    write_text(diag_path, diagnostics_to_json(diagnostics));
    std::cout << "measured " << records.size() << " records over " << items.size() << " items\n";
    return diagnostics.skipped() > 0 ? 2 : 0;
}

int cmd_analyze(const RunConfig& config, const std::string& metrics_file,
                const std::string& diagnostics_file) {
    fs::path in = metrics_file.empty() ? fs::path(config.output_dir) / "metrics.csv"
                                       : fs::path(metrics_file);
    auto records = read_metrics_csv_file(in.string());
    std::vector<std::pair<std::string, Category>> folder_only;
    fs::path diag = diagnostics_file.empty() ? fs::path(config.output_dir) / "diagnostics.json"
                                             : fs::path(diagnostics_file);
    if (fs::exists(diag))
        folder_only = diagnostics_from_json(read_text(diag)).folder_only_items();
    stage_analyze(config, records, folder_only);
    std::cout << "report bundle written to " << config.output_dir << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"debtlens: architecture-technical-debt lifecycle metrics over git history"};
    app.require_subcommand(1);

    CliOptions o;
    bool ingest_dedupe = false;
    std::string ingest_out;

    auto* ingest = app.add_subcommand("ingest", "validate a catalog");
    add_common_flags(ingest, o);
    ingest->add_flag("--dedupe", ingest_dedupe, "also dedupe and apply filters");
    ingest->add_option("--normalized-out", ingest_out, "write the resulting catalog here");

    auto* mine = app.add_subcommand("mine", "resolve item lifecycles to lifecycles.json");
    add_common_flags(mine, o);

    auto* measure = app.add_subcommand("measure", "compute per-file metrics to metrics.csv");
    add_common_flags(measure, o);
    measure->add_option("--lifecycles", o.lifecycles_file, "lifecycles.json from mine");

    auto* analyze = app.add_subcommand("analyze", "statistics + report bundle from metrics.csv");
    add_common_flags(analyze, o);
    analyze->add_option("--metrics", o.metrics_file, "metrics csv input");
    analyze->add_option("--diagnostics", o.diagnostics_file,
                        "diagnostics.json (folder-only items for the matrix)");

    auto* run = app.add_subcommand("run", "full pipeline: ingest, mine, measure, analyze");
    add_common_flags(run, o);

    CLI11_PARSE(app, argc, argv);

    try {
        if (ingest->parsed()) return cmd_ingest(finalize(o, ingest), ingest_dedupe, ingest_out);
        if (mine->parsed()) return cmd_mine(finalize(o, mine));
        if (measure->parsed()) return cmd_measure(finalize(o, measure), o.lifecycles_file);
        if (analyze->parsed())
            return cmd_analyze(finalize(o, analyze), o.metrics_file, o.diagnostics_file);
        if (run->parsed()) return run_pipeline(finalize(o, run));
    } catch (const std::exception& e) {
        std::cerr << "fatal: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
