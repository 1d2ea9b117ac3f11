#pragma once

#include "debtlens/catalog.hpp"
#include "debtlens/codemetrics.hpp"
#include "debtlens/gitminer.hpp"
#include "debtlens/report.hpp"
#include "debtlens/stats.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace debtlens {

struct RunConfig {
    std::string catalog_path;
    CatalogFormat catalog_format = CatalogFormat::Csv;
    std::string repo_cache_dir;
    std::string output_dir;
    double alpha = 0.05;
    stats::PercentConvention percent_convention = stats::PercentConvention::AfterDenominator;
    std::string adapter = "java";
    bool affected_only_graph = false;
    stats::Alternative alternative = stats::Alternative::TwoSided;
    HistoryMode history_mode = HistoryMode::FirstParent;
    IntroductionMode introduction_mode = IntroductionMode::Catalog;
    AffectedMode affected_mode = AffectedMode::PaymentDiff;
    int rename_threshold = 50;
    int jobs = 1;
    report::PlotTransform plot_transform = report::PlotTransform::Log1p;
    CcnAggregate ccn_aggregate = CcnAggregate::Sum;
    std::optional<std::string> fetch_hook; // run via sh -c with DEBTLENS_URL/DEBTLENS_DEST
    std::optional<Indicator> filter_indicator;
    std::optional<Category> filter_category;
    std::optional<Source> filter_source;
};

// Reads a JSON config file with the RunConfig field names; missing keys keep
// their defaults. The DEBTLENS_CACHE environment variable seeds
// repo_cache_dir (lowest precedence).
RunConfig load_config_file(const std::string& path);
void apply_env(RunConfig& config);

struct ItemDiagnostic {
    std::string item_id;
    Category category = Category::ATD;
    std::string status; // ok | skipped | folder_only
    std::string reason;
    std::vector<std::string> parse_failures;
    std::size_t unresolved_imports = 0;
    std::vector<std::pair<std::string, std::string>> blame_origins; // path -> hash
};

struct Diagnostics {
    std::vector<ItemDiagnostic> items;

    std::size_t skipped() const;
    std::size_t folder_only() const;
    std::vector<std::pair<std::string, Category>> folder_only_items() const;
};

std::string diagnostics_to_json(const Diagnostics& diagnostics);
Diagnostics diagnostics_from_json(const std::string& text);

// Maps an item's repo_url to a local clone: the URL itself when it is an
// existing directory, otherwise <cache>/<last path segment minus .git>.
// When the directory is missing and a fetch hook is configured, the hook
// runs once before giving up.
std::filesystem::path resolve_repo_dir(const RunConfig& config, const DebtItem& item);

// Stage functions. Each consumes the previous stage's artifact, so the
// pipeline can be replayed from plain files.
Catalog stage_ingest(const RunConfig& config);

struct MineResult {
    std::vector<LifecycleResolution> lifecycles;
    Diagnostics diagnostics;
    std::vector<DebtItem> mined_items; // catalog rows that produced a lifecycle
};
MineResult stage_mine(const RunConfig& config, const Catalog& catalog);

std::vector<FileMetricsRecord> stage_measure(const RunConfig& config,
                                             const std::vector<DebtItem>& items,
                                             const std::vector<LifecycleResolution>& lifecycles,
                                             Diagnostics& diagnostics);

void stage_analyze(const RunConfig& config, const std::vector<FileMetricsRecord>& records,
                   const std::vector<std::pair<std::string, Category>>& folder_only_items);

// Full run: ingest -> mine -> measure -> analyze, writing lifecycles.json,
// metrics.csv, diagnostics.json and the report bundle under output_dir.
// Returns 0 on success, 2 when some items were skipped, 1 on fatal error.
int run_pipeline(const RunConfig& config);

} // namespace debtlens
