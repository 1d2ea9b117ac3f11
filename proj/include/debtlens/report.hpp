#pragma once

#include "debtlens/codemetrics.hpp"
#include "debtlens/stats.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace debtlens::report {

// Rounds to 6 significant digits; every float in the bundle goes through this
// so that re-running over the same inputs is byte-identical.
double round6(double v);
std::string format6(double v);

struct MetricComparison {
    std::string metric; // file_count, fan_in_avg, fan_in_max, fan_out_avg, fan_out_max
    double introduction = 0.0;
    double payment = 0.0;
    double percent_change = 0.0; // fraction, per the configured convention
    std::optional<double> cliffs_delta;
    std::optional<std::string> magnitude;
};

struct PhaseComparison {
    Category category = Category::ATD;
    std::vector<MetricComparison> metrics;
};

PhaseComparison phase_comparison_table(const std::vector<FileMetricsRecord>& records,
                                       Category category,
                                       stats::PercentConvention convention);

enum class CellMark { Y, N, Dash };
std::string to_string(CellMark m);

struct SignificanceCell {
    CellMark base = CellMark::Dash;
    CellMark normalized = CellMark::Dash;
    std::optional<double> p_base;
    std::optional<double> p_normalized;
    std::string median_shift; // payment_higher / introduction_higher / equal
};

struct ItemSignificance {
    std::string item_id;
    Category category = Category::ATD;
    SignificanceCell fan_in;
    SignificanceCell fan_out;
    std::optional<double> delta_fan_in;  // payment vs introduction
    std::optional<double> delta_fan_out;
    bool folder_only = false;
};

// Per-item Mann-Whitney matrix (base and SLOC-normalized). Items listed in
// first-appearance order of the records; folder-only items render as dashes.
// Items missing a phase entirely are skipped and reported in `skipped`.
std::vector<ItemSignificance> significance_matrix(
    const std::vector<FileMetricsRecord>& records,
    const std::vector<std::pair<std::string, Category>>& folder_only_items,
    double alpha, stats::Alternative alternative,
    std::vector<std::string>* skipped = nullptr);

struct ChangeStatisticsRow {
    Category category = Category::ATD;
    stats::DescriptiveStats stats;
};

// One descriptive row per category over per-file change counts (each file
// counted once: its introduction-phase row, or the payment row for files
// created inside the interval).
std::vector<ChangeStatisticsRow> change_statistics_table(
    const std::vector<FileMetricsRecord>& records);

struct CorrelationRow {
    std::string metric; // fan_in, fan_out, ccn
    std::optional<stats::PartialCorrelation> correlation;
    std::string note; // set when the row is degenerate / insufficient
};

struct CorrelationTable {
    Category category = Category::ATD;
    std::size_t n = 0;
    std::vector<CorrelationRow> rows;
};

// Partial Spearman of each payment-phase metric vs change count, SLOC
// controlled. Throws InsufficientData when fewer than 5 payment rows exist.
CorrelationTable correlation_table(const std::vector<FileMetricsRecord>& records,
                                   Category category);

enum class PlotTransform { Identity, Log1p };
std::string to_string(PlotTransform t);

struct DistributionSeries {
    Category category = Category::ATD;
    std::string metric; // fan_in, fan_out, change_count
    std::string phase;  // introduction, payment, interval
    std::vector<double> values; // transformed, sorted ascending
    double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
};

std::vector<DistributionSeries> plot_export(const std::vector<FileMetricsRecord>& records,
                                            PlotTransform transform);

// Per-file drill-down: both phases side by side, absent phases rendered N/A.
struct FileDetailRow {
    std::string item_id;
    Category category = Category::ATD;
    std::string path;
    std::optional<FileMetricsRecord> introduction;
    std::optional<FileMetricsRecord> payment;
    int change_count = 0;
};

std::vector<FileDetailRow> file_details(const std::vector<FileMetricsRecord>& records);

struct BundleOptions {
    double alpha = 0.05;
    stats::PercentConvention convention = stats::PercentConvention::AfterDenominator;
    stats::Alternative alternative = stats::Alternative::TwoSided;
    PlotTransform transform = PlotTransform::Log1p;
    std::vector<std::pair<std::string, Category>> folder_only_items;
};

// Writes tables/*.{json,csv} and plots/distributions.json under out_dir.
// Pure function of the records: identical inputs produce identical bytes.
void write_report_bundle(const std::filesystem::path& out_dir,
                         const std::vector<FileMetricsRecord>& records,
                         const BundleOptions& options);

} // namespace debtlens::report
