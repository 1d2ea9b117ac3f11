#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "debtlens/error.hpp"
#include "debtlens/report.hpp"
#include "support/oracles.hpp"
#include "support/testutil.hpp"

#include <cmath>
#include <random>

using namespace debtlens;
using report::CellMark;

namespace {

FileMetricsRecord rec(const std::string& item, Category cat, Phase phase, const std::string& path,
                      int fan_in, int fan_out, int sloc = 100, int ccn = 5, int changes = 1) {
    return {item, cat, phase, path, fan_in, fan_out, sloc, ccn, changes};
}

// Synthetic records reproducing the published percent-change arithmetic:
// 289 introduction files averaging 8.031 fan-in (max 1360), 200 payment files
// averaging 18.89 (max 2684), and the matching fan-out columns.
std::vector<FileMetricsRecord> replication_shape_records() {
    std::vector<int> fi_i = {1360}, fo_i = {237}, fi_p = {2684}, fo_p = {301};
    for (int k = 0; k < 97; ++k) fi_i.push_back(4);
    for (int k = 0; k < 191; ++k) fi_i.push_back(3);
    for (int k = 0; k < 85; ++k) fo_i.push_back(8);
    for (int k = 0; k < 203; ++k) fo_i.push_back(7);
    for (int k = 0; k < 99; ++k) fi_p.push_back(6);
    for (int k = 0; k < 100; ++k) fi_p.push_back(5);
    for (int k = 0; k < 116; ++k) fo_p.push_back(10);
    for (int k = 0; k < 83; ++k) fo_p.push_back(9);

    std::vector<FileMetricsRecord> records;
    for (std::size_t i = 0; i < fi_i.size(); ++i)
        records.push_back(rec("agg", Category::ATD, Phase::Introduction,
                              "f" + std::to_string(i) + ".java", fi_i[i], fo_i[i]));
    for (std::size_t i = 0; i < fi_p.size(); ++i)
        records.push_back(rec("agg", Category::ATD, Phase::Payment,
                              "f" + std::to_string(i) + ".java", fi_p[i], fo_p[i]));
    return records;
}

std::vector<FileMetricsRecord> atd1_records() {
    return read_metrics_csv_file(std::string(DEBTLENS_FIXTURES) + "/atd1_metrics.csv");
}

} // namespace

TEST_CASE("round6: six significant digits") {
    CHECK(report::format6(0.00019848047) == "0.000198480");
    CHECK(report::format6(2684.0) == "2684");
    CHECK(report::round6(1.0 / 3.0) == doctest::Approx(0.333333).epsilon(1e-9));
}

TEST_CASE("phase comparison: replication arithmetic") {
    auto records = replication_shape_records();
    auto pc = report::phase_comparison_table(records, Category::ATD,
                                             stats::PercentConvention::AfterDenominator);
    REQUIRE(pc.metrics.size() == 5);
    auto pct = [&](const std::string& name) {
        for (const auto& m : pc.metrics)
            if (m.metric == name) return 100.0 * m.percent_change;
        FAIL("missing metric ", name);
        return 0.0;
    };
    CHECK(std::fabs(pct("file_count") - (-44.5)) <= 0.05);
    CHECK(std::fabs(pct("fan_in_avg") - 57.5) <= 0.05);
    CHECK(std::fabs(pct("fan_in_max") - 49.33) <= 0.05);
    CHECK(std::fabs(pct("fan_out_avg") - 26.7) <= 0.05);
    CHECK(std::fabs(pct("fan_out_max") - 21.23) <= 0.05);
}

TEST_CASE("phase comparison: identical phases give zero change") {
    std::vector<FileMetricsRecord> records;
    for (int i = 0; i < 4; ++i) {
        records.push_back(rec("t", Category::ATD, Phase::Introduction, "f" + std::to_string(i),
                              i + 1, i));
        records.push_back(rec("t", Category::ATD, Phase::Payment, "f" + std::to_string(i), i + 1,
                              i));
    }
    auto pc = report::phase_comparison_table(records, Category::ATD,
                                             stats::PercentConvention::AfterDenominator);
    for (const auto& m : pc.metrics) CHECK(m.percent_change == doctest::Approx(0.0));
}

TEST_CASE("phase comparison: three-file hand fixture") {
    std::vector<FileMetricsRecord> records = {
        rec("t", Category::ATD, Phase::Introduction, "a", 2, 1),
        rec("t", Category::ATD, Phase::Introduction, "b", 4, 3),
        rec("t", Category::ATD, Phase::Introduction, "c", 6, 2),
        rec("t", Category::ATD, Phase::Payment, "a", 6, 2),
        rec("t", Category::ATD, Phase::Payment, "b", 10, 6),
    };
    auto pc = report::phase_comparison_table(records, Category::ATD,
                                             stats::PercentConvention::AfterDenominator);
    // intro avg fan_in 4, payment avg 8 -> (8-4)/8 = 0.5
    CHECK(pc.metrics[1].introduction == doctest::Approx(4.0));
    CHECK(pc.metrics[1].payment == doctest::Approx(8.0));
    CHECK(pc.metrics[1].percent_change == doctest::Approx(0.5));
    // file count 3 -> 2: (2-3)/2 = -0.5
    CHECK(pc.metrics[0].percent_change == doctest::Approx(-0.5));
    // max fan_out 3 -> 6: (6-3)/6 = 0.5
    CHECK(pc.metrics[4].percent_change == doctest::Approx(0.5));
}

TEST_CASE("phase comparison: empty phase raises") {
    std::vector<FileMetricsRecord> records = {
        rec("t", Category::ATD, Phase::Introduction, "a", 1, 1)};
    CHECK_THROWS_AS((void)report::phase_comparison_table(
                        records, Category::ATD, stats::PercentConvention::AfterDenominator),
                    EmptyPhase);
}

TEST_CASE("significance matrix: ATD#1 row is Y(Y) / N(N)") {
    auto records = atd1_records();
    for (auto alt : {stats::Alternative::TwoSided, stats::Alternative::Less}) {
        auto matrix = report::significance_matrix(records, {}, 0.05, alt);
        REQUIRE(matrix.size() == 1);
        CHECK(matrix[0].fan_in.base == CellMark::Y);
        CHECK(matrix[0].fan_in.normalized == CellMark::Y);
        CHECK(matrix[0].fan_out.base == CellMark::N);
        CHECK(matrix[0].fan_out.normalized == CellMark::N);
        CHECK(matrix[0].fan_in.median_shift == "payment_higher");
    }
}

TEST_CASE("significance matrix: identical phases are N (N)") {
    std::vector<FileMetricsRecord> records;
    for (int i = 0; i < 6; ++i) {
        records.push_back(rec("t", Category::ATD, Phase::Introduction, "f" + std::to_string(i),
                              i, i, 50 + i));
        records.push_back(
            rec("t", Category::ATD, Phase::Payment, "f" + std::to_string(i), i, i, 50 + i));
    }
    auto matrix = report::significance_matrix(records, {}, 0.05, stats::Alternative::TwoSided);
    REQUIRE(matrix.size() == 1);
    CHECK(matrix[0].fan_in.base == CellMark::N);
    CHECK(matrix[0].fan_in.normalized == CellMark::N);
    CHECK(matrix[0].fan_out.base == CellMark::N);
    CHECK(matrix[0].fan_out.normalized == CellMark::N);
    CHECK(matrix[0].fan_in.median_shift == "equal");
}

TEST_CASE("significance matrix: folder-only items render dashes") {
    auto records = atd1_records();
    auto matrix = report::significance_matrix(records, {{"atd-3", Category::ATD}}, 0.05,
                                              stats::Alternative::TwoSided);
    REQUIRE(matrix.size() == 2);
    CHECK(matrix[1].item_id == "atd-3");
    CHECK(matrix[1].folder_only);
    CHECK(matrix[1].fan_in.base == CellMark::Dash);
    CHECK(matrix[1].fan_in.normalized == CellMark::Dash);
    CHECK(matrix[1].fan_out.base == CellMark::Dash);
}

TEST_CASE("significance matrix: cells agree with direct Mann-Whitney calls") {
    auto records = atd1_records();
    auto matrix = report::significance_matrix(records, {}, 0.05, stats::Alternative::TwoSided);
    std::vector<double> fi_i, fi_p;
    for (const auto& r : records)
        (r.phase == Phase::Introduction ? fi_i : fi_p).push_back(r.fan_in);
    auto direct = stats::mann_whitney_u(fi_i, fi_p, stats::Alternative::TwoSided);
    CHECK(*matrix[0].fan_in.p_base == doctest::Approx(*direct.p_value).epsilon(1e-12));
    CHECK((matrix[0].fan_in.base == CellMark::Y) == direct.significant_at_alpha);
}

TEST_CASE("significance matrix: items lacking a phase are skipped") {
    std::vector<FileMetricsRecord> records = {
        rec("only-intro", Category::ATD, Phase::Introduction, "a", 1, 1)};
    std::vector<std::string> skipped;
    auto matrix =
        report::significance_matrix(records, {}, 0.05, stats::Alternative::TwoSided, &skipped);
    CHECK(matrix.empty());
    REQUIRE(skipped.size() == 1);
    CHECK(skipped[0] == "only-intro");
}

TEST_CASE("change statistics: replication fixtures by category") {
    std::vector<FileMetricsRecord> records;
    auto load = [&](const std::string& file, Category cat, const std::string& item) {
        auto text = testutil::read_text(std::string(DEBTLENS_FIXTURES) + "/" + file);
        std::size_t pos = 0;
        int i = 0;
        while (pos < text.size()) {
            auto nl = text.find('\n', pos);
            if (nl == std::string::npos) nl = text.size();
            if (nl > pos) {
                int v = std::stoi(text.substr(pos, nl - pos));
                records.push_back(rec(item, cat, Phase::Introduction,
                                      "f" + std::to_string(i++) + ".java", 1, 1, 100, 5, v));
            }
            pos = nl + 1;
        }
    };
    load("changes_atd.txt", Category::ATD, "atd-agg");
    load("changes_nonatd.txt", Category::NonATD, "non-agg");

    auto rows = report::change_statistics_table(records);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].category == Category::ATD);
    CHECK(std::fabs(rows[0].stats.mean - 6.981) < 5e-4);
    CHECK(rows[0].stats.median == doctest::Approx(2.0));
    CHECK(rows[0].stats.min == 0);
    CHECK(rows[0].stats.max == 811);
    CHECK(std::fabs(rows[0].stats.sd - 20.935) < 5e-4);
    CHECK(rows[1].category == Category::NonATD);
    CHECK(std::fabs(rows[1].stats.mean - 16.115) < 5e-4);
    CHECK(rows[1].stats.median == doctest::Approx(7.0));
    CHECK(rows[1].stats.min == 1);
    CHECK(rows[1].stats.max == 532);
    CHECK(std::fabs(rows[1].stats.sd - 30.320) < 5e-4);
}

TEST_CASE("change statistics: each file counted once across phases") {
    std::vector<FileMetricsRecord> records = {
        rec("t", Category::ATD, Phase::Introduction, "a", 1, 1, 100, 5, 4),
        rec("t", Category::ATD, Phase::Payment, "a", 1, 1, 100, 5, 4),
        rec("t", Category::ATD, Phase::Payment, "b", 1, 1, 100, 5, 10), // created mid-interval
    };
    auto rows = report::change_statistics_table(records);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].stats.n == 2);
    CHECK(rows[0].stats.mean == doctest::Approx(7.0));
}

TEST_CASE("change statistics: singleton") {
    std::vector<FileMetricsRecord> records = {
        rec("t", Category::ATD, Phase::Introduction, "a", 1, 1, 100, 5, 7)};
    auto rows = report::change_statistics_table(records);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].stats.mean == 7);
    CHECK(rows[0].stats.sd == 0);
    std::vector<FileMetricsRecord> none;
    CHECK_THROWS_AS((void)report::change_statistics_table(none), EmptyCategory);
}

TEST_CASE("correlations: monotone metric tracks changes") {
    std::mt19937 rng(55);
    std::vector<FileMetricsRecord> records;
    for (int i = 0; i < 40; ++i) {
        int changes = static_cast<int>(rng() % 50);
        records.push_back(rec("t", Category::ATD, Phase::Payment, "f" + std::to_string(i),
                              changes * changes + 1, static_cast<int>(rng() % 10),
                              50 + static_cast<int>(rng() % 900), 3, changes));
    }
    auto table = report::correlation_table(records, Category::ATD);
    REQUIRE(table.rows.size() == 3);
    CHECK(table.rows[0].metric == "fan_in");
    REQUIRE(table.rows[0].correlation.has_value());
    CHECK(table.rows[0].correlation->r > 0.98);
    CHECK(table.rows[0].correlation->p_value < 0.001);
}

TEST_CASE("correlations: matches the residual oracle within 1e-9") {
    std::mt19937 rng(77);
    std::vector<FileMetricsRecord> records;
    std::vector<double> x, y, z;
    for (int i = 0; i < 50; ++i) {
        int sloc = 50 + static_cast<int>(rng() % 500);
        int changes = static_cast<int>(rng() % 30);
        int fan_in = static_cast<int>(rng() % 40);
        records.push_back(rec("t", Category::ATD, Phase::Payment, "f" + std::to_string(i), fan_in,
                              1, sloc, 2, changes));
        x.push_back(fan_in);
        y.push_back(changes);
        z.push_back(sloc);
    }
    auto table = report::correlation_table(records, Category::ATD);
    REQUIRE(table.rows[0].correlation.has_value());
    double oracle = oracles::partial_spearman_residual(x, y, z);
    CHECK(table.rows[0].correlation->r == doctest::Approx(oracle).epsilon(1e-9));
}

TEST_CASE("correlations: insufficient payment rows") {
    std::vector<FileMetricsRecord> records = {
        rec("t", Category::ATD, Phase::Payment, "a", 1, 1),
        rec("t", Category::ATD, Phase::Payment, "b", 2, 1),
        rec("t", Category::ATD, Phase::Payment, "c", 3, 1),
        rec("t", Category::ATD, Phase::Payment, "d", 4, 1),
    };
    CHECK_THROWS_AS((void)report::correlation_table(records, Category::ATD), InsufficientData);
}

TEST_CASE("plot export: zeros stay zero under log1p") {
    std::vector<FileMetricsRecord> records;
    for (int i = 0; i < 5; ++i)
        records.push_back(rec("t", Category::ATD, Phase::Introduction, "f" + std::to_string(i), 0,
                              0));
    auto series = report::plot_export(records, report::PlotTransform::Log1p);
    REQUIRE(!series.empty());
    CHECK(series[0].metric == "fan_in");
    CHECK(series[0].median == 0.0);
    for (double v : series[0].values) CHECK(v == 0.0);
}

TEST_CASE("plot export: change-count series transformed per value") {
    std::vector<FileMetricsRecord> records = {
        rec("t", Category::ATD, Phase::Introduction, "a", 0, 0, 100, 5, 0),
        rec("t", Category::ATD, Phase::Introduction, "b", 0, 0, 100, 5, 1),
        rec("t", Category::ATD, Phase::Introduction, "c", 0, 0, 100, 5, 6),
    };
    auto series = report::plot_export(records, report::PlotTransform::Log1p);
    const report::DistributionSeries* cc = nullptr;
    for (const auto& s : series)
        if (s.metric == "change_count") cc = &s;
    REQUIRE(cc != nullptr);
    REQUIRE(cc->values.size() == 3);
    CHECK(cc->values[0] == 0.0);
    CHECK(cc->values[1] == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(cc->values[2] == doctest::Approx(std::log(7.0)).epsilon(1e-12));
}

TEST_CASE("plot export: log1p preserves the order of medians") {
    auto records = atd1_records();
    auto idseries = report::plot_export(records, report::PlotTransform::Identity);
    auto logseries = report::plot_export(records, report::PlotTransform::Log1p);
    REQUIRE(idseries.size() == logseries.size());
    for (std::size_t i = 0; i < idseries.size(); ++i)
        for (std::size_t j = 0; j < idseries.size(); ++j) {
            if (idseries[i].median < idseries[j].median)
                CHECK(logseries[i].median <= logseries[j].median);
        }
}

TEST_CASE("plot export: ATD#1 log1p fan-in medians match the study") {
    auto series = report::plot_export(atd1_records(), report::PlotTransform::Log1p);
    double med_intro = -1, med_pay = -1;
    for (const auto& s : series) {
        if (s.metric == "fan_in" && s.phase == "introduction") med_intro = s.median;
        if (s.metric == "fan_in" && s.phase == "payment") med_pay = s.median;
    }
    CHECK(std::fabs(med_intro - 0.69) <= 0.005);
    CHECK(std::fabs(med_pay - 2.01) <= 0.005);
}

TEST_CASE("report bundle: byte-identical across runs and N/A for deleted files") {
    auto records = atd1_records();
    testutil::TempDir tmp("bundle");
    report::BundleOptions options;
    options.alternative = stats::Alternative::Less;
    report::write_report_bundle(tmp.path() / "one", records, options);
    report::write_report_bundle(tmp.path() / "two", records, options);

    for (const char* rel :
         {"tables/phase_comparison.json", "tables/phase_comparison.csv",
          "tables/significance_matrix.json", "tables/significance_matrix.csv",
          "tables/change_statistics.json", "tables/change_statistics.csv",
          "tables/correlations.json", "tables/correlations.csv", "tables/file_details.json",
          "tables/file_details.csv", "plots/distributions.json"}) {
        INFO(rel);
        CHECK(testutil::read_text(tmp.path() / "one" / rel) ==
              testutil::read_text(tmp.path() / "two" / rel));
    }

    auto details = testutil::read_text(tmp.path() / "one" / "tables" / "file_details.csv");
    CHECK(details.find("builder/ChoiceBuilder.java,2,4") != std::string::npos);
    CHECK(details.find("N/A") != std::string::npos);
}
