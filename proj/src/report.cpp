#include "debtlens/report.hpp"

#include "debtlens/csv.hpp"
#include "debtlens/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

namespace debtlens::report {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

double round6(double v) {
    if (!std::isfinite(v)) return v;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return std::strtod(buf, nullptr);
}

std::string format6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string to_string(CellMark m) {
    switch (m) {
    case CellMark::Y: return "Y";
    case CellMark::N: return "N";
    case CellMark::Dash: return "-";
    }
    return "?";
}

std::string to_string(PlotTransform t) {
    return t == PlotTransform::Log1p ? "log1p" : "identity";
}

namespace {

std::vector<double> column(const std::vector<FileMetricsRecord>& records, Category cat,
                           Phase phase, int FileMetricsRecord::* field) {
    std::vector<double> out;
    for (const auto& r : records)
        if (r.category == cat && r.phase == phase) out.push_back(static_cast<double>(r.*field));
    return out;
}

double mean_of(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double max_of(const std::vector<double>& xs) {
    return *std::max_element(xs.begin(), xs.end());
}

// one change count per (item, file): the introduction row when present,
// otherwise the payment row (files created inside the interval)
std::vector<double> change_sample(const std::vector<FileMetricsRecord>& records, Category cat) {
    std::map<std::pair<std::string, std::string>, double> per_file;
    for (const auto& r : records) {
        if (r.category != cat) continue;
        auto key = std::make_pair(r.item_id, r.path);
        auto it = per_file.find(key);
        if (it == per_file.end() || r.phase == Phase::Introduction)
            per_file[key] = static_cast<double>(r.change_count);
    }
    std::vector<double> out;
    out.reserve(per_file.size());
    for (const auto& [_, v] : per_file) out.push_back(v);
    return out;
}

double quantile_type7(const std::vector<double>& sorted, double p) {
    if (sorted.size() == 1) return sorted[0];
    double h = p * static_cast<double>(sorted.size() - 1);
    auto lo = static_cast<std::size_t>(std::floor(h));
    auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

} // namespace

PhaseComparison phase_comparison_table(const std::vector<FileMetricsRecord>& records,
                                       Category category,
                                       stats::PercentConvention convention) {
    auto fi_i = column(records, category, Phase::Introduction, &FileMetricsRecord::fan_in);
    auto fi_p = column(records, category, Phase::Payment, &FileMetricsRecord::fan_in);
    auto fo_i = column(records, category, Phase::Introduction, &FileMetricsRecord::fan_out);
    auto fo_p = column(records, category, Phase::Payment, &FileMetricsRecord::fan_out);
    if (fi_i.empty()) throw EmptyPhase(phase_label(Phase::Introduction, category));
    if (fi_p.empty()) throw EmptyPhase(phase_label(Phase::Payment, category));

    PhaseComparison out;
    out.category = category;
    auto add = [&](const std::string& name, double intro, double pay,
                   std::optional<double> delta) {
        MetricComparison m;
        m.metric = name;
        m.introduction = intro;
        m.payment = pay;
        m.percent_change = stats::percent_change(intro, pay, convention);
        if (delta) {
            m.cliffs_delta = *delta;
            m.magnitude = stats::to_string(stats::delta_magnitude(*delta));
        }
        out.metrics.push_back(std::move(m));
    };

    add("file_count", static_cast<double>(fi_i.size()), static_cast<double>(fi_p.size()),
        std::nullopt);
    add("fan_in_avg", mean_of(fi_i), mean_of(fi_p), stats::cliffs_delta(fi_p, fi_i).delta);
    add("fan_in_max", max_of(fi_i), max_of(fi_p), std::nullopt);
    add("fan_out_avg", mean_of(fo_i), mean_of(fo_p), stats::cliffs_delta(fo_p, fo_i).delta);
    add("fan_out_max", max_of(fo_i), max_of(fo_p), std::nullopt);
    return out;
}

std::vector<ItemSignificance> significance_matrix(
    const std::vector<FileMetricsRecord>& records,
    const std::vector<std::pair<std::string, Category>>& folder_only_items, double alpha,
    stats::Alternative alternative, std::vector<std::string>* skipped) {
    // items in first-appearance order
    std::vector<std::string> order;
    std::map<std::string, Category> cat_of;
    for (const auto& r : records) {
        if (!cat_of.count(r.item_id)) {
            order.push_back(r.item_id);
            cat_of[r.item_id] = r.category;
        }
    }

    std::vector<ItemSignificance> out;
    for (const auto& id : order) {
        std::vector<const FileMetricsRecord*> intro, pay;
        for (const auto& r : records) {
            if (r.item_id != id) continue;
            (r.phase == Phase::Introduction ? intro : pay).push_back(&r);
        }
        if (intro.empty() || pay.empty()) {
            if (skipped) skipped->push_back(id);
            continue;
        }
        auto values = [](const std::vector<const FileMetricsRecord*>& rs,
                         int FileMetricsRecord::* field) {
            std::vector<double> v;
            for (auto* r : rs) v.push_back(static_cast<double>(r->*field));
            return v;
        };
        auto normalized = [](const std::vector<const FileMetricsRecord*>& rs,
                             int FileMetricsRecord::* field) {
            std::vector<double> v;
            for (auto* r : rs)
                if (r->sloc > 0)
                    v.push_back(static_cast<double>(r->*field) / static_cast<double>(r->sloc));
            return v;
        };

        ItemSignificance item;
        item.item_id = id;
        item.category = cat_of[id];

        auto fill = [&](SignificanceCell& cell, int FileMetricsRecord::* field) {
            auto a = values(intro, field), b = values(pay, field);
            auto rep = stats::mann_whitney_u(a, b, alternative, alpha);
            cell.p_base = *rep.p_value;
            cell.base = rep.significant_at_alpha ? CellMark::Y : CellMark::N;
            auto an = normalized(intro, field), bn = normalized(pay, field);
            if (!an.empty() && !bn.empty()) {
                auto repn = stats::mann_whitney_u(an, bn, alternative, alpha);
                cell.p_normalized = *repn.p_value;
                cell.normalized = repn.significant_at_alpha ? CellMark::Y : CellMark::N;
            }
            double med_i = stats::descriptive(a).median;
            double med_p = stats::descriptive(b).median;
            cell.median_shift = med_p > med_i   ? "payment_higher"
                                : med_p < med_i ? "introduction_higher"
                                                : "equal";
        };
        fill(item.fan_in, &FileMetricsRecord::fan_in);
        fill(item.fan_out, &FileMetricsRecord::fan_out);
        item.delta_fan_in = stats::cliffs_delta(values(pay, &FileMetricsRecord::fan_in),
                                                values(intro, &FileMetricsRecord::fan_in))
                                .delta;
        item.delta_fan_out = stats::cliffs_delta(values(pay, &FileMetricsRecord::fan_out),
                                                 values(intro, &FileMetricsRecord::fan_out))
                                 .delta;
        out.push_back(std::move(item));
    }

    for (const auto& [id, cat] : folder_only_items) {
        ItemSignificance item;
        item.item_id = id;
        item.category = cat;
        item.folder_only = true; // all cells stay Dash
        out.push_back(std::move(item));
    }
    return out;
}

std::vector<ChangeStatisticsRow> change_statistics_table(
    const std::vector<FileMetricsRecord>& records) {
    if (records.empty()) throw EmptyCategory("ATD");
    std::vector<ChangeStatisticsRow> out;
    for (Category cat : {Category::ATD, Category::NonATD}) {
        auto sample = change_sample(records, cat);
        if (sample.empty()) continue;
        out.push_back({cat, stats::descriptive(sample)});
    }
    return out;
}

CorrelationTable correlation_table(const std::vector<FileMetricsRecord>& records,
                                   Category category) {
    std::vector<const FileMetricsRecord*> pay;
    for (const auto& r : records)
        if (r.category == category && r.phase == Phase::Payment) pay.push_back(&r);
    constexpr std::size_t kMinN = 5;
    if (pay.size() < kMinN) throw InsufficientData(pay.size(), kMinN);

    std::vector<double> changes, sloc;
    for (auto* r : pay) {
        changes.push_back(static_cast<double>(r->change_count));
        sloc.push_back(static_cast<double>(r->sloc));
    }

    CorrelationTable table;
    table.category = category;
    table.n = pay.size();
    for (auto [name, field] : std::initializer_list<std::pair<const char*, int FileMetricsRecord::*>>{
             {"fan_in", &FileMetricsRecord::fan_in},
             {"fan_out", &FileMetricsRecord::fan_out},
             {"ccn", &FileMetricsRecord::ccn}}) {
        CorrelationRow row;
        row.metric = name;
        std::vector<double> x;
        for (auto* r : pay) x.push_back(static_cast<double>(r->*field));
        try {
            row.correlation = stats::partial_spearman(x, changes, sloc);
        } catch (const Error& e) {
            row.note = e.what();
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::vector<DistributionSeries> plot_export(const std::vector<FileMetricsRecord>& records,
                                            PlotTransform transform) {
    if (records.empty()) return {};
    auto transformed = [&](std::vector<double> xs) {
        if (transform == PlotTransform::Log1p) xs = stats::log1p_series(xs);
        std::sort(xs.begin(), xs.end());
        return xs;
    };
    auto make = [&](Category cat, const std::string& metric, const std::string& phase,
                    std::vector<double> values) -> std::optional<DistributionSeries> {
        if (values.empty()) return std::nullopt;
        DistributionSeries s;
        s.category = cat;
        s.metric = metric;
        s.phase = phase;
        s.values = transformed(std::move(values));
        s.min = s.values.front();
        s.max = s.values.back();
        s.q1 = quantile_type7(s.values, 0.25);
        s.median = quantile_type7(s.values, 0.5);
        s.q3 = quantile_type7(s.values, 0.75);
        return s;
    };

    std::vector<DistributionSeries> out;
    for (Category cat : {Category::ATD, Category::NonATD}) {
        for (auto [name, field] :
             std::initializer_list<std::pair<const char*, int FileMetricsRecord::*>>{
                 {"fan_in", &FileMetricsRecord::fan_in}, {"fan_out", &FileMetricsRecord::fan_out}}) {
            for (Phase phase : {Phase::Introduction, Phase::Payment}) {
                if (auto s = make(cat, name, phase == Phase::Introduction ? "introduction"
                                                                          : "payment",
                                  column(records, cat, phase, field)))
                    out.push_back(std::move(*s));
            }
        }
        if (auto s = make(cat, "change_count", "interval", change_sample(records, cat)))
            out.push_back(std::move(*s));
    }
    return out;
}

std::vector<FileDetailRow> file_details(const std::vector<FileMetricsRecord>& records) {
    std::vector<std::pair<std::string, std::string>> order;
    std::map<std::pair<std::string, std::string>, FileDetailRow> rows;
    for (const auto& r : records) {
        auto key = std::make_pair(r.item_id, r.path);
        auto it = rows.find(key);
        if (it == rows.end()) {
            order.push_back(key);
            FileDetailRow row;
            row.item_id = r.item_id;
            row.category = r.category;
            row.path = r.path;
            it = rows.emplace(key, std::move(row)).first;
        }
        if (r.phase == Phase::Introduction)
            it->second.introduction = r;
        else
            it->second.payment = r;
        it->second.change_count = r.change_count;
    }
    std::vector<FileDetailRow> out;
    out.reserve(order.size());
    for (const auto& key : order) out.push_back(rows[key]);
    return out;
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

ordered_json comparison_json(const PhaseComparison& pc) {
    ordered_json cj;
    cj["category"] = to_string(pc.category);
    cj["phase_labels"] =
        ordered_json{{"introduction", phase_label(Phase::Introduction, pc.category)},
                     {"payment", phase_label(Phase::Payment, pc.category)}};
    auto metrics = ordered_json::array();
    for (const auto& m : pc.metrics) {
        ordered_json mj;
        mj["metric"] = m.metric;
        mj["introduction"] = round6(m.introduction);
        mj["payment"] = round6(m.payment);
        mj["percent_change"] = round6(m.percent_change);
        if (m.cliffs_delta) {
            mj["cliffs_delta"] = round6(*m.cliffs_delta);
            mj["magnitude"] = *m.magnitude;
        }
        metrics.push_back(std::move(mj));
    }
    cj["metrics"] = std::move(metrics);
    return cj;
}

} // namespace

void write_report_bundle(const fs::path& out_dir,
                         const std::vector<FileMetricsRecord>& records,
                         const BundleOptions& options) {
    std::set<Category> cats;
    for (const auto& r : records) cats.insert(r.category);

    // --- phase comparison -----------------------------------------------
    {
        ordered_json doc;
        doc["convention"] = stats::to_string(options.convention);
        auto arr = ordered_json::array();
        std::string csv_text = csv::join_row({"category", "metric", "introduction", "payment",
                                              "percent_change", "cliffs_delta", "magnitude"});
        for (Category cat : {Category::ATD, Category::NonATD}) {
            if (!cats.count(cat)) continue;
            auto pc = phase_comparison_table(records, cat, options.convention);
            arr.push_back(comparison_json(pc));
            for (const auto& m : pc.metrics) {
                csv_text += csv::join_row(
                    {to_string(cat), m.metric, format6(m.introduction), format6(m.payment),
                     format6(m.percent_change),
                     m.cliffs_delta ? format6(*m.cliffs_delta) : std::string(),
                     m.magnitude.value_or("")});
            }
        }
        doc["categories"] = std::move(arr);
        write_text(out_dir / "tables" / "phase_comparison.json", doc.dump(2) + "\n");
        write_text(out_dir / "tables" / "phase_comparison.csv", csv_text);
    }

    // --- significance matrix ---------------------------------------------
    {
        std::vector<std::string> skipped;
        auto matrix = significance_matrix(records, options.folder_only_items, options.alpha,
                                          options.alternative, &skipped);
        ordered_json doc;
        doc["alpha"] = round6(options.alpha);
        doc["alternative"] = stats::to_string(options.alternative);
        auto arr = ordered_json::array();
        std::string csv_text = csv::join_row(
            {"item_id", "category", "fan_in", "fan_in_normalized", "fan_out",
             "fan_out_normalized", "p_fan_in", "p_fan_in_normalized", "p_fan_out",
             "p_fan_out_normalized", "delta_fan_in", "delta_fan_out", "median_shift_fan_in",
             "median_shift_fan_out"});
        auto cell_json = [](const SignificanceCell& c) {
            ordered_json j;
            j["base"] = to_string(c.base);
            j["normalized"] = to_string(c.normalized);
            if (c.p_base) j["p_base"] = round6(*c.p_base);
            if (c.p_normalized) j["p_normalized"] = round6(*c.p_normalized);
            if (!c.median_shift.empty()) j["median_shift"] = c.median_shift;
            return j;
        };
        for (const auto& item : matrix) {
            ordered_json j;
            j["item_id"] = item.item_id;
            j["category"] = to_string(item.category);
            j["folder_only"] = item.folder_only;
            j["fan_in"] = cell_json(item.fan_in);
            j["fan_out"] = cell_json(item.fan_out);
            if (item.delta_fan_in) {
                j["cliffs_delta_fan_in"] = round6(*item.delta_fan_in);
                j["cliffs_delta_fan_in_magnitude"] =
                    stats::to_string(stats::delta_magnitude(*item.delta_fan_in));
            }
            if (item.delta_fan_out) {
                j["cliffs_delta_fan_out"] = round6(*item.delta_fan_out);
                j["cliffs_delta_fan_out_magnitude"] =
                    stats::to_string(stats::delta_magnitude(*item.delta_fan_out));
            }
            arr.push_back(std::move(j));
            csv_text += csv::join_row(
                {item.item_id, to_string(item.category), to_string(item.fan_in.base),
                 to_string(item.fan_in.normalized), to_string(item.fan_out.base),
                 to_string(item.fan_out.normalized),
                 item.fan_in.p_base ? format6(*item.fan_in.p_base) : std::string(),
                 item.fan_in.p_normalized ? format6(*item.fan_in.p_normalized) : std::string(),
                 item.fan_out.p_base ? format6(*item.fan_out.p_base) : std::string(),
                 item.fan_out.p_normalized ? format6(*item.fan_out.p_normalized) : std::string(),
                 item.delta_fan_in ? format6(*item.delta_fan_in) : std::string(),
                 item.delta_fan_out ? format6(*item.delta_fan_out) : std::string(),
                 item.fan_in.median_shift, item.fan_out.median_shift});
        }
        doc["items"] = std::move(arr);
        doc["skipped_items"] = skipped;
        write_text(out_dir / "tables" / "significance_matrix.json", doc.dump(2) + "\n");
        write_text(out_dir / "tables" / "significance_matrix.csv", csv_text);
    }

    // --- change statistics -------------------------------------------------
    {
        auto rows = change_statistics_table(records);
        ordered_json doc;
        auto arr = ordered_json::array();
        std::string csv_text =
            csv::join_row({"category", "n", "mean", "median", "min", "max", "sd"});
        for (const auto& row : rows) {
            ordered_json j;
            j["category"] = to_string(row.category);
            j["n"] = row.stats.n;
            j["mean"] = round6(row.stats.mean);
            j["median"] = round6(row.stats.median);
            j["min"] = round6(row.stats.min);
            j["max"] = round6(row.stats.max);
            j["sd"] = round6(row.stats.sd);
            arr.push_back(std::move(j));
            csv_text += csv::join_row({to_string(row.category), std::to_string(row.stats.n),
                                       format6(row.stats.mean), format6(row.stats.median),
                                       format6(row.stats.min), format6(row.stats.max),
                                       format6(row.stats.sd)});
        }
        doc["categories"] = std::move(arr);
        write_text(out_dir / "tables" / "change_statistics.json", doc.dump(2) + "\n");
        write_text(out_dir / "tables" / "change_statistics.csv", csv_text);
    }

    // --- correlations ------------------------------------------------------
    {
        ordered_json doc;
        doc["control"] = "sloc";
        auto arr = ordered_json::array();
        std::string csv_text = csv::join_row(
            {"category", "metric", "r", "ci_low", "ci_high", "p_value", "n", "note"});
        for (Category cat : {Category::ATD, Category::NonATD}) {
            if (!cats.count(cat)) continue;
            ordered_json cj;
            cj["category"] = to_string(cat);
            auto rows_json = ordered_json::array();
            try {
                auto table = correlation_table(records, cat);
                cj["n"] = table.n;
                for (const auto& row : table.rows) {
                    ordered_json rj;
                    rj["metric"] = row.metric;
                    if (row.correlation) {
                        rj["r"] = round6(row.correlation->r);
                        rj["ci95"] = ordered_json::array({round6(row.correlation->ci95.first),
                                                          round6(row.correlation->ci95.second)});
                        rj["p_value"] = round6(row.correlation->p_value);
                    } else {
                        rj["r"] = nullptr;
                        rj["note"] = row.note;
                    }
                    rows_json.push_back(std::move(rj));
                    csv_text += csv::join_row(
                        {to_string(cat), row.metric,
                         row.correlation ? format6(row.correlation->r) : std::string(),
                         row.correlation ? format6(row.correlation->ci95.first) : std::string(),
                         row.correlation ? format6(row.correlation->ci95.second) : std::string(),
                         row.correlation ? format6(row.correlation->p_value) : std::string(),
                         row.correlation ? std::to_string(row.correlation->n) : std::string(),
                         row.note});
                }
            } catch (const InsufficientData& e) {
                cj["note"] = e.what();
                csv_text += csv::join_row({to_string(cat), "", "", "", "", "", "", e.what()});
            }
            cj["rows"] = std::move(rows_json);
            arr.push_back(std::move(cj));
        }
        doc["categories"] = std::move(arr);
        write_text(out_dir / "tables" / "correlations.json", doc.dump(2) + "\n");
        write_text(out_dir / "tables" / "correlations.csv", csv_text);
    }

    // --- file details --------------------------------------------------------
    {
        auto details = file_details(records);
        ordered_json doc;
        auto arr = ordered_json::array();
        std::string csv_text = csv::join_row(
            {"item_id", "category", "path", "intro_fan_in", "intro_fan_out", "intro_sloc",
             "intro_ccn", "pay_fan_in", "pay_fan_out", "pay_sloc", "pay_ccn", "change_count"});
        auto phase_json = [](const std::optional<FileMetricsRecord>& r) -> ordered_json {
            if (!r) return nullptr;
            ordered_json j;
            j["fan_in"] = r->fan_in;
            j["fan_out"] = r->fan_out;
            j["sloc"] = r->sloc;
            j["ccn"] = r->ccn;
            return j;
        };
        for (const auto& d : details) {
            ordered_json j;
            j["item_id"] = d.item_id;
            j["category"] = to_string(d.category);
            j["path"] = d.path;
            j["introduction"] = phase_json(d.introduction);
            j["payment"] = phase_json(d.payment);
            j["change_count"] = d.change_count;
            arr.push_back(std::move(j));
            auto cell = [](const std::optional<FileMetricsRecord>& r,
                           int FileMetricsRecord::* field) {
                return r ? std::to_string((*r).*field) : std::string("N/A");
            };
            csv_text += csv::join_row(
                {d.item_id, to_string(d.category), d.path,
                 cell(d.introduction, &FileMetricsRecord::fan_in),
                 cell(d.introduction, &FileMetricsRecord::fan_out),
                 cell(d.introduction, &FileMetricsRecord::sloc),
                 cell(d.introduction, &FileMetricsRecord::ccn),
                 cell(d.payment, &FileMetricsRecord::fan_in),
                 cell(d.payment, &FileMetricsRecord::fan_out),
                 cell(d.payment, &FileMetricsRecord::sloc),
                 cell(d.payment, &FileMetricsRecord::ccn), std::to_string(d.change_count)});
        }
        doc["files"] = std::move(arr);
        write_text(out_dir / "tables" / "file_details.json", doc.dump(2) + "\n");
        write_text(out_dir / "tables" / "file_details.csv", csv_text);
    }

    // --- distributions --------------------------------------------------------
    {
        auto series = plot_export(records, options.transform);
        ordered_json doc;
        doc["transform"] = to_string(options.transform);
        auto arr = ordered_json::array();
        for (const auto& s : series) {
            ordered_json j;
            j["category"] = to_string(s.category);
            j["metric"] = s.metric;
            j["phase"] = s.phase;
            j["n"] = s.values.size();
            j["min"] = round6(s.min);
            j["q1"] = round6(s.q1);
            j["median"] = round6(s.median);
            j["q3"] = round6(s.q3);
            j["max"] = round6(s.max);
            auto vals = ordered_json::array();
            for (double v : s.values) vals.push_back(round6(v));
            j["values"] = std::move(vals);
            arr.push_back(std::move(j));
        }
        doc["series"] = std::move(arr);
        write_text(out_dir / "plots" / "distributions.json", doc.dump(2) + "\n");
    }
}

} // namespace debtlens::report
