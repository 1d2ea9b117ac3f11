#include "debtlens/codemetrics.hpp"

#include "debtlens/csv.hpp"
#include "debtlens/error.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace debtlens {

std::string phase_label(Phase phase, Category category) {
    if (category == Category::ATD)
        return phase == Phase::Introduction ? "introduction" : "payment";
    return phase == Phase::Introduction ? "initial_commit" : "recorded";
}

Phase phase_from_label(const std::string& label) {
    if (label == "introduction" || label == "initial_commit") return Phase::Introduction;
    if (label == "payment" || label == "recorded") return Phase::Payment;
    throw Error("unknown phase label: " + label);
}

int count_sloc(const Snapshot& snapshot, const std::string& path,
               const LanguageAdapter& adapter) {
    std::string content = snapshot.read_file(path);
    if (looks_binary(content)) throw BinaryFile(path);
    return adapter.parse(path, content).sloc;
}

FileComplexity cyclomatic_complexity(const Snapshot& snapshot, const std::string& path,
                                     const LanguageAdapter& adapter, CcnAggregate aggregate) {
    std::string content = snapshot.read_file(path);
    if (looks_binary(content)) throw BinaryFile(path);
    FileSyntax syn = adapter.parse(path, content);
    if (!syn.parse_ok) throw ParseFailure(path, syn.error_pos, syn.error);

    FileComplexity out;
    out.per_function = syn.functions;
    if (syn.functions.empty()) {
        out.file_ccn = 0;
        return out;
    }
    long sum = 0;
    for (const auto& f : syn.functions) sum += f.ccn;
    if (aggregate == CcnAggregate::Sum)
        out.file_ccn = static_cast<int>(sum);
    else
        out.file_ccn = static_cast<int>(
            std::llround(static_cast<double>(sum) / static_cast<double>(syn.functions.size())));
    return out;
}

std::string write_metrics_csv(const std::vector<FileMetricsRecord>& records) {
    std::string out = csv::join_row({"item_id", "category", "phase", "path", "fan_in", "fan_out",
                                     "sloc", "ccn", "change_count"});
    for (const auto& r : records) {
        out += csv::join_row({r.item_id, to_string(r.category), phase_label(r.phase, r.category),
                              r.path, std::to_string(r.fan_in), std::to_string(r.fan_out),
                              std::to_string(r.sloc), std::to_string(r.ccn),
                              std::to_string(r.change_count)});
    }
    return out;
}

std::vector<FileMetricsRecord> read_metrics_csv(const std::string& text) {
    auto rows = csv::parse(text);
    if (rows.empty()) throw MissingColumn("item_id");
    const std::vector<std::string> expect = {"item_id", "category", "phase",
                                             "path",    "fan_in",   "fan_out",
                                             "sloc",    "ccn",      "change_count"};
    const auto& header = rows.front();
    std::vector<int> col(expect.size(), -1);
    for (std::size_t k = 0; k < expect.size(); ++k) {
        for (std::size_t h = 0; h < header.size(); ++h)
            if (header[h] == expect[k]) {
                col[k] = static_cast<int>(h);
                break;
            }
        if (col[k] < 0) throw MissingColumn(expect[k]);
    }
    std::vector<FileMetricsRecord> records;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        auto get = [&](std::size_t k) -> const std::string& {
            static const std::string empty;
            auto c = static_cast<std::size_t>(col[k]);
            return c < row.size() ? row[c] : empty;
        };
        auto geti = [&](std::size_t k) {
            try {
                return std::stoi(get(k));
            } catch (const std::exception&) {
                throw Error("metrics csv row " + std::to_string(r) + ": bad integer in column " +
                            expect[k]);
            }
        };
        FileMetricsRecord rec;
        rec.item_id = get(0);
        rec.category = category_from_string(get(1));
        rec.phase = phase_from_label(get(2));
        rec.path = get(3);
        rec.fan_in = geti(4);
        rec.fan_out = geti(5);
        rec.sloc = geti(6);
        rec.ccn = geti(7);
        rec.change_count = geti(8);
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<FileMetricsRecord> read_metrics_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open metrics csv: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return read_metrics_csv(ss.str());
}

} // namespace debtlens
