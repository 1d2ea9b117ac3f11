#pragma once

#include "debtlens/adapter.hpp"
#include "debtlens/catalog.hpp"
#include "debtlens/snapshot.hpp"

#include <string>
#include <vector>

namespace debtlens {

enum class Phase { Introduction, Payment };

// Phase labels follow the study's naming: ATD items use
// introduction/payment, Non-ATD items use initial_commit/recorded.
std::string phase_label(Phase phase, Category category);
Phase phase_from_label(const std::string& label);

// One (item, phase, file) measurement row. `path` is the file's identity
// path: its path at introduction, or its first known path for files created
// inside the interval. Rows of both phases for the same file therefore share
// the same path, which is what makes the CSV joinable per file.
struct FileMetricsRecord {
    std::string item_id;
    Category category = Category::ATD;
    Phase phase = Phase::Introduction;
    std::string path;
    int fan_in = 0;
    int fan_out = 0;
    int sloc = 0;
    int ccn = 0;
    int change_count = 0;

    bool operator==(const FileMetricsRecord&) const = default;
};

// Non-blank, non-comment physical lines, per the adapter's comment syntax.
// Throws BinaryFile for content with NUL bytes.
int count_sloc(const Snapshot& snapshot, const std::string& path,
               const LanguageAdapter& adapter);

enum class CcnAggregate { Sum, Average };

struct FileComplexity {
    std::vector<FunctionComplexity> per_function;
    int file_ccn = 0; // aggregate over functions; 0 when the file declares none
};

// Per function: ccn = 1 + decision points (if, loop headers, case labels,
// catch clauses, short-circuit operators, ternaries). Throws ParseFailure
// when the file does not scan.
FileComplexity cyclomatic_complexity(const Snapshot& snapshot, const std::string& path,
                                     const LanguageAdapter& adapter,
                                     CcnAggregate aggregate = CcnAggregate::Sum);

// Metrics CSV: item_id, category, phase, path, fan_in, fan_out, sloc, ccn,
// change_count. UTF-8, RFC-4180.
std::string write_metrics_csv(const std::vector<FileMetricsRecord>& records);
std::vector<FileMetricsRecord> read_metrics_csv(const std::string& text);
std::vector<FileMetricsRecord> read_metrics_csv_file(const std::string& path);

} // namespace debtlens
