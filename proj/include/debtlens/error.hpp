#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace debtlens {

// Base of every error the pipeline can raise. Subclasses carry the
// structured payloads callers need for diagnostics.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// --- catalog ---------------------------------------------------------------

struct MissingColumn : Error {
    explicit MissingColumn(std::string col)
        : Error("missing column: " + col), column(std::move(col)) {}
    std::string column;
};

struct MalformedHash : Error {
    MalformedHash(std::size_t r, std::string v)
        : Error("row " + std::to_string(r) + ": malformed commit hash '" + v + "'"),
          row(r), value(std::move(v)) {}
    std::size_t row;
    std::string value;
};

struct UnknownEnum : Error {
    UnknownEnum(std::size_t r, std::string f, std::string v)
        : Error("row " + std::to_string(r) + ": field '" + f + "' has unknown value '" + v + "'"),
          row(r), field(std::move(f)), value(std::move(v)) {}
    std::size_t row;
    std::string field;
    std::string value;
};

struct DuplicateItemId : Error {
    explicit DuplicateItemId(std::string id)
        : Error("duplicate item_id: " + id), item_id(std::move(id)) {}
    std::string item_id;
};

// --- gitminer ---------------------------------------------------------------

struct GitCommandFailed : Error {
    using Error::Error;
};

struct AmbiguousPrefix : Error {
    explicit AmbiguousPrefix(std::string p)
        : Error("ambiguous commit prefix: " + p), prefix(std::move(p)) {}
    std::string prefix;
};

struct UnknownCommit : Error {
    explicit UnknownCommit(std::string p)
        : Error("unknown commit: " + p), prefix(std::move(p)) {}
    std::string prefix;
};

struct IntroAfterPayment : Error {
    explicit IntroAfterPayment(std::string item)
        : Error("introduction commit is later than payment commit for item " + item) {}
};

struct EmptyDiff : Error {
    explicit EmptyDiff(std::string item)
        : Error("payment commit touches no source files for item " + item) {}
};

struct UnknownPath : Error {
    explicit UnknownPath(std::string p)
        : Error("path not found: " + p), path(std::move(p)) {}
    std::string path;
};

// --- adapters / codemetrics -------------------------------------------------

struct ParseFailure : Error {
    ParseFailure(std::string p, std::size_t pos, const std::string& what)
        : Error(p + ":" + std::to_string(pos) + ": " + what),
          path(std::move(p)), position(pos) {}
    std::string path;
    std::size_t position;
};

struct BinaryFile : Error {
    explicit BinaryFile(std::string p)
        : Error("binary file: " + p), path(std::move(p)) {}
    std::string path;
};

// --- stats -------------------------------------------------------------------

struct EmptySample : Error {
    EmptySample() : Error("empty sample") {}
};

struct SampleTooSmall : Error {
    SampleTooSmall(std::size_t got, std::size_t need)
        : Error("sample too small: n=" + std::to_string(got) +
                ", need n>=" + std::to_string(need)) {}
};

struct ZeroVariance : Error {
    ZeroVariance() : Error("sample variance is zero") {}
};

struct LengthMismatch : Error {
    LengthMismatch() : Error("samples have different lengths") {}
};

struct ConstantVariable : Error {
    explicit ConstantVariable(std::string which)
        : Error("variable is constant: " + which) {}
};

struct DegenerateControl : Error {
    DegenerateControl() : Error("control is perfectly correlated with a variable") {}
};

struct ZeroDenominator : Error {
    ZeroDenominator() : Error("percent change denominator is zero") {}
};

struct NegativeValue : Error {
    explicit NegativeValue(double v)
        : Error("negative value in non-negative series: " + std::to_string(v)) {}
};

// --- report -------------------------------------------------------------------

struct EmptyPhase : Error {
    explicit EmptyPhase(std::string phase)
        : Error("no records in phase: " + phase) {}
};

struct EmptyCategory : Error {
    explicit EmptyCategory(std::string cat)
        : Error("no records in category: " + cat) {}
};

struct InsufficientData : Error {
    InsufficientData(std::size_t got, std::size_t need)
        : Error("insufficient data: n=" + std::to_string(got) +
                ", need n>=" + std::to_string(need)) {}
};

} // namespace debtlens
