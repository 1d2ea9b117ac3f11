#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "debtlens/codemetrics.hpp"
#include "debtlens/error.hpp"
#include "debtlens/snapshot.hpp"
#include "support/testutil.hpp"

#include <map>

using namespace debtlens;

namespace {

MemSnapshot snap_of(const std::string& content) {
    return MemSnapshot({{"T.java", content}});
}

const LanguageAdapter& java() { return adapter_by_id("java"); }

int sloc_of(const std::string& content) {
    auto s = snap_of(content);
    return count_sloc(s, "T.java", java());
}

FileComplexity ccn_of(const std::string& content) {
    auto s = snap_of(content);
    return cyclomatic_complexity(s, "T.java", java());
}

} // namespace

TEST_CASE("sloc: empty file counts zero") {
    CHECK(sloc_of("") == 0);
    CHECK(sloc_of("\n\n\n") == 0);
}

TEST_CASE("sloc: fixture file with blanks and comments") {
    auto text = testutil::read_text(std::string(DEBTLENS_FIXTURES) + "/metrics/Sloc.java");
    // 10 physical lines: 2 blank, 3 comment-only
    CHECK(sloc_of(text) == 5);
}

TEST_CASE("sloc: closing line of a block comment counts when code follows") {
    std::string text = "class T {\n/* one\n   two\n   three\n   four */ int x;\n}\n";
    CHECK(sloc_of(text) == 3); // class line, the '*/ int x;' line, closing brace
}

TEST_CASE("sloc: invariant under trailing whitespace and blank lines") {
    std::string base = "class T {\n    int x;\n}\n";
    std::string padded = "class T {   \n\n    int x;\t\n\n\n}\n";
    CHECK(sloc_of(base) == sloc_of(padded));
}

TEST_CASE("sloc: string literals containing comment markers still count") {
    std::string text = "class T {\n    String s = \"// not a comment\";\n}\n";
    CHECK(sloc_of(text) == 3);
}

TEST_CASE("sloc: binary content rejected") {
    MemSnapshot s({{"T.java", std::string("class\0T", 7)}});
    CHECK_THROWS_AS((void)count_sloc(s, "T.java", java()), BinaryFile);
}

TEST_CASE("ccn: straight-line function is 1") {
    auto fc = ccn_of("class T {\n    int f() {\n        return 1;\n    }\n}\n");
    REQUIRE(fc.per_function.size() == 1);
    CHECK(fc.per_function[0].name == "f");
    CHECK(fc.per_function[0].ccn == 1);
    CHECK(fc.file_ccn == 1);
}

TEST_CASE("ccn: if with short-circuit counts both") {
    auto fc = ccn_of("class T {\n    int f(int a, int b) {\n"
                     "        if (a > 0 && b > 0) { return 1; }\n        return 0;\n    }\n}\n");
    REQUIRE(fc.per_function.size() == 1);
    CHECK(fc.per_function[0].ccn == 3);
}

TEST_CASE("ccn: file value sums the functions") {
    auto fc = ccn_of("class T {\n"
                     "    int a() { return 1; }\n"
                     "    int b(int x) { if (x > 0) { return 1; } if (x > 5) { return 2; }"
                     " return 0; }\n"
                     "}\n");
    REQUIRE(fc.per_function.size() == 2);
    CHECK(fc.per_function[0].ccn == 1);
    CHECK(fc.per_function[1].ccn == 3);
    CHECK(fc.file_ccn == 4);
}

TEST_CASE("ccn: file with no functions reports 0") {
    auto fc = ccn_of("interface T {\n    int f();\n    int g(int x);\n}\n");
    CHECK(fc.per_function.empty());
    CHECK(fc.file_ccn == 0);
}

TEST_CASE("ccn: ten hand-annotated fixture functions") {
    auto text = testutil::read_text(std::string(DEBTLENS_FIXTURES) + "/metrics/Ccn.java");
    MemSnapshot s({{"Ccn.java", text}});
    auto fc = cyclomatic_complexity(s, "Ccn.java", java());
    std::map<std::string, int> expected = {
        {"one", 1}, {"two", 2}, {"three", 3}, {"four", 4},  {"five", 3},
        {"six", 4}, {"seven", 2}, {"eight", 5}, {"nine", 3}, {"ten", 7}};
    REQUIRE(fc.per_function.size() == expected.size());
    for (const auto& f : fc.per_function) {
        INFO(f.name);
        REQUIRE(expected.count(f.name) == 1);
        CHECK(f.ccn == expected[f.name]);
    }
    int sum = 0;
    for (const auto& [_, v] : expected) sum += v;
    CHECK(fc.file_ccn == sum);
}

TEST_CASE("ccn: inserting one decision point raises ccn by exactly 1") {
    std::string without = "class T {\n    int f(int x) {\n        if (x > 0) { return 1; }\n"
                          "        return 0;\n    }\n}\n";
    std::string with = "class T {\n    int f(int x) {\n        if (x > 0) { return 1; }\n"
                       "        if (x > 9) { return 2; }\n        return 0;\n    }\n}\n";
    CHECK(ccn_of(with).file_ccn == ccn_of(without).file_ccn + 1);
}

TEST_CASE("ccn: ternary counted, generics wildcard not") {
    auto tern = ccn_of("class T {\n    int f(int x) { return x > 0 ? 1 : 0; }\n}\n");
    CHECK(tern.file_ccn == 2);
    auto gen = ccn_of("class T {\n    void f(java.util.List<?> xs) { xs.size(); }\n}\n");
    CHECK(gen.file_ccn == 1);
}

TEST_CASE("ccn: unbalanced file raises ParseFailure") {
    MemSnapshot s({{"T.java", "class T {\n    int f() {\n"}});
    CHECK_THROWS_AS((void)cyclomatic_complexity(s, "T.java", java()), ParseFailure);
}

TEST_CASE("ccn: average aggregate behind the flag") {
    std::string text = "class T {\n    int a() { return 1; }\n"
                       "    int b(int x) { if (x > 0) { if (x > 1) { return 2; } } return 0; }\n"
                       "}\n"; // ccns 1 and 3
    MemSnapshot s({{"T.java", text}});
    CHECK(cyclomatic_complexity(s, "T.java", java(), CcnAggregate::Sum).file_ccn == 4);
    CHECK(cyclomatic_complexity(s, "T.java", java(), CcnAggregate::Average).file_ccn == 2);
}

TEST_CASE("metrics csv: round-trips records") {
    std::vector<FileMetricsRecord> records = {
        {"atd-1", Category::ATD, Phase::Introduction, "a/B.java", 3, 1, 120, 8, 2},
        {"atd-1", Category::ATD, Phase::Payment, "a/B.java", 5, 2, 130, 9, 2},
        {"non-1", Category::NonATD, Phase::Introduction, "x/Y.java", 0, 0, 10, 1, 4},
        {"non-1", Category::NonATD, Phase::Payment, "x/Y.java", 1, 0, 12, 1, 4},
    };
    auto text = write_metrics_csv(records);
    CHECK(read_metrics_csv(text) == records);
    // Non-ATD rows carry the study's phase naming
    CHECK(text.find("initial_commit") != std::string::npos);
    CHECK(text.find("recorded") != std::string::npos);
}

TEST_CASE("phase labels map per category") {
    CHECK(phase_label(Phase::Introduction, Category::ATD) == "introduction");
    CHECK(phase_label(Phase::Payment, Category::ATD) == "payment");
    CHECK(phase_label(Phase::Introduction, Category::NonATD) == "initial_commit");
    CHECK(phase_label(Phase::Payment, Category::NonATD) == "recorded");
    CHECK(phase_from_label("recorded") == Phase::Payment);
    CHECK_THROWS_AS((void)phase_from_label("nonsense"), Error);
}
