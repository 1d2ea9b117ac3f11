#pragma once

#include <memory>
#include <string>
#include <vector>

namespace debtlens {

enum class RefKind { ExplicitImport, WildcardImport, SamePackageUse, QualifiedUse };

std::string to_string(RefKind k);

// One syntactic reference site. The kind is determined purely by syntax;
// resolution against the snapshot happens in depgraph.
struct RawReference {
    std::string source_file;
    RefKind kind = RefKind::SamePackageUse;
    std::string target_symbol; // dotted name; "a.b.*" for wildcard imports

    bool operator==(const RawReference&) const = default;
};

struct FunctionComplexity {
    std::string name;
    int ccn = 1;
};

// Everything one pass over a source file yields.
struct FileSyntax {
    bool parse_ok = true;
    std::string error;
    std::size_t error_pos = 0;

    std::string package;                      // empty for the default package
    std::vector<std::string> declared_types;  // relative dotted names ("Outer", "Outer.Inner")
    std::vector<RawReference> references;
    int sloc = 0;                             // non-blank, non-comment physical lines
    std::vector<FunctionComplexity> functions;
};

// Extension point per source language: which files belong to the language,
// what they declare, what they reference, and their size/complexity counts.
class LanguageAdapter {
public:
    virtual ~LanguageAdapter() = default;
    virtual std::string id() const = 0;
    virtual bool recognizes(const std::string& path) const = 0;
    virtual FileSyntax parse(const std::string& path, const std::string& content) const = 0;
};

// Java-style syntax: package/import declarations, type declarations,
// capitalized simple-name and fully-qualified uses, // and /* */ comments.
class JavaAdapter final : public LanguageAdapter {
public:
    std::string id() const override { return "java"; }
    bool recognizes(const std::string& path) const override;
    FileSyntax parse(const std::string& path, const std::string& content) const override;
};

bool looks_binary(const std::string& content);

// Throws debtlens::Error for unknown ids. Currently: "java".
const LanguageAdapter& adapter_by_id(const std::string& id);

} // namespace debtlens
