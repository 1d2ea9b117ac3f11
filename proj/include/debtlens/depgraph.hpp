#pragma once

#include "debtlens/adapter.hpp"
#include "debtlens/snapshot.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace debtlens {

// Directed file-level dependency graph of one snapshot. FAN-IN of a file is
// its in-degree, FAN-OUT its out-degree. Edges are deduplicated and never
// self-loops; nodes and edges are kept lexicographically sorted so identical
// inputs serialize byte-identically.
struct DependencyGraph {
    std::string snapshot_id;
    std::vector<std::string> nodes;
    std::vector<std::pair<std::string, std::string>> edges; // (depender, dependee)

    bool operator==(const DependencyGraph&) const = default;
};

struct GraphDiagnostics {
    std::vector<std::string> parse_failures;    // files skipped
    std::size_t unresolved_imports = 0;         // explicit imports with no in-snapshot target
};

struct FanMetrics {
    bool present = false; // file is a node of the graph
    int fan_in = 0;
    int fan_out = 0;
};

// All syntactic reference sites of one source file.
std::vector<RawReference> extract_references(const Snapshot& snapshot, const std::string& path,
                                             const LanguageAdapter& adapter);

// Builds the graph over every adapter-recognized file of the snapshot.
// References resolve in Java order: self, explicit import, same package,
// wildcard imports; only targets declared inside the snapshot produce edges.
// restrict_to, when given, induces the subgraph on that file set instead
// (the stricter affected-files-only reading).
DependencyGraph build_graph(const Snapshot& snapshot, const LanguageAdapter& adapter,
                            GraphDiagnostics* diagnostics = nullptr,
                            const std::vector<std::string>* restrict_to = nullptr);

// In/out-degrees for the requested files; files that are not graph nodes are
// reported absent rather than zero. Restriction affects reporting only.
std::map<std::string, FanMetrics> fan_metrics(const DependencyGraph& graph,
                                              const std::vector<std::string>& files);

std::string graph_to_json(const DependencyGraph& graph);
std::string graph_to_dot(const DependencyGraph& graph);

} // namespace debtlens
