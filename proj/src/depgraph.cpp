#include "debtlens/depgraph.hpp"

#include "debtlens/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace debtlens {

namespace {

struct ParsedFile {
    std::string path;
    FileSyntax syntax;
};

// Symbol tables for resolution across one snapshot.
struct SymbolTable {
    // fully qualified type name -> declaring file
    std::unordered_map<std::string, std::string> fqn_to_file;
    // package -> simple top-level name -> declaring file
    std::unordered_map<std::string, std::unordered_map<std::string, std::string>> package_types;
};

std::string join_package(const std::string& pkg, const std::string& rel) {
    return pkg.empty() ? rel : pkg + "." + rel;
}

} // namespace

std::vector<RawReference> extract_references(const Snapshot& snapshot, const std::string& path,
                                             const LanguageAdapter& adapter) {
    std::string content = snapshot.read_file(path);
    if (looks_binary(content)) throw ParseFailure(path, 0, "binary content");
    FileSyntax syn = adapter.parse(path, content);
    if (!syn.parse_ok) throw ParseFailure(path, syn.error_pos, syn.error);
    return syn.references;
}

DependencyGraph build_graph(const Snapshot& snapshot, const LanguageAdapter& adapter,
                            GraphDiagnostics* diagnostics,
                            const std::vector<std::string>* restrict_to) {
    std::optional<std::set<std::string>> keep;
    if (restrict_to) keep.emplace(restrict_to->begin(), restrict_to->end());

    std::vector<ParsedFile> files;
    for (const auto& path : snapshot.files()) {
        if (!adapter.recognizes(path)) continue;
        if (keep && !keep->count(path)) continue;
        std::string content = snapshot.read_file(path);
        if (looks_binary(content)) {
            if (diagnostics) diagnostics->parse_failures.push_back(path);
            continue;
        }
        FileSyntax syn = adapter.parse(path, content);
        if (!syn.parse_ok) {
            if (diagnostics) diagnostics->parse_failures.push_back(path);
            continue;
        }
        files.push_back({path, std::move(syn)});
    }

    SymbolTable table;
    for (const auto& f : files) {
        for (const auto& rel : f.syntax.declared_types) {
            table.fqn_to_file.emplace(join_package(f.syntax.package, rel), f.path);
            if (rel.find('.') == std::string::npos)
                table.package_types[f.syntax.package].emplace(rel, f.path);
        }
    }

    std::set<std::pair<std::string, std::string>> edges;
    auto add_edge = [&](const std::string& from, const std::string& to) {
        if (from == to) return; // no self-loops
        edges.emplace(from, to);
    };

    for (const auto& f : files) {
        // per-file import context
        std::unordered_map<std::string, std::string> explicit_simple; // simple -> fqn
        std::vector<std::string> wildcard_pkgs;
        for (const auto& ref : f.syntax.references) {
            if (ref.kind == RefKind::ExplicitImport) {
                auto dot = ref.target_symbol.rfind('.');
                std::string simple =
                    dot == std::string::npos ? ref.target_symbol : ref.target_symbol.substr(dot + 1);
                explicit_simple.emplace(simple, ref.target_symbol);
            } else if (ref.kind == RefKind::WildcardImport) {
                std::string pkg = ref.target_symbol;
                if (pkg.size() >= 2 && pkg.compare(pkg.size() - 2, 2, ".*") == 0)
                    pkg.resize(pkg.size() - 2);
                wildcard_pkgs.push_back(pkg);
            }
        }
        std::unordered_set<std::string> own_types;
        for (const auto& rel : f.syntax.declared_types) {
            auto dot = rel.find('.');
            own_types.insert(dot == std::string::npos ? rel : rel.substr(0, dot));
        }

        // resolves a simple type name in Java order; returns declaring file
        auto resolve_simple = [&](const std::string& name) -> std::optional<std::string> {
            if (own_types.count(name)) return f.path; // self; dropped by add_edge
            if (auto it = explicit_simple.find(name); it != explicit_simple.end()) {
                if (auto hit = table.fqn_to_file.find(it->second); hit != table.fqn_to_file.end())
                    return hit->second;
                return std::nullopt; // imported from outside the snapshot
            }
            if (auto pt = table.package_types.find(f.syntax.package);
                pt != table.package_types.end()) {
                if (auto hit = pt->second.find(name); hit != pt->second.end()) return hit->second;
            }
            std::optional<std::string> found;
            for (const auto& pkg : wildcard_pkgs) {
                if (auto pt = table.package_types.find(pkg); pt != table.package_types.end())
                    if (auto hit = pt->second.find(name); hit != pt->second.end()) {
                        add_edge(f.path, hit->second);
                        found = hit->second;
                    }
            }
            return found;
        };

        for (const auto& ref : f.syntax.references) {
            switch (ref.kind) {
            case RefKind::ExplicitImport: {
                auto hit = table.fqn_to_file.find(ref.target_symbol);
                if (hit != table.fqn_to_file.end())
                    add_edge(f.path, hit->second);
                else if (diagnostics)
                    ++diagnostics->unresolved_imports;
                break;
            }
            case RefKind::WildcardImport:
                break; // resolved per use
            case RefKind::SamePackageUse: {
                if (auto file = resolve_simple(ref.target_symbol)) add_edge(f.path, *file);
                break;
            }
            case RefKind::QualifiedUse: {
                // longest dotted prefix that names a known type
                std::string sym = ref.target_symbol;
                bool hit_any = false;
                while (true) {
                    auto hit = table.fqn_to_file.find(sym);
                    if (hit != table.fqn_to_file.end()) {
                        add_edge(f.path, hit->second);
                        hit_any = true;
                        break;
                    }
                    auto dot = sym.rfind('.');
                    if (dot == std::string::npos) break;
                    sym.resize(dot);
                }
                if (!hit_any) {
                    // partially qualified (Outer.Inner, Type.CONSTANT): try the
                    // first segment as a simple name
                    auto dot = ref.target_symbol.find('.');
                    std::string head = ref.target_symbol.substr(0, dot);
                    if (!head.empty() && std::isupper(static_cast<unsigned char>(head[0])))
                        if (auto file = resolve_simple(head)) add_edge(f.path, *file);
                }
                break;
            }
            }
        }
    }

    DependencyGraph g;
    g.snapshot_id = snapshot.id();
    for (const auto& f : files) g.nodes.push_back(f.path);
    std::sort(g.nodes.begin(), g.nodes.end());
    g.edges.assign(edges.begin(), edges.end()); // std::set is already sorted
    return g;
}

std::map<std::string, FanMetrics> fan_metrics(const DependencyGraph& graph,
                                              const std::vector<std::string>& files) {
    std::map<std::string, FanMetrics> out;
    std::set<std::string> nodes(graph.nodes.begin(), graph.nodes.end());
    for (const auto& f : files) out[f] = FanMetrics{nodes.count(f) > 0, 0, 0};
    for (const auto& [from, to] : graph.edges) {
        if (auto it = out.find(from); it != out.end() && it->second.present) ++it->second.fan_out;
        if (auto it = out.find(to); it != out.end() && it->second.present) ++it->second.fan_in;
    }
    return out;
}

std::string graph_to_json(const DependencyGraph& graph) {
    nlohmann::ordered_json doc;
    doc["snapshot"] = graph.snapshot_id;
    doc["nodes"] = graph.nodes;
    auto edges = nlohmann::ordered_json::array();
    for (const auto& [from, to] : graph.edges)
        edges.push_back(nlohmann::ordered_json::array({from, to}));
    doc["edges"] = std::move(edges);
    return doc.dump(2) + "\n";
}

std::string graph_to_dot(const DependencyGraph& graph) {
    std::string out = "digraph deps {\n";
    for (const auto& n : graph.nodes) out += "  \"" + n + "\";\n";
    for (const auto& [from, to] : graph.edges)
        out += "  \"" + from + "\" -> \"" + to + "\";\n";
    out += "}\n";
    return out;
}

} // namespace debtlens
