#include "debtlens/pipeline.hpp"

#include "debtlens/depgraph.hpp"
#include "debtlens/error.hpp"
#include "debtlens/process.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <thread>

namespace debtlens {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

HistoryMode history_from_string(const std::string& s) {
    if (s == "first_parent" || s == "first-parent") return HistoryMode::FirstParent;
    if (s == "all_parents" || s == "all-parents") return HistoryMode::AllParents;
    throw Error("unknown history mode: " + s);
}

} // namespace

RunConfig load_config_file(const std::string& path) {
    RunConfig config;
    apply_env(config);
    ordered_json doc = ordered_json::parse(read_text(path));
    auto str = [&](const char* key, std::string& target) {
        if (doc.contains(key)) target = doc[key].get<std::string>();
    };
    str("catalog", config.catalog_path);
    if (doc.contains("catalog_format"))
        config.catalog_format = doc["catalog_format"].get<std::string>() == "json"
                                    ? CatalogFormat::Json
                                    : CatalogFormat::Csv;
    str("repo_cache", config.repo_cache_dir);
    str("out", config.output_dir);
    if (doc.contains("alpha")) config.alpha = doc["alpha"].get<double>();
    if (doc.contains("percent_convention"))
        config.percent_convention =
            stats::percent_convention_from_string(doc["percent_convention"].get<std::string>());
    str("adapter", config.adapter);
    if (doc.contains("affected_only_graph"))
        config.affected_only_graph = doc["affected_only_graph"].get<bool>();
    if (doc.contains("alternative"))
        config.alternative = stats::alternative_from_string(doc["alternative"].get<std::string>());
    if (doc.contains("history_mode"))
        config.history_mode = history_from_string(doc["history_mode"].get<std::string>());
    if (doc.contains("intro_mode"))
        config.introduction_mode = doc["intro_mode"].get<std::string>() == "blame"
                                       ? IntroductionMode::Blame
                                       : IntroductionMode::Catalog;
    if (doc.contains("affected_mode"))
        config.affected_mode = doc["affected_mode"].get<std::string>() == "union"
                                   ? AffectedMode::UnionDiffs
                                   : AffectedMode::PaymentDiff;
    if (doc.contains("rename_threshold"))
        config.rename_threshold = doc["rename_threshold"].get<int>();
    if (doc.contains("jobs")) config.jobs = doc["jobs"].get<int>();
    if (doc.contains("plot_transform"))
        config.plot_transform = doc["plot_transform"].get<std::string>() == "identity"
                                    ? report::PlotTransform::Identity
                                    : report::PlotTransform::Log1p;
    if (doc.contains("ccn_aggregate"))
        config.ccn_aggregate = doc["ccn_aggregate"].get<std::string>() == "average"
                                   ? CcnAggregate::Average
                                   : CcnAggregate::Sum;
    if (doc.contains("fetch_hook")) config.fetch_hook = doc["fetch_hook"].get<std::string>();
    if (doc.contains("filter_indicator"))
        config.filter_indicator = indicator_from_string(doc["filter_indicator"].get<std::string>());
    if (doc.contains("filter_category"))
        config.filter_category = category_from_string(doc["filter_category"].get<std::string>());
    if (doc.contains("filter_source"))
        config.filter_source = source_from_string(doc["filter_source"].get<std::string>());
    return config;
}

void apply_env(RunConfig& config) {
    if (const char* cache = std::getenv("DEBTLENS_CACHE"); cache && *cache)
        config.repo_cache_dir = cache;
}

std::size_t Diagnostics::skipped() const {
    return static_cast<std::size_t>(
        std::count_if(items.begin(), items.end(),
                      [](const ItemDiagnostic& d) { return d.status == "skipped"; }));
}

std::size_t Diagnostics::folder_only() const {
    return static_cast<std::size_t>(
        std::count_if(items.begin(), items.end(),
                      [](const ItemDiagnostic& d) { return d.status == "folder_only"; }));
}

std::vector<std::pair<std::string, Category>> Diagnostics::folder_only_items() const {
    std::vector<std::pair<std::string, Category>> out;
    for (const auto& d : items)
        if (d.status == "folder_only") out.emplace_back(d.item_id, d.category);
    return out;
}

std::string diagnostics_to_json(const Diagnostics& diagnostics) {
    ordered_json arr = ordered_json::array();
    for (const auto& d : diagnostics.items) {
        ordered_json j;
        j["item_id"] = d.item_id;
        j["category"] = to_string(d.category);
        j["status"] = d.status;
        if (!d.reason.empty()) j["reason"] = d.reason;
        j["parse_failures"] = d.parse_failures;
        j["unresolved_imports"] = d.unresolved_imports;
        if (!d.blame_origins.empty()) {
            ordered_json b;
            for (const auto& [path, hash] : d.blame_origins) b[path] = hash;
            j["blame_origins"] = std::move(b);
        }
        arr.push_back(std::move(j));
    }
    ordered_json doc;
    doc["items"] = std::move(arr);
    doc["summary"] = ordered_json{{"processed", diagnostics.items.size()},
                                  {"skipped", diagnostics.skipped()},
                                  {"folder_only", diagnostics.folder_only()}};
    return doc.dump(2) + "\n";
}

Diagnostics diagnostics_from_json(const std::string& text) {
    Diagnostics out;
    ordered_json doc = ordered_json::parse(text);
    for (const auto& j : doc.at("items")) {
        ItemDiagnostic d;
        d.item_id = j.at("item_id").get<std::string>();
        d.category = category_from_string(j.value("category", "ATD"));
        d.status = j.at("status").get<std::string>();
        d.reason = j.value("reason", "");
        if (j.contains("parse_failures"))
            d.parse_failures = j["parse_failures"].get<std::vector<std::string>>();
        d.unresolved_imports = j.value("unresolved_imports", std::size_t{0});
        out.items.push_back(std::move(d));
    }
    return out;
}

fs::path resolve_repo_dir(const RunConfig& config, const DebtItem& item) {
    fs::path direct(item.repo_url);
    if (fs::is_directory(direct)) return direct;

    std::string slug = item.repo_url;
    while (!slug.empty() && slug.back() == '/') slug.pop_back();
    if (auto pos = slug.find_last_of('/'); pos != std::string::npos) slug = slug.substr(pos + 1);
    if (slug.size() > 4 && slug.compare(slug.size() - 4, 4, ".git") == 0)
        slug.resize(slug.size() - 4);
    if (slug.empty()) throw Error("cannot derive repository name from url: " + item.repo_url);

    fs::path cached = fs::path(config.repo_cache_dir) / slug;
    if (fs::is_directory(cached)) return cached;

    if (config.fetch_hook) {
        proc::CommandOptions opts;
        opts.extra_env = {"DEBTLENS_URL=" + item.repo_url, "DEBTLENS_DEST=" + cached.string()};
        proc::run({"/bin/sh", "-c", *config.fetch_hook}, opts);
        if (fs::is_directory(cached)) return cached;
    }
    throw Error("repository not cached: " + item.repo_url + " (expected at " + cached.string() +
                ")");
}

Catalog stage_ingest(const RunConfig& config) {
    return parse_catalog(config.catalog_path, config.catalog_format);
}

namespace {

// Duplicate-issue resolution: the paper keeps one item per issue ID. Catalog
// order decides until introduction commits resolve; here, with repositories
// at hand, the earliest introduction timestamp wins (ties fall back to
// catalog order).
Catalog dedupe_with_timestamps(const RunConfig& config, const Catalog& catalog) {
    std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < catalog.items.size(); ++i) {
        const auto& item = catalog.items[i];
        if (item.category == Category::ATD && item.issue_key)
            groups[{item.project, *item.issue_key}].push_back(i);
    }

    std::set<std::size_t> drop;
    for (const auto& [key, idxs] : groups) {
        if (idxs.size() < 2) continue;
        std::size_t best = idxs.front();
        std::int64_t best_ts = std::numeric_limits<std::int64_t>::max();
        bool resolved_any = false;
        for (std::size_t i : idxs) {
            try {
                GitRepo repo(resolve_repo_dir(config, catalog.items[i]));
                auto intro = repo.resolve_commit(catalog.items[i].intro_commit);
                if (!resolved_any || intro.timestamp < best_ts) {
                    best = i;
                    best_ts = intro.timestamp;
                    resolved_any = true;
                }
            } catch (const Error&) {
                // unresolvable duplicates lose to any resolvable one
            }
        }
        for (std::size_t i : idxs)
            if (i != best) drop.insert(i);
    }

    Catalog out;
    out.provenance = catalog.provenance;
    for (std::size_t i = 0; i < catalog.items.size(); ++i)
        if (!drop.count(i)) out.items.push_back(catalog.items[i]);
    return out;
}

template <typename Fn>
void parallel_for(std::size_t count, int jobs, Fn&& fn) {
    int workers = std::max(1, jobs);
    if (workers == 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    auto worker = [&] {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= count) break;
            fn(i);
        }
    };
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

} // namespace

MineResult stage_mine(const RunConfig& config, const Catalog& catalog) {
    Catalog deduped = dedupe_with_timestamps(config, catalog);
    deduped = dedupe_and_filter(deduped, config.filter_indicator, config.filter_category,
                                config.filter_source);

    MineResult result;
    std::size_t n = deduped.items.size();
    std::vector<std::optional<LifecycleResolution>> lifecycles(n);
    std::vector<ItemDiagnostic> diags(n);
    std::vector<std::optional<DebtItem>> mined(n);

    parallel_for(n, config.jobs, [&](std::size_t i) {
        const DebtItem& item = deduped.items[i];
        ItemDiagnostic d;
        d.item_id = item.item_id;
        d.category = item.category;
        try {
            GitRepo repo(resolve_repo_dir(config, item));
            LifecycleOptions options;
            options.history = config.history_mode;
            options.introduction = config.introduction_mode;
            options.affected = config.affected_mode;
            options.rename_threshold_percent = config.rename_threshold;
            const LanguageAdapter& adapter = adapter_by_id(config.adapter);
            options.adapter = &adapter;
            BlameAudit audit;
            auto resolution = repo.resolve_item_lifecycle(item, options, &audit);
            for (const auto& [path, origin] : audit.per_file_origin)
                d.blame_origins.emplace_back(path, origin.full_hash);
            d.status = resolution.folder_only ? "folder_only" : "ok";
            lifecycles[i] = std::move(resolution);
            mined[i] = item;
        } catch (const Error& e) {
            d.status = "skipped";
            d.reason = e.what();
        }
        diags[i] = std::move(d);
    });

    for (std::size_t i = 0; i < n; ++i) {
        result.diagnostics.items.push_back(std::move(diags[i]));
        if (lifecycles[i]) {
            result.lifecycles.push_back(std::move(*lifecycles[i]));
            result.mined_items.push_back(std::move(*mined[i]));
        }
    }
    return result;
}

std::vector<FileMetricsRecord> stage_measure(const RunConfig& config,
                                             const std::vector<DebtItem>& items,
                                             const std::vector<LifecycleResolution>& lifecycles,
                                             Diagnostics& diagnostics) {
    if (items.size() != lifecycles.size())
        throw Error("measure: item list and lifecycle list differ in length");
    const LanguageAdapter& adapter = adapter_by_id(config.adapter);

    std::size_t n = items.size();
    std::vector<std::vector<FileMetricsRecord>> per_item(n);
    std::vector<ItemDiagnostic> extra(n);
    std::vector<bool> failed(n, false);

    parallel_for(n, config.jobs, [&](std::size_t i) {
        const DebtItem& item = items[i];
        const LifecycleResolution& life = lifecycles[i];
        ItemDiagnostic d;
        d.item_id = item.item_id;
        d.category = item.category;
        d.status = "ok";
        if (life.folder_only) {
            extra[i] = std::move(d);
            return;
        }
        try {
            GitRepo repo(resolve_repo_dir(config, item));
            auto intro_snap = repo.snapshot(life.introduction);
            auto pay_snap = repo.snapshot(life.payment);

            std::vector<std::string> intro_paths, pay_paths;
            for (const auto& f : life.affected_files) {
                if (f.present_at_introduction) intro_paths.push_back(f.intro_path);
                if (f.payment_path) pay_paths.push_back(*f.payment_path);
            }

            GraphDiagnostics gd_intro, gd_pay;
            auto intro_graph =
                build_graph(*intro_snap, adapter, &gd_intro,
                            config.affected_only_graph ? &intro_paths : nullptr);
            auto pay_graph = build_graph(*pay_snap, adapter, &gd_pay,
                                         config.affected_only_graph ? &pay_paths : nullptr);
            for (auto& p : gd_intro.parse_failures) d.parse_failures.push_back(p);
            for (auto& p : gd_pay.parse_failures) d.parse_failures.push_back(p);
            d.unresolved_imports = gd_intro.unresolved_imports + gd_pay.unresolved_imports;

            auto intro_fans = fan_metrics(intro_graph, intro_paths);
            auto pay_fans = fan_metrics(pay_graph, pay_paths);

            for (const auto& f : life.affected_files) {
                if (f.present_at_introduction) {
                    auto fm = intro_fans.at(f.intro_path);
                    if (fm.present) {
                        try {
                            FileMetricsRecord rec;
                            rec.item_id = item.item_id;
                            rec.category = item.category;
                            rec.phase = Phase::Introduction;
                            rec.path = f.intro_path;
                            rec.fan_in = fm.fan_in;
                            rec.fan_out = fm.fan_out;
                            rec.sloc = count_sloc(*intro_snap, f.intro_path, adapter);
                            rec.ccn = cyclomatic_complexity(*intro_snap, f.intro_path, adapter,
                                                            config.ccn_aggregate)
                                          .file_ccn;
                            rec.change_count = f.change_count;
                            per_item[i].push_back(std::move(rec));
                        } catch (const Error&) {
                            d.parse_failures.push_back(f.intro_path);
                        }
                    }
                }
                if (f.payment_path) {
                    auto fm = pay_fans.at(*f.payment_path);
                    if (fm.present) {
                        try {
                            FileMetricsRecord rec;
                            rec.item_id = item.item_id;
                            rec.category = item.category;
                            rec.phase = Phase::Payment;
                            rec.path = f.intro_path; // identity path
                            rec.fan_in = fm.fan_in;
                            rec.fan_out = fm.fan_out;
                            rec.sloc = count_sloc(*pay_snap, *f.payment_path, adapter);
                            rec.ccn = cyclomatic_complexity(*pay_snap, *f.payment_path, adapter,
                                                            config.ccn_aggregate)
                                          .file_ccn;
                            rec.change_count = f.change_count;
                            per_item[i].push_back(std::move(rec));
                        } catch (const Error&) {
                            d.parse_failures.push_back(*f.payment_path);
                        }
                    }
                }
            }
        } catch (const Error& e) {
            d.status = "skipped";
            d.reason = std::string("measure: ") + e.what();
            failed[i] = true;
            per_item[i].clear();
        }
        extra[i] = std::move(d);
    });

    std::vector<FileMetricsRecord> records;
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& r : per_item[i]) records.push_back(std::move(r));
        // merge measure-stage findings into the mine-stage diagnostics entry
        for (auto& d : diagnostics.items) {
            if (d.item_id != extra[i].item_id) continue;
            for (auto& p : extra[i].parse_failures) d.parse_failures.push_back(p);
            d.unresolved_imports += extra[i].unresolved_imports;
            if (failed[i]) {
                d.status = "skipped";
                d.reason = extra[i].reason;
            }
            break;
        }
    }
    return records;
}

void stage_analyze(const RunConfig& config, const std::vector<FileMetricsRecord>& records,
                   const std::vector<std::pair<std::string, Category>>& folder_only_items) {
    report::BundleOptions options;
    options.alpha = config.alpha;
    options.convention = config.percent_convention;
    options.alternative = config.alternative;
    options.transform = config.plot_transform;
    options.folder_only_items = folder_only_items;
    report::write_report_bundle(config.output_dir, records, options);
}

int run_pipeline(const RunConfig& config) {
    try {
        Catalog catalog = stage_ingest(config);
        fs::create_directories(config.output_dir);

        MineResult mine = stage_mine(config, catalog);
        write_text(fs::path(config.output_dir) / "lifecycles.json",
                   lifecycles_to_json(mine.lifecycles));

        auto records = stage_measure(config, mine.mined_items, mine.lifecycles, mine.diagnostics);
        write_text(fs::path(config.output_dir) / "metrics.csv", write_metrics_csv(records));

        write_text(fs::path(config.output_dir) / "diagnostics.json",
                   diagnostics_to_json(mine.diagnostics));

        stage_analyze(config, records, mine.diagnostics.folder_only_items());
        return mine.diagnostics.skipped() > 0 ? 2 : 0;
    } catch (const std::exception& e) {
        std::cerr << "fatal: " << e.what() << "\n";
        return 1;
    }
}

} // namespace debtlens
