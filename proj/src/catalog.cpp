#include "debtlens/catalog.hpp"

#include "debtlens/csv.hpp"
#include "debtlens/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace debtlens {

using ordered_json = nlohmann::ordered_json;

namespace {

const std::vector<std::string> kColumns = {
    "item_id", "project",   "repo_url",     "source",         "indicator",
    "category", "issue_key", "intro_commit", "payment_commit", "notes"};

const std::set<std::string> kOptionalColumns = {"issue_key", "notes"};

std::string read_file_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void validate_item(DebtItem& item, std::size_t row) {
    if (!is_valid_commit_hash(item.intro_commit)) throw MalformedHash(row, item.intro_commit);
    if (!is_valid_commit_hash(item.payment_commit)) throw MalformedHash(row, item.payment_commit);
    // Non-ATD items carry no architecture indicator.
    if (item.category == Category::NonATD && item.indicator != Indicator::None)
        throw UnknownEnum(row, "indicator",
                          to_string(item.indicator) + " (must be None for NonATD)");
    if (item.issue_key && item.issue_key->empty()) item.issue_key.reset();
    if (item.notes && item.notes->empty()) item.notes.reset();
}

Catalog parse_csv(const std::string& text, const std::string& provenance) {
    Catalog catalog;
    catalog.provenance = provenance;
    auto rows = csv::parse(text);
    if (rows.empty()) throw MissingColumn("item_id");

    const auto& header = rows.front();
    std::vector<int> col_of(kColumns.size(), -1);
    std::vector<bool> known(header.size(), false);
    for (std::size_t k = 0; k < kColumns.size(); ++k) {
        for (std::size_t h = 0; h < header.size(); ++h) {
            if (header[h] == kColumns[k]) {
                col_of[k] = static_cast<int>(h);
                known[h] = true;
                break;
            }
        }
        if (col_of[k] < 0 && !kOptionalColumns.count(kColumns[k]))
            throw MissingColumn(kColumns[k]);
    }

    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        auto get = [&](std::size_t k) -> std::string {
            int c = col_of[k];
            if (c < 0 || static_cast<std::size_t>(c) >= row.size()) return {};
            return row[static_cast<std::size_t>(c)];
        };
        DebtItem item;
        item.item_id = get(0);
        item.project = get(1);
        item.repo_url = get(2);
        try {
            item.source = source_from_string(get(3));
        } catch (const Error&) {
            throw UnknownEnum(r, "source", get(3));
        }
        try {
            item.indicator = indicator_from_string(get(4));
        } catch (const Error&) {
            throw UnknownEnum(r, "indicator", get(4));
        }
        try {
            item.category = category_from_string(get(5));
        } catch (const Error&) {
            throw UnknownEnum(r, "category", get(5));
        }
        if (auto v = get(6); !v.empty()) item.issue_key = v;
        item.intro_commit = get(7);
        item.payment_commit = get(8);
        if (auto v = get(9); !v.empty()) item.notes = v;
        for (std::size_t h = 0; h < header.size(); ++h) {
            if (!known[h] && h < row.size()) item.extras.emplace_back(header[h], row[h]);
        }
        validate_item(item, r);
        catalog.items.push_back(std::move(item));
    }

    std::set<std::string> seen;
    for (const auto& item : catalog.items)
        if (!seen.insert(item.item_id).second) throw DuplicateItemId(item.item_id);
    return catalog;
}

Catalog parse_json(const std::string& text, const std::string& provenance) {
    Catalog catalog;
    catalog.provenance = provenance;
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw Error(std::string("catalog json: ") + e.what());
    }
    if (!doc.is_array()) throw Error("catalog json: expected a top-level array");

    std::size_t r = 0;
    for (const auto& obj : doc) {
        ++r;
        if (!obj.is_object()) throw Error("catalog json: row " + std::to_string(r) + " is not an object");
        for (const auto& col : kColumns) {
            if (kOptionalColumns.count(col)) continue;
            if (!obj.contains(col)) throw MissingColumn(col);
        }
        DebtItem item;
        auto str = [&](const char* key) { return obj.at(key).get<std::string>(); };
        item.item_id = str("item_id");
        item.project = str("project");
        item.repo_url = str("repo_url");
        try {
            item.source = source_from_string(str("source"));
        } catch (const Error&) {
            throw UnknownEnum(r, "source", str("source"));
        }
        try {
            item.indicator = indicator_from_string(str("indicator"));
        } catch (const Error&) {
            throw UnknownEnum(r, "indicator", str("indicator"));
        }
        try {
            item.category = category_from_string(str("category"));
        } catch (const Error&) {
            throw UnknownEnum(r, "category", str("category"));
        }
        if (obj.contains("issue_key") && obj["issue_key"].is_string() &&
            !obj["issue_key"].get<std::string>().empty())
            item.issue_key = obj["issue_key"].get<std::string>();
        item.intro_commit = str("intro_commit");
        item.payment_commit = str("payment_commit");
        if (obj.contains("notes") && obj["notes"].is_string() &&
            !obj["notes"].get<std::string>().empty())
            item.notes = obj["notes"].get<std::string>();
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            if (std::find(kColumns.begin(), kColumns.end(), it.key()) != kColumns.end()) continue;
            item.extras.emplace_back(it.key(),
                                     it.value().is_string() ? it.value().get<std::string>()
                                                            : it.value().dump());
        }
        validate_item(item, r);
        catalog.items.push_back(std::move(item));
    }

    std::set<std::string> seen;
    for (const auto& item : catalog.items)
        if (!seen.insert(item.item_id).second) throw DuplicateItemId(item.item_id);
    return catalog;
}

} // namespace

std::string to_string(Source s) {
    switch (s) {
    case Source::IS: return "IS";
    case Source::PS: return "PS";
    case Source::CM: return "CM";
    }
    return "?";
}

std::string to_string(Indicator i) {
    switch (i) {
    case Indicator::VioMod: return "VioMod";
    case Indicator::ObsTech: return "ObsTech";
    case Indicator::None: return "None";
    }
    return "?";
}

std::string to_string(Category c) {
    return c == Category::ATD ? "ATD" : "NonATD";
}

Source source_from_string(const std::string& s) {
    if (s == "IS") return Source::IS;
    if (s == "PS") return Source::PS;
    if (s == "CM") return Source::CM;
    throw Error("unknown source: " + s);
}

Indicator indicator_from_string(const std::string& s) {
    if (s == "VioMod") return Indicator::VioMod;
    if (s == "ObsTech") return Indicator::ObsTech;
    if (s == "None" || s.empty()) return Indicator::None;
    throw Error("unknown indicator: " + s);
}

Category category_from_string(const std::string& s) {
    if (s == "ATD") return Category::ATD;
    if (s == "NonATD") return Category::NonATD;
    throw Error("unknown category: " + s);
}

bool is_valid_commit_hash(const std::string& s) {
    if (s.size() < 7 || s.size() > 40) return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
    });
}

Catalog parse_catalog(const std::string& path, CatalogFormat format) {
    return parse_catalog_text(read_file_text(path), format, path);
}

Catalog parse_catalog_text(const std::string& text, CatalogFormat format,
                           const std::string& provenance) {
    return format == CatalogFormat::Csv ? parse_csv(text, provenance)
                                        : parse_json(text, provenance);
}

std::string serialize_catalog(const Catalog& catalog, CatalogFormat format) {
    if (format == CatalogFormat::Csv) {
        // Extra columns (union over items) are appended after the standard set.
        std::vector<std::string> extra_cols;
        for (const auto& item : catalog.items)
            for (const auto& [k, _] : item.extras)
                if (std::find(extra_cols.begin(), extra_cols.end(), k) == extra_cols.end())
                    extra_cols.push_back(k);

        std::string out;
        auto header = kColumns;
        header.insert(header.end(), extra_cols.begin(), extra_cols.end());
        out += csv::join_row(header);
        for (const auto& item : catalog.items) {
            std::vector<std::string> row = {
                item.item_id,
                item.project,
                item.repo_url,
                to_string(item.source),
                to_string(item.indicator),
                to_string(item.category),
                item.issue_key.value_or(""),
                item.intro_commit,
                item.payment_commit,
                item.notes.value_or(""),
            };
            for (const auto& col : extra_cols) {
                std::string v;
                for (const auto& [k, val] : item.extras)
                    if (k == col) v = val;
                row.push_back(v);
            }
            out += csv::join_row(row);
        }
        return out;
    }

    ordered_json arr = ordered_json::array();
    for (const auto& item : catalog.items) {
        ordered_json obj;
        obj["item_id"] = item.item_id;
        obj["project"] = item.project;
        obj["repo_url"] = item.repo_url;
        obj["source"] = to_string(item.source);
        obj["indicator"] = to_string(item.indicator);
        obj["category"] = to_string(item.category);
        if (item.issue_key) obj["issue_key"] = *item.issue_key;
        obj["intro_commit"] = item.intro_commit;
        obj["payment_commit"] = item.payment_commit;
        if (item.notes) obj["notes"] = *item.notes;
        for (const auto& [k, v] : item.extras) obj[k] = v;
        arr.push_back(std::move(obj));
    }
    return arr.dump(2) + "\n";
}

Catalog dedupe_and_filter(const Catalog& catalog, std::optional<Indicator> indicator,
                          std::optional<Category> category, std::optional<Source> source) {
    Catalog out;
    out.provenance = catalog.provenance;
    std::set<std::pair<std::string, std::string>> seen_keys;
    for (const auto& item : catalog.items) {
        if (item.category == Category::ATD && item.issue_key) {
            auto key = std::make_pair(item.project, *item.issue_key);
            if (!seen_keys.insert(key).second) continue;
        }
        if (indicator && item.indicator != *indicator) continue;
        if (category && item.category != *category) continue;
        if (source && item.source != *source) continue;
        out.items.push_back(item);
    }
    return out;
}

} // namespace debtlens
