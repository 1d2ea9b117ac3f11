#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace debtlens {

enum class Source { IS, PS, CM };
enum class Indicator { VioMod, ObsTech, None };
enum class Category { ATD, NonATD };

std::string to_string(Source s);
std::string to_string(Indicator i);
std::string to_string(Category c);
Source source_from_string(const std::string& s);
Indicator indicator_from_string(const std::string& s);
Category category_from_string(const std::string& s);

// One catalog row: a debt (or control) item with its lifecycle commit hashes.
// Hashes may be abbreviated (7..40 lowercase hex); gitminer resolves them.
struct DebtItem {
    std::string item_id;
    std::string project;
    std::string repo_url;
    Source source = Source::IS;
    Indicator indicator = Indicator::None;
    Category category = Category::ATD;
    std::optional<std::string> issue_key;
    std::string intro_commit;
    std::string payment_commit;
    std::optional<std::string> notes;
    // Unknown input columns, preserved for round-tripping; ignored by the pipeline.
    std::vector<std::pair<std::string, std::string>> extras;

    bool operator==(const DebtItem&) const = default;
};

struct Catalog {
    std::vector<DebtItem> items;
    std::string provenance;

    bool operator==(const Catalog& o) const { return items == o.items; }
};

enum class CatalogFormat { Csv, Json };

bool is_valid_commit_hash(const std::string& s);

// Parses a catalog file. Column set:
//   item_id, project, repo_url, source, indicator, category, issue_key,
//   intro_commit, payment_commit, notes
// issue_key and notes may be omitted; unknown columns are kept in extras.
Catalog parse_catalog(const std::string& path, CatalogFormat format);
Catalog parse_catalog_text(const std::string& text, CatalogFormat format,
                           const std::string& provenance = "<memory>");

std::string serialize_catalog(const Catalog& catalog, CatalogFormat format);

// Collapses ATD items sharing (project, issue_key) to the first in catalog
// order (items without an issue_key are never merged), then applies the
// optional equality filters. Idempotent; never grows the catalog.
Catalog dedupe_and_filter(const Catalog& catalog,
                          std::optional<Indicator> indicator = std::nullopt,
                          std::optional<Category> category = std::nullopt,
                          std::optional<Source> source = std::nullopt);

} // namespace debtlens
