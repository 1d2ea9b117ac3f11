#pragma once

#include "debtlens/adapter.hpp"
#include "debtlens/catalog.hpp"
#include "debtlens/snapshot.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace debtlens {

struct CommitRef {
    std::string full_hash;   // 40 lowercase hex
    std::int64_t timestamp = 0; // committer time, UTC seconds
    std::string author;
    std::string subject;

    bool operator==(const CommitRef&) const = default;
};

enum class FateStatus { Unchanged, Modified, Renamed, Deleted };

std::string to_string(FateStatus s);
FateStatus fate_from_string(const std::string& s);

struct FileFate {
    std::string intro_path;                 // identity path (first known name)
    std::optional<std::string> payment_path; // absent iff Deleted
    FateStatus status = FateStatus::Unchanged;
    int change_count = 0;
    bool present_at_introduction = true; // false for files created inside the interval

    bool operator==(const FileFate&) const = default;
};

struct LifecycleResolution {
    std::string item_id;
    CommitRef introduction;
    CommitRef payment;
    double payment_interval_days = 0.0;
    std::vector<FileFate> affected_files; // sorted by intro_path
    bool folder_only = false;             // payment diff referenced only directories

    bool operator==(const LifecycleResolution&) const = default;
};

enum class HistoryMode { FirstParent, AllParents };
enum class IntroductionMode { Catalog, Blame };
enum class AffectedMode { PaymentDiff, UnionDiffs };

struct LifecycleOptions {
    HistoryMode history = HistoryMode::FirstParent;
    IntroductionMode introduction = IntroductionMode::Catalog;
    AffectedMode affected = AffectedMode::PaymentDiff;
    int rename_threshold_percent = 50;
    const LanguageAdapter* adapter = nullptr; // source-file isolation; defaults to java
};

// Per-file earliest line-introduction commits found by the blame-assisted
// introduction mode, for audit.
struct BlameAudit {
    std::map<std::string, CommitRef> per_file_origin;
};

class GitSnapshot; // defined below

// Read-only handle over a local clone (bare or full). All reads go through
// git plumbing commands; nothing ever mutates the working tree or refs.
class GitRepo {
public:
    explicit GitRepo(std::filesystem::path dir);

    const std::filesystem::path& dir() const { return dir_; }

    // Unique commit whose hash starts with the prefix (>= 7 hex chars).
    CommitRef resolve_commit(const std::string& hash_prefix) const;

    std::shared_ptr<GitSnapshot> snapshot(const CommitRef& commit) const;

    // Number of commits in (from, to] whose diff touches the path, following
    // renames from the path's name at `from`. from == to degenerates to the
    // singleton {to}. First-parent history by default.
    int count_changes(const std::string& path, const CommitRef& from, const CommitRef& to,
                      HistoryMode history = HistoryMode::FirstParent,
                      int rename_threshold_percent = 50) const;

    // Fate of `path` (which must exist at `from`) across (from, to].
    FileFate classify_fate(const std::string& path, const CommitRef& from, const CommitRef& to,
                           HistoryMode history = HistoryMode::FirstParent,
                           int rename_threshold_percent = 50) const;

    LifecycleResolution resolve_item_lifecycle(const DebtItem& item,
                                               const LifecycleOptions& options = {},
                                               BlameAudit* audit = nullptr) const;

private:
    struct DiffEntry {
        char status = 'M'; // A M D R C T
        std::string old_path;
        std::string new_path;
        bool gitlink = false; // submodule / directory entry
    };

    std::vector<std::string> rev_list(const CommitRef& from, const CommitRef& to,
                                      HistoryMode history) const;
    std::vector<DiffEntry> diff_of(const std::string& commit_hash, int rename_threshold) const;
    std::string blob_at(const std::string& commit_hash, const std::string& path) const;
    CommitRef commit_info(const std::string& full_hash) const;

    std::filesystem::path dir_;
};

class GitSnapshot final : public Snapshot {
public:
    GitSnapshot(std::filesystem::path repo_dir, CommitRef commit);

    const std::string& id() const override { return commit_.full_hash; }
    const std::vector<std::string>& files() const override { return paths_; }
    std::string read_file(const std::string& path) const override;

    const CommitRef& commit() const { return commit_; }

private:
    std::filesystem::path repo_dir_;
    CommitRef commit_;
    std::vector<std::string> paths_;
    std::map<std::string, std::string> blob_of_; // path -> blob hash
};

// JSON (de)serialization of the mine-stage artifact.
std::string lifecycles_to_json(const std::vector<LifecycleResolution>& resolutions);
std::vector<LifecycleResolution> lifecycles_from_json(const std::string& text);

} // namespace debtlens
