#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace debtlens {

// Read-only view of a source tree at one point in time. Listings are always
// sorted lexicographically so that every consumer iterates in the same order.
class Snapshot {
public:
    virtual ~Snapshot() = default;

    // Identifier recorded in artifacts derived from this snapshot
    // (the full commit hash for git snapshots).
    virtual const std::string& id() const = 0;

    // All file paths, repo-relative, lexicographically sorted.
    virtual const std::vector<std::string>& files() const = 0;

    virtual std::string read_file(const std::string& path) const = 0;

    bool contains(const std::string& path) const;
};

// In-memory snapshot, mainly for tests and generated corpora.
class MemSnapshot final : public Snapshot {
public:
    explicit MemSnapshot(std::map<std::string, std::string> files, std::string id = "mem");

    const std::string& id() const override { return id_; }
    const std::vector<std::string>& files() const override { return paths_; }
    std::string read_file(const std::string& path) const override;

private:
    std::string id_;
    std::map<std::string, std::string> contents_;
    std::vector<std::string> paths_;
};

// Snapshot of a plain directory tree (skips any .git directory).
class DirSnapshot final : public Snapshot {
public:
    explicit DirSnapshot(const std::filesystem::path& root);

    const std::string& id() const override { return id_; }
    const std::vector<std::string>& files() const override { return paths_; }
    std::string read_file(const std::string& path) const override;

private:
    std::filesystem::path root_;
    std::string id_;
    std::vector<std::string> paths_;
};

} // namespace debtlens
