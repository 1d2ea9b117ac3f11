#pragma once

#include "debtlens/process.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace testutil {

namespace fs = std::filesystem;

// Unique scratch directory, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag);
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

std::string read_text(const fs::path& path);
void write_text(const fs::path& path, const std::string& text);

// git helper with deterministic author/committer identity and timestamps
struct GitFixture {
    fs::path dir;
    std::int64_t t0 = 1000000000; // base timestamp, UTC seconds

    void init();
    void write(const std::string& rel, const std::string& content) const;
    void remove(const std::string& rel) const;
    void move(const std::string& from, const std::string& to) const;
    // stage everything and commit at t0 + day*86400; returns the commit hash
    std::string commit(const std::string& message, int day) const;
    std::string merge(const std::string& branch, const std::string& message, int day) const;
    void checkout_branch(const std::string& name, bool create) const;
    std::string run(const std::vector<std::string>& args) const; // raw git, returns stdout
    debtlens::proc::CommandResult git(std::vector<std::string> args, int day = 0) const;
};

// The scripted lifecycle repository: 12 commits, one rename, one deletion,
// one merge. `commits` holds the 11 first-parent mainline commits in order;
// the merged side commit is kept separately.
struct LifecycleRepo {
    GitFixture fixture;
    std::vector<std::string> commits; // mainline: c1..c5, c7, c8(merge), c9..c12
    std::string side_commit;          // c6, merged by c8
};
LifecycleRepo build_lifecycle_repo(const fs::path& dir);

// Small control repository for the Non-ATD item: 3 commits, two files.
struct ControlRepo {
    GitFixture fixture;
    std::vector<std::string> commits; // 3 entries
};
ControlRepo build_control_repo(const fs::path& dir);

// Five-commit repository: F added at c1, edited at c3 and c5 (payment);
// G churns in every other commit.
struct FiveCommitRepo {
    GitFixture fixture;
    std::vector<std::string> commits; // 5 entries
};
FiveCommitRepo build_five_commit_repo(const fs::path& dir);

// Rename repository: a/B.x added, renamed to a/C.x, then edited once.
struct RenameRepo {
    GitFixture fixture;
    std::string base, rename_commit, edit_commit;
};
RenameRepo build_rename_repo(const fs::path& dir);

// Repository with two commits sharing a 7-hex hash prefix, found by a
// birthday search over candidate commit objects.
struct CollisionRepo {
    GitFixture fixture;
    std::string prefix; // the shared 7-char prefix
    std::string hash_a, hash_b;
};
CollisionRepo build_collision_repo(const fs::path& dir);

} // namespace testutil
