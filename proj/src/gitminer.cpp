#include "debtlens/gitminer.hpp"

#include "debtlens/error.hpp"
#include "debtlens/process.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace debtlens {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

proc::CommandResult run_git(const fs::path& dir, std::vector<std::string> args,
                            bool check = true) {
    std::vector<std::string> argv = {"git", "-C", dir.string(), "-c", "core.quotepath=false"};
    argv.insert(argv.end(), std::make_move_iterator(args.begin()),
                std::make_move_iterator(args.end()));
    auto res = proc::run(argv);
    if (check && !res.ok()) {
        std::string cmd;
        for (const auto& a : argv) cmd += a + " ";
        throw GitCommandFailed("git command failed (" + std::to_string(res.exit_code) + "): " +
                               cmd + "\n" + res.err);
    }
    return res;
}

std::vector<std::string> split_nul(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '\0') {
            out.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    if (start < s.size()) out.push_back(s.substr(start));
    return out;
}

std::vector<std::string> split_lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) out.push_back(line);
    }
    return out;
}

bool is_hex_prefix(const std::string& s) {
    if (s.size() < 7 || s.size() > 40) return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
    });
}

} // namespace

std::string to_string(FateStatus s) {
    switch (s) {
    case FateStatus::Unchanged: return "unchanged";
    case FateStatus::Modified: return "modified";
    case FateStatus::Renamed: return "renamed";
    case FateStatus::Deleted: return "deleted";
    }
    return "?";
}

FateStatus fate_from_string(const std::string& s) {
    if (s == "unchanged") return FateStatus::Unchanged;
    if (s == "modified") return FateStatus::Modified;
    if (s == "renamed") return FateStatus::Renamed;
    if (s == "deleted") return FateStatus::Deleted;
    throw Error("unknown fate status: " + s);
}

GitRepo::GitRepo(fs::path dir) : dir_(std::move(dir)) {
    if (!fs::exists(dir_)) throw Error("repository path does not exist: " + dir_.string());
    auto res = run_git(dir_, {"rev-parse", "--git-dir"}, false);
    if (!res.ok()) throw Error("not a git repository: " + dir_.string());
}

CommitRef GitRepo::commit_info(const std::string& full_hash) const {
    auto res = run_git(dir_, {"show", "-s", "--format=%H%x1f%ct%x1f%an%x1f%s", full_hash});
    std::string line = res.out;
    while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.pop_back();
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == '\x1f') {
            fields.push_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    if (fields.size() < 4) throw GitCommandFailed("unexpected git show output for " + full_hash);
    CommitRef ref;
    ref.full_hash = fields[0];
    ref.timestamp = std::stoll(fields[1]);
    ref.author = fields[2];
    ref.subject = fields[3];
    return ref;
}

CommitRef GitRepo::resolve_commit(const std::string& hash_prefix) const {
    if (!is_hex_prefix(hash_prefix)) throw UnknownCommit(hash_prefix);
    auto res = run_git(dir_, {"rev-parse", "--verify", "--quiet", hash_prefix + "^{commit}"},
                       false);
    if (res.ok()) {
        std::string hash = res.out;
        while (!hash.empty() && std::isspace(static_cast<unsigned char>(hash.back())))
            hash.pop_back();
        return commit_info(hash);
    }
    auto dis = run_git(dir_, {"rev-parse", "--disambiguate=" + hash_prefix}, false);
    auto candidates = split_lines(dis.out);
    if (candidates.size() >= 2) throw AmbiguousPrefix(hash_prefix);
    throw UnknownCommit(hash_prefix);
}

std::shared_ptr<GitSnapshot> GitRepo::snapshot(const CommitRef& commit) const {
    return std::make_shared<GitSnapshot>(dir_, commit);
}

std::vector<std::string> GitRepo::rev_list(const CommitRef& from, const CommitRef& to,
                                           HistoryMode history) const {
    // (from, to]; the degenerate same-commit interval is the singleton {to}.
    if (from.full_hash == to.full_hash) return {to.full_hash};
    std::vector<std::string> args = {"rev-list", "--reverse"};
    if (history == HistoryMode::FirstParent)
        args.push_back("--first-parent");
    else
        args.push_back("--no-merges"); // full DAG; merge commits carry no own diff
    args.push_back(from.full_hash + ".." + to.full_hash);
    return split_lines(run_git(dir_, args).out);
}

std::vector<GitRepo::DiffEntry> GitRepo::diff_of(const std::string& commit_hash,
                                                 int rename_threshold) const {
    auto parents_out = run_git(dir_, {"rev-list", "--parents", "-n", "1", commit_hash}).out;
    auto parent_fields = split_lines(parents_out);
    std::vector<std::string> hashes;
    if (!parent_fields.empty()) {
        std::istringstream in(parent_fields.front());
        std::string h;
        while (in >> h) hashes.push_back(h);
    }

    std::string m = "-M" + std::to_string(rename_threshold) + "%";
    std::vector<std::string> args = {"diff-tree", "-r", "-z", m, "--no-commit-id"};
    if (hashes.size() >= 2) {
        args.push_back(hashes[1]); // first parent
        args.push_back(hashes[0]);
    } else {
        args.push_back("--root");
        args.push_back(commit_hash);
    }
    auto out = run_git(dir_, args).out;

    // raw -z format: ":oldmode newmode oldsha newsha STATUS\0path\0[path2\0]"
    std::vector<DiffEntry> entries;
    auto parts = split_nul(out);
    for (std::size_t i = 0; i < parts.size();) {
        const std::string& head = parts[i];
        if (head.empty() || head[0] != ':') {
            ++i;
            continue;
        }
        std::istringstream in(head.substr(1));
        std::string old_mode, new_mode, old_sha, new_sha, status;
        in >> old_mode >> new_mode >> old_sha >> new_sha >> status;
        DiffEntry e;
        e.status = status.empty() ? 'M' : status[0];
        e.gitlink = old_mode == "160000" || new_mode == "160000";
        if (e.status == 'R' || e.status == 'C') {
            if (i + 2 >= parts.size()) break;
            e.old_path = parts[i + 1];
            e.new_path = parts[i + 2];
            i += 3;
        } else {
            if (i + 1 >= parts.size()) break;
            e.old_path = parts[i + 1];
            e.new_path = parts[i + 1];
            i += 2;
        }
        entries.push_back(std::move(e));
    }
    return entries;
}

std::string GitRepo::blob_at(const std::string& commit_hash, const std::string& path) const {
    auto res = run_git(dir_, {"rev-parse", "--verify", "--quiet", commit_hash + ":" + path},
                       false);
    if (!res.ok()) return {};
    std::string sha = res.out;
    while (!sha.empty() && std::isspace(static_cast<unsigned char>(sha.back()))) sha.pop_back();
    return sha;
}

namespace {

struct WalkResult {
    int count = 0;
    std::string intro_path;  // name at `from` (or first known name)
    bool born = false;       // appeared inside the interval
    bool deleted = false;    // gone by `to`
};

} // namespace

int GitRepo::count_changes(const std::string& path, const CommitRef& from, const CommitRef& to,
                           HistoryMode history, int rename_threshold_percent) const {
    bool at_from = !blob_at(from.full_hash, path).empty();

    // forward walk following renames
    std::string cur = path;
    bool seen = false, gone = false;
    int count = 0;
    for (const auto& commit : rev_list(from, to, history)) {
        if (gone) break;
        for (const auto& e : diff_of(commit, rename_threshold_percent)) {
            if (e.gitlink) continue;
            if (e.status == 'R' || e.status == 'C') {
                if (e.status == 'R' && e.old_path == cur) {
                    ++count;
                    cur = e.new_path;
                    seen = true;
                    break;
                }
                if (e.new_path == cur && !at_from && !seen) { // born via rename/copy
                    ++count;
                    seen = true;
                    break;
                }
            } else if (e.new_path == cur) {
                ++count;
                seen = true;
                if (e.status == 'D') gone = true;
                break;
            }
        }
    }
    if (!at_from && !seen) throw UnknownPath(path);
    return count;
}

FileFate GitRepo::classify_fate(const std::string& path, const CommitRef& from,
                                const CommitRef& to, HistoryMode history,
                                int rename_threshold_percent) const {
    std::string from_blob = blob_at(from.full_hash, path);
    if (from_blob.empty()) throw UnknownPath(path);

    std::string cur = path;
    bool gone = false;
    int count = 0;
    for (const auto& commit : rev_list(from, to, history)) {
        if (gone) break;
        for (const auto& e : diff_of(commit, rename_threshold_percent)) {
            if (e.gitlink) continue;
            if (e.status == 'R') {
                if (e.old_path == cur) {
                    ++count;
                    cur = e.new_path;
                    break;
                }
            } else if (e.new_path == cur) {
                ++count;
                if (e.status == 'D') gone = true;
                break;
            }
        }
    }

    FileFate fate;
    fate.intro_path = path;
    fate.change_count = count;
    fate.present_at_introduction = true;
    if (gone) {
        fate.status = FateStatus::Deleted;
        return fate;
    }
    fate.payment_path = cur;
    if (cur != path) {
        fate.status = FateStatus::Renamed;
    } else {
        std::string to_blob = blob_at(to.full_hash, cur);
        fate.status = to_blob == from_blob ? FateStatus::Unchanged : FateStatus::Modified;
    }
    return fate;
}

LifecycleResolution GitRepo::resolve_item_lifecycle(const DebtItem& item,
                                                    const LifecycleOptions& options,
                                                    BlameAudit* audit) const {
    const LanguageAdapter& adapter =
        options.adapter ? *options.adapter : adapter_by_id("java");

    CommitRef payment = resolve_commit(item.payment_commit);
    CommitRef intro = resolve_commit(item.intro_commit);

    auto payment_diff = diff_of(payment.full_hash, options.rename_threshold_percent);
    if (payment_diff.empty()) throw EmptyDiff(item.item_id);

    LifecycleResolution res;
    res.item_id = item.item_id;
    res.payment = payment;

    bool all_gitlinks = std::all_of(payment_diff.begin(), payment_diff.end(),
                                    [](const DiffEntry& e) { return e.gitlink; });
    if (all_gitlinks) {
        // the diff references only directories; flagged, not failed
        res.folder_only = true;
        res.introduction = intro;
        if (intro.timestamp > payment.timestamp) throw IntroAfterPayment(item.item_id);
        res.payment_interval_days =
            static_cast<double>(payment.timestamp - intro.timestamp) / 86400.0;
        return res;
    }

    // source-file isolation: keep only adapter-recognized files
    std::vector<DiffEntry> source_entries;
    for (const auto& e : payment_diff) {
        if (e.gitlink) continue;
        const std::string& name = e.status == 'D' ? e.old_path : e.new_path;
        if (adapter.recognizes(name)) source_entries.push_back(e);
    }
    if (source_entries.empty()) throw EmptyDiff(item.item_id);

    if (options.introduction == IntroductionMode::Blame) {
        // earliest line-introduction commit across the affected files
        std::string rev = payment.full_hash + "^";
        auto has_parent = run_git(dir_, {"rev-parse", "--verify", "--quiet", rev}, false);
        bool parent_ok = has_parent.ok();
        std::optional<CommitRef> earliest;
        for (const auto& e : source_entries) {
            std::string blame_rev = parent_ok && e.status != 'A' ? rev : payment.full_hash;
            const std::string& blame_path = e.status == 'A' ? e.new_path : e.old_path;
            auto res_blame = run_git(
                dir_, {"blame", "--porcelain", blame_rev, "--", blame_path}, false);
            if (!res_blame.ok()) continue;
            std::optional<std::string> file_earliest_sha;
            std::int64_t file_earliest_ts = 0;
            std::string cur_sha;
            auto is_header = [](const std::string& line) {
                if (line.size() < 42 || line[40] != ' ') return false;
                return std::all_of(line.begin(), line.begin() + 40, [](char c) {
                    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
                });
            };
            for (const auto& line : split_lines(res_blame.out)) {
                if (is_header(line)) {
                    cur_sha = line.substr(0, 40);
                } else if (line.rfind("committer-time ", 0) == 0) {
                    std::int64_t ts = std::stoll(line.substr(15));
                    if (!file_earliest_sha || ts < file_earliest_ts) {
                        file_earliest_sha = cur_sha;
                        file_earliest_ts = ts;
                    }
                }
            }
            if (file_earliest_sha) {
                CommitRef origin = commit_info(*file_earliest_sha);
                if (audit) audit->per_file_origin[blame_path] = origin;
                if (!earliest || origin.timestamp < earliest->timestamp) earliest = origin;
            }
        }
        if (earliest) intro = *earliest;
    }

    if (intro.timestamp > payment.timestamp) throw IntroAfterPayment(item.item_id);
    res.introduction = intro;
    res.payment_interval_days =
        static_cast<double>(payment.timestamp - intro.timestamp) / 86400.0;

    bool degenerate = intro.full_hash == payment.full_hash;
    auto commits = rev_list(intro, payment, options.history);
    std::vector<std::vector<DiffEntry>> diffs;
    diffs.reserve(commits.size());
    for (const auto& c : commits) diffs.push_back(diff_of(c, options.rename_threshold_percent));

    std::vector<FileFate> affected;
    for (const auto& entry : source_entries) {
        FileFate fate;
        if (degenerate) {
            fate.intro_path = entry.status == 'D' ? entry.old_path : entry.new_path;
            fate.change_count = 1;
            if (entry.status == 'D') {
                fate.status = FateStatus::Deleted;
                fate.present_at_introduction = false;
            } else {
                fate.status = FateStatus::Modified;
                fate.payment_path = entry.new_path;
                fate.present_at_introduction = true;
            }
            affected.push_back(std::move(fate));
            continue;
        }

        // walk backwards from the payment commit, tracking renames
        std::string cur = entry.status == 'D' ? entry.old_path : entry.new_path;
        bool born = false;
        int count = 0;
        for (std::size_t k = diffs.size(); k-- > 0 && !born;) {
            bool is_payment = k + 1 == diffs.size();
            for (const auto& e : diffs[k]) {
                if (e.gitlink) continue;
                if (e.status == 'R') {
                    if (e.new_path == cur) {
                        ++count;
                        cur = e.old_path;
                        break;
                    }
                } else if (e.status == 'C') {
                    if (e.new_path == cur) {
                        ++count;
                        born = true;
                        break;
                    }
                } else if (e.status == 'D') {
                    if (is_payment && e.old_path == cur) {
                        ++count;
                        break;
                    }
                } else if (e.new_path == cur) {
                    ++count;
                    if (e.status == 'A') born = true;
                    break;
                }
            }
        }

        fate.intro_path = cur;
        fate.change_count = count;
        fate.present_at_introduction = !born;
        if (entry.status == 'D') {
            fate.status = FateStatus::Deleted;
        } else {
            fate.payment_path = entry.new_path;
            if (fate.intro_path != *fate.payment_path) {
                fate.status = FateStatus::Renamed;
            } else if (born) {
                fate.status = FateStatus::Modified;
            } else {
                std::string a = blob_at(intro.full_hash, fate.intro_path);
                std::string b = blob_at(payment.full_hash, *fate.payment_path);
                fate.status = (a == b && !a.empty()) ? FateStatus::Unchanged : FateStatus::Modified;
            }
        }
        affected.push_back(std::move(fate));
    }

    if (options.affected == AffectedMode::UnionDiffs && !degenerate) {
        auto intro_diff = diff_of(intro.full_hash, options.rename_threshold_percent);
        std::set<std::string> have;
        for (const auto& f : affected) have.insert(f.intro_path);
        for (const auto& e : intro_diff) {
            if (e.gitlink || e.status == 'D') continue;
            if (!adapter.recognizes(e.new_path)) continue;
            if (have.count(e.new_path)) continue;
            affected.push_back(classify_fate(e.new_path, intro, payment, options.history,
                                             options.rename_threshold_percent));
            have.insert(e.new_path);
        }
    }

    std::sort(affected.begin(), affected.end(),
              [](const FileFate& a, const FileFate& b) { return a.intro_path < b.intro_path; });
    affected.erase(std::unique(affected.begin(), affected.end(),
                               [](const FileFate& a, const FileFate& b) {
                                   return a.intro_path == b.intro_path;
                               }),
                   affected.end());
    res.affected_files = std::move(affected);
    return res;
}

GitSnapshot::GitSnapshot(fs::path repo_dir, CommitRef commit)
    : repo_dir_(std::move(repo_dir)), commit_(std::move(commit)) {
    auto out = run_git(repo_dir_, {"ls-tree", "-r", "-z", commit_.full_hash}).out;
    for (const auto& rec : split_nul(out)) {
        // "<mode> <type> <sha>\t<path>"
        auto tab = rec.find('\t');
        if (tab == std::string::npos) continue;
        std::istringstream in(rec.substr(0, tab));
        std::string mode, type, sha;
        in >> mode >> type >> sha;
        if (type != "blob" || mode == "120000") continue; // skip gitlinks and symlinks
        std::string path = rec.substr(tab + 1);
        blob_of_.emplace(path, sha);
    }
    paths_.reserve(blob_of_.size());
    for (const auto& [p, _] : blob_of_) paths_.push_back(p);
    // std::map iteration is already lexicographic
}

std::string GitSnapshot::read_file(const std::string& path) const {
    auto it = blob_of_.find(path);
    if (it == blob_of_.end()) throw UnknownPath(path);
    return run_git(repo_dir_, {"cat-file", "blob", it->second}).out;
}

std::string lifecycles_to_json(const std::vector<LifecycleResolution>& resolutions) {
    ordered_json items = ordered_json::array();
    auto commit_json = [](const CommitRef& c) {
        ordered_json j;
        j["hash"] = c.full_hash;
        j["timestamp"] = c.timestamp;
        j["author"] = c.author;
        j["subject"] = c.subject;
        return j;
    };
    for (const auto& r : resolutions) {
        ordered_json j;
        j["item_id"] = r.item_id;
        j["introduction"] = commit_json(r.introduction);
        j["payment"] = commit_json(r.payment);
        j["payment_interval_days"] = r.payment_interval_days;
        j["folder_only"] = r.folder_only;
        ordered_json files = ordered_json::array();
        for (const auto& f : r.affected_files) {
            ordered_json fj;
            fj["intro_path"] = f.intro_path;
            if (f.payment_path)
                fj["payment_path"] = *f.payment_path;
            else
                fj["payment_path"] = nullptr;
            fj["status"] = to_string(f.status);
            fj["change_count"] = f.change_count;
            fj["present_at_introduction"] = f.present_at_introduction;
            files.push_back(std::move(fj));
        }
        j["affected_files"] = std::move(files);
        items.push_back(std::move(j));
    }
    ordered_json doc;
    doc["items"] = std::move(items);
    return doc.dump(2) + "\n";
}

std::vector<LifecycleResolution> lifecycles_from_json(const std::string& text) {
    ordered_json doc = ordered_json::parse(text);
    std::vector<LifecycleResolution> out;
    auto commit_from = [](const ordered_json& j) {
        CommitRef c;
        c.full_hash = j.at("hash").get<std::string>();
        c.timestamp = j.at("timestamp").get<std::int64_t>();
        c.author = j.at("author").get<std::string>();
        c.subject = j.at("subject").get<std::string>();
        return c;
    };
    for (const auto& j : doc.at("items")) {
        LifecycleResolution r;
        r.item_id = j.at("item_id").get<std::string>();
        r.introduction = commit_from(j.at("introduction"));
        r.payment = commit_from(j.at("payment"));
        r.payment_interval_days = j.at("payment_interval_days").get<double>();
        r.folder_only = j.value("folder_only", false);
        for (const auto& fj : j.at("affected_files")) {
            FileFate f;
            f.intro_path = fj.at("intro_path").get<std::string>();
            if (!fj.at("payment_path").is_null())
                f.payment_path = fj.at("payment_path").get<std::string>();
            f.status = fate_from_string(fj.at("status").get<std::string>());
            f.change_count = fj.at("change_count").get<int>();
            f.present_at_introduction = fj.value("present_at_introduction", true);
            r.affected_files.push_back(std::move(f));
        }
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace debtlens
