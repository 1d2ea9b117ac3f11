#include "debtlens/snapshot.hpp"

#include "debtlens/error.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace debtlens {

bool Snapshot::contains(const std::string& path) const {
    const auto& fs = files();
    return std::binary_search(fs.begin(), fs.end(), path);
}

MemSnapshot::MemSnapshot(std::map<std::string, std::string> files, std::string id)
    : id_(std::move(id)), contents_(std::move(files)) {
    paths_.reserve(contents_.size());
    for (const auto& [p, _] : contents_) paths_.push_back(p);
}

std::string MemSnapshot::read_file(const std::string& path) const {
    auto it = contents_.find(path);
    if (it == contents_.end()) throw UnknownPath(path);
    return it->second;
}

DirSnapshot::DirSnapshot(const std::filesystem::path& root)
    : root_(root), id_("dir:" + root.string()) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(root_)) throw Error("not a directory: " + root_.string());
    for (auto it = fs::recursive_directory_iterator(root_); it != fs::recursive_directory_iterator(); ++it) {
        if (it->is_directory() && it->path().filename() == ".git") {
            it.disable_recursion_pending();
            continue;
        }
        if (!it->is_regular_file()) continue;
        paths_.push_back(fs::relative(it->path(), root_).generic_string());
    }
    std::sort(paths_.begin(), paths_.end());
}

std::string DirSnapshot::read_file(const std::string& path) const {
    if (!contains(path)) throw UnknownPath(path);
    std::ifstream in(root_ / path, std::ios::binary);
    if (!in) throw UnknownPath(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace debtlens
