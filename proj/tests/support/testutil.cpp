#include "testutil.hpp"

#include "debtlens/error.hpp"

#include <openssl/sha.h>

extern "C" {
#include <unistd.h>
}

#include <atomic>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace testutil {

using debtlens::proc::CommandOptions;
using debtlens::proc::CommandResult;

TempDir::TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("debtlens-" + tag + "-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter.fetch_add(1)));
    fs::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw debtlens::Error("testutil: cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
}

CommandResult GitFixture::git(std::vector<std::string> args, int day) const {
    std::vector<std::string> argv = {"git", "-C", dir.string()};
    argv.insert(argv.end(), args.begin(), args.end());
    CommandOptions opts;
    std::string when = "@" + std::to_string(t0 + static_cast<std::int64_t>(day) * 86400) + " +0000";
    opts.extra_env = {
        "GIT_AUTHOR_NAME=Fixture",        "GIT_AUTHOR_EMAIL=fixture@example.com",
        "GIT_COMMITTER_NAME=Fixture",     "GIT_COMMITTER_EMAIL=fixture@example.com",
        "GIT_AUTHOR_DATE=" + when,        "GIT_COMMITTER_DATE=" + when,
        "GIT_CONFIG_NOSYSTEM=1",
    };
    auto res = debtlens::proc::run(argv, opts);
    if (!res.ok())
        throw debtlens::Error("fixture git failed: " + args.front() + "\n" + res.err);
    return res;
}

void GitFixture::init() {
    fs::create_directories(dir);
    git({"init", "-q", "-b", "main"});
    git({"config", "commit.gpgsign", "false"});
}

void GitFixture::write(const std::string& rel, const std::string& content) const {
    write_text(dir / rel, content);
}

void GitFixture::remove(const std::string& rel) const {
    git({"rm", "-q", rel});
}

void GitFixture::move(const std::string& from, const std::string& to) const {
    fs::create_directories((dir / to).parent_path());
    git({"mv", from, to});
}

std::string GitFixture::commit(const std::string& message, int day) const {
    git({"add", "-A"}, day);
    git({"commit", "-q", "--allow-empty", "-m", message}, day);
    auto out = git({"rev-parse", "HEAD"}).out;
    while (!out.empty() && (out.back() == '\n' || out.back() == '\r')) out.pop_back();
    return out;
}

std::string GitFixture::merge(const std::string& branch, const std::string& message,
                              int day) const {
    git({"merge", "-q", "--no-ff", "-m", message, branch}, day);
    auto out = git({"rev-parse", "HEAD"}).out;
    while (!out.empty() && (out.back() == '\n' || out.back() == '\r')) out.pop_back();
    return out;
}

void GitFixture::checkout_branch(const std::string& name, bool create) const {
    if (create)
        git({"checkout", "-q", "-b", name});
    else
        git({"checkout", "-q", name});
}

std::string GitFixture::run(const std::vector<std::string>& args) const {
    return git(args).out;
}

namespace {

const char* kAlphaV1 = R"(package a;

public class Alpha {
    private Beta beta = new Beta();

    public int run(int x) {
        if (x > 0 && x < 10) {
            return beta.size();
        }
        return 0;
    }
}
)";

const char* kAlphaV2 = R"(package a;

public class Alpha {
    private Beta beta = new Beta();

    public int run(int x) {
        if (x > 0 && x < 10) {
            return beta.size();
        }
        return 0;
    }

    public int id() {
        return 7;
    }
}
)";

const char* kAlphaV3 = R"(package a;

public class Alpha {
    private Beta beta = new Beta();

    public int run(int x) {
        if (x > 0 && x < 10) {
            return beta.size();
        }
        return 0;
    }

    public int id() {
        return 7;
    }
    // tuned in the side branch
}
)";

const char* kAlphaV4 = R"(package a;

import u.Helper;

public class Alpha {
    private Beta beta = new Beta();

    public int run(int x) {
        if (x > 0 && x < 10) {
            return Helper.tag("run").length() + beta.size();
        }
        return 0;
    }

    public int id() {
        return 7;
    }
    // tuned in the side branch
}
)";

const char* kBetaV1 = R"(package a;

public class Beta {
    public int size() {
        return 1;
    }
}
)";

const char* kBetaV2 = R"(package a;

public class Beta {
    public int size() {
        return 1;
    }

    public int grow(int n) {
        return n + 1;
    }
}
)";

const char* kBetaV3 = R"(package a;

public class Beta {
    public int size() {
        return 1;
    }

    public int grow(int n) {
        return n + 1;
    }

    public int shrink(int n) {
        return n - 1;
    }
}
)";

const char* kBetaV4 = R"(package a;

public class Beta {
    public int size() {
        return 1;
    }

    public int grow(int n) {
        return n + 2;
    }

    public int shrink(int n) {
        return n - 1;
    }
}
)";

const char* kHelperV1 = R"(package u;

public class Helper {
    public static String tag(String s) {
        return "[" + s + "]";
    }
}
)";

const char* kHelperV2 = R"(package u;

public class Helper {
    public static String tag(String s) {
        return "[" + s + "]";
    }

    public static String pad(String s) {
        return " " + s;
    }
}
)";

const char* kHelperV3 = R"(package u;

public class Helper {
    public static String tag(String s) {
        return "<" + s + ">";
    }

    public static String pad(String s) {
        return " " + s;
    }
}
)";

const char* kGammaV1 = R"(package a;

import u.Helper;

public class Gamma {
    public String label() {
        return Helper.tag("gamma");
    }
}
)";

const char* kGammaV2 = R"(package a;

import u.Helper;

public class Gamma {
    public String label() {
        return Helper.tag("gamma");
    }

    public String other() {
        return Helper.tag("other");
    }
}
)";

} // namespace

LifecycleRepo build_lifecycle_repo(const fs::path& dir) {
    LifecycleRepo repo;
    repo.fixture.dir = dir;
    GitFixture& g = repo.fixture;
    auto& c = repo.commits;
    g.init();

    g.write("a/Alpha.java", kAlphaV1);
    g.write("a/Beta.java", kBetaV1);
    g.write("readme.md", "fixture project\n");
    c.push_back(g.commit("c1 initial", 0));

    g.write("a/Alpha.java", kAlphaV2);
    c.push_back(g.commit("c2 alpha id method", 1));

    g.write("u/Helper.java", kHelperV1);
    c.push_back(g.commit("c3 add helper", 2));

    g.write("a/Beta.java", kBetaV2);
    c.push_back(g.commit("c4 beta grow", 3));

    g.move("a/Beta.java", "core/Beta.java");
    c.push_back(g.commit("c5 move beta", 4));

    g.checkout_branch("side", true);
    g.write("a/Alpha.java", kAlphaV3);
    repo.side_commit = g.commit("c6 side alpha tweak", 5);

    g.checkout_branch("main", false);
    g.write("u/Helper.java", kHelperV2);
    c.push_back(g.commit("c7 helper pad", 6));

    c.push_back(g.merge("side", "c8 merge side", 7));

    g.write("a/Gamma.java", kGammaV1);
    c.push_back(g.commit("c9 add gamma", 8));

    g.write("a/Gamma.java", kGammaV2);
    c.push_back(g.commit("c10 gamma other", 9));

    g.write("core/Beta.java", kBetaV3);
    g.write("readme.md", "fixture project\nnotes\n");
    c.push_back(g.commit("c11 beta shrink", 10));

    g.write("a/Alpha.java", kAlphaV4);
    g.write("core/Beta.java", kBetaV4);
    g.write("u/Helper.java", kHelperV3);
    g.remove("a/Gamma.java");
    g.write("readme.md", "fixture project\nnotes\nmore\n");
    c.push_back(g.commit("c12 payment", 11));
    return repo;
}

ControlRepo build_control_repo(const fs::path& dir) {
    ControlRepo repo;
    repo.fixture.dir = dir;
    GitFixture& g = repo.fixture;
    g.init();

    g.write("x/One.java", R"(package x;

public class One {
    private Two two = new Two();

    public int value() {
        return two.base();
    }
}
)");
    g.write("x/Two.java", R"(package x;

public class Two {
    public int base() {
        return 5;
    }
}
)");
    repo.commits.push_back(g.commit("d1 initial", 0));

    g.write("x/One.java", R"(package x;

public class One {
    private Two two = new Two();

    public int value() {
        return two.base();
    }

    public int inc(int n) {
        return n + 1;
    }
}
)");
    repo.commits.push_back(g.commit("d2 one inc", 1));

    g.write("x/One.java", R"(package x;

public class One {
    private Two two = new Two();

    public int value() {
        return two.base();
    }

    public int inc(int n) {
        return n + 2;
    }
}
)");
    g.write("x/Two.java", R"(package x;

public class Two {
    public int base() {
        return 5;
    }

    public int raw() {
        return 1;
    }
}
)");
    repo.commits.push_back(g.commit("d3 recorded", 2));
    return repo;
}

FiveCommitRepo build_five_commit_repo(const fs::path& dir) {
    FiveCommitRepo repo;
    repo.fixture.dir = dir;
    GitFixture& g = repo.fixture;
    g.init();

    g.write("F.java", "package f;\n\npublic class F {\n}\n");
    g.write("G.java", "package f;\n\npublic class G {\n}\n");
    repo.commits.push_back(g.commit("c1", 0));
    g.write("G.java", "package f;\n\npublic class G {\n    int a;\n}\n");
    repo.commits.push_back(g.commit("c2", 1));
    g.write("F.java", "package f;\n\npublic class F {\n    int b;\n}\n");
    repo.commits.push_back(g.commit("c3", 2));
    g.write("G.java", "package f;\n\npublic class G {\n    int a;\n    int c;\n}\n");
    repo.commits.push_back(g.commit("c4", 3));
    g.write("F.java", "package f;\n\npublic class F {\n    int b;\n    int d;\n}\n");
    g.write("G.java", "package f;\n\npublic class G {\n    int a;\n    int c;\n    int e;\n}\n");
    repo.commits.push_back(g.commit("c5 payment", 4));
    return repo;
}

RenameRepo build_rename_repo(const fs::path& dir) {
    RenameRepo repo;
    repo.fixture.dir = dir;
    GitFixture& g = repo.fixture;
    g.init();

    g.write("a/B.x", "line one\nline two\nline three\nline four\n");
    g.write("a/keep.x", "constant\n");
    repo.base = g.commit("base", 0);
    g.move("a/B.x", "a/C.x");
    repo.rename_commit = g.commit("rename b to c", 1);
    g.write("a/C.x", "line one\nline two\nline three\nline four\nline five\n");
    repo.edit_commit = g.commit("edit c", 2);
    return repo;
}

namespace {

std::string sha1_hex(const std::string& data) {
    unsigned char digest[SHA_DIGEST_LENGTH];
    SHA1(reinterpret_cast<const unsigned char*>(data.data()), data.size(), digest);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(40);
    for (unsigned char b : digest) {
        out += hex[b >> 4];
        out += hex[b & 0xf];
    }
    return out;
}

} // namespace

CollisionRepo build_collision_repo(const fs::path& dir) {
    CollisionRepo repo;
    repo.fixture.dir = dir;
    GitFixture& g = repo.fixture;
    g.init();
    g.write("seed.txt", "collision fixture\n");
    std::string base = g.commit("base", 0);

    auto tree = g.run({"rev-parse", "HEAD^{tree}"});
    while (!tree.empty() && (tree.back() == '\n' || tree.back() == '\r')) tree.pop_back();

    auto body = [&](int n) {
        std::string content;
        content += "tree " + tree + "\n";
        content += "parent " + base + "\n";
        content += "author Fixture <fixture@example.com> 1000000100 +0000\n";
        content += "committer Fixture <fixture@example.com> 1000000100 +0000\n";
        content += "\ncollide " + std::to_string(n) + "\n";
        return content;
    };

    // birthday search over the first 28 bits of candidate commit hashes
    std::unordered_map<std::string, int> seen;
    int found_a = -1, found_b = -1;
    std::string prefix;
    for (int n = 0;; ++n) {
        std::string content = body(n);
        std::string object = "commit " + std::to_string(content.size());
        object += '\0';
        object += content;
        std::string hash = sha1_hex(object);
        std::string p = hash.substr(0, 7);
        auto [it, inserted] = seen.emplace(p, n);
        if (!inserted) {
            found_a = it->second;
            found_b = n;
            prefix = p;
            break;
        }
    }

    auto materialize = [&](int n) {
        CommandOptions opts;
        opts.cwd = g.dir.string();
        opts.stdin_data = body(n);
        auto res = debtlens::proc::run({"git", "hash-object", "-t", "commit", "-w", "--stdin"},
                                       opts);
        if (!res.ok()) throw debtlens::Error("hash-object failed: " + res.err);
        std::string hash = res.out;
        while (!hash.empty() && (hash.back() == '\n' || hash.back() == '\r')) hash.pop_back();
        return hash;
    };
    repo.hash_a = materialize(found_a);
    repo.hash_b = materialize(found_b);
    g.run({"update-ref", "refs/heads/col-a", repo.hash_a});
    g.run({"update-ref", "refs/heads/col-b", repo.hash_b});
    repo.prefix = prefix;
    return repo;
}

} // namespace testutil
