#include "debtlens/adapter.hpp"

#include "debtlens/error.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_set>

namespace debtlens {

namespace {

const std::unordered_set<std::string>& java_keywords() {
    static const std::unordered_set<std::string> kw = {
        "abstract", "assert",    "boolean",   "break",      "byte",     "case",
        "catch",    "char",      "class",     "const",      "continue", "default",
        "do",       "double",    "else",      "enum",       "extends",  "final",
        "finally",  "float",     "for",       "goto",       "if",       "implements",
        "import",   "instanceof", "int",      "interface",  "long",     "native",
        "new",      "package",   "private",   "protected",  "public",   "return",
        "short",    "static",    "strictfp",  "super",      "switch",   "synchronized",
        "this",     "throw",     "throws",    "transient",  "try",      "void",
        "volatile", "while",     "var",       "record",     "sealed",   "permits",
        "yield",    "true",      "false",     "null"};
    return kw;
}

struct Token {
    enum Type { Ident, Punct, Number, Str } type;
    std::string text;
    std::size_t pos;
    std::size_t line;
};

struct ScanResult {
    std::vector<Token> tokens;
    std::vector<bool> line_has_code; // 0-based line index
    bool ok = true;
    std::string error;
    std::size_t error_pos = 0;
};

bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}
bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

// Comment- and string-aware tokenizer. Also records which physical lines
// carry code (anything outside comments that is not whitespace).
ScanResult scan(const std::string& src) {
    ScanResult res;
    std::size_t line_count = 1 + static_cast<std::size_t>(std::count(src.begin(), src.end(), '\n'));
    res.line_has_code.assign(line_count, false);

    std::size_t i = 0, line = 0;
    auto mark = [&] { res.line_has_code[line] = true; };
    auto fail = [&](const std::string& what, std::size_t pos) {
        res.ok = false;
        res.error = what;
        res.error_pos = pos;
    };

    while (i < src.size()) {
        char c = src[i];
        if (c == '\n') {
            ++line;
            ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
            while (i < src.size() && src[i] != '\n') ++i;
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '*') {
            std::size_t start = i;
            i += 2;
            bool closed = false;
            while (i < src.size()) {
                if (src[i] == '\n') ++line;
                if (src[i] == '*' && i + 1 < src.size() && src[i + 1] == '/') {
                    i += 2;
                    closed = true;
                    break;
                }
                ++i;
            }
            if (!closed) {
                fail("unterminated block comment", start);
                return res;
            }
            continue;
        }
        if (c == '"') {
            std::size_t start = i;
            mark();
            bool text_block = i + 2 < src.size() && src[i + 1] == '"' && src[i + 2] == '"';
            if (text_block) {
                i += 3;
                bool closed = false;
                while (i + 2 < src.size() + 1 && i < src.size()) {
                    if (src[i] == '\n') ++line;
                    if (src[i] == '"' && i + 2 < src.size() && src[i + 1] == '"' && src[i + 2] == '"') {
                        i += 3;
                        closed = true;
                        break;
                    }
                    ++i;
                }
                if (!closed) {
                    fail("unterminated text block", start);
                    return res;
                }
            } else {
                ++i;
                bool closed = false;
                while (i < src.size() && src[i] != '\n') {
                    if (src[i] == '\\' && i + 1 < src.size()) {
                        i += 2;
                        continue;
                    }
                    if (src[i] == '"') {
                        ++i;
                        closed = true;
                        break;
                    }
                    ++i;
                }
                if (!closed) {
                    fail("unterminated string literal", start);
                    return res;
                }
            }
            res.tokens.push_back({Token::Str, "\"\"", start, line});
            continue;
        }
        if (c == '\'') {
            std::size_t start = i;
            mark();
            ++i;
            bool closed = false;
            while (i < src.size() && src[i] != '\n') {
                if (src[i] == '\\' && i + 1 < src.size()) {
                    i += 2;
                    continue;
                }
                if (src[i] == '\'') {
                    ++i;
                    closed = true;
                    break;
                }
                ++i;
            }
            if (!closed) {
                fail("unterminated character literal", start);
                return res;
            }
            res.tokens.push_back({Token::Str, "''", start, line});
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = i;
            mark();
            // swallow the whole literal including any '.', exponent sign, suffix
            while (i < src.size()) {
                char d = src[i];
                if (std::isalnum(static_cast<unsigned char>(d)) || d == '_' || d == '.') {
                    ++i;
                } else if ((d == '+' || d == '-') && i > start &&
                           (src[i - 1] == 'e' || src[i - 1] == 'E')) {
                    ++i;
                } else {
                    break;
                }
            }
            res.tokens.push_back({Token::Number, src.substr(start, i - start), start, line});
            continue;
        }
        if (ident_start(c)) {
            std::size_t start = i;
            mark();
            while (i < src.size() && ident_char(src[i])) ++i;
            res.tokens.push_back({Token::Ident, src.substr(start, i - start), start, line});
            continue;
        }
        // punctuation; fuse the two-char operators the complexity counter needs
        mark();
        std::size_t start = i;
        std::string text(1, c);
        if (i + 1 < src.size()) {
            char d = src[i + 1];
            if ((c == '&' && d == '&') || (c == '|' && d == '|') || (c == ':' && d == ':') ||
                (c == '-' && d == '>'))
                text += d;
        }
        i += text.size();
        res.tokens.push_back({Token::Punct, std::move(text), start, line});
    }
    return res;
}

bool is_keyword(const std::string& s) { return java_keywords().count(s) > 0; }

bool capitalized(const std::string& s) {
    return !s.empty() && std::isupper(static_cast<unsigned char>(s[0]));
}

} // namespace

std::string to_string(RefKind k) {
    switch (k) {
    case RefKind::ExplicitImport: return "explicit_import";
    case RefKind::WildcardImport: return "wildcard_import";
    case RefKind::SamePackageUse: return "same_package_use";
    case RefKind::QualifiedUse: return "qualified_use";
    }
    return "?";
}

bool looks_binary(const std::string& content) {
    return content.find('\0') != std::string::npos;
}

bool JavaAdapter::recognizes(const std::string& path) const {
    return path.size() > 5 && path.compare(path.size() - 5, 5, ".java") == 0;
}

FileSyntax JavaAdapter::parse(const std::string& path, const std::string& content) const {
    FileSyntax out;
    ScanResult sc = scan(content);
    out.sloc = static_cast<int>(std::count(sc.line_has_code.begin(), sc.line_has_code.end(), true));
    if (!sc.ok) {
        out.parse_ok = false;
        out.error = sc.error;
        out.error_pos = sc.error_pos;
        return out;
    }

    const auto& toks = sc.tokens;
    std::size_t n = toks.size();

    auto tok_is = [&](std::size_t k, const char* s) {
        return k < n && toks[k].text == s;
    };

    struct OpenScope {
        enum Kind { Type, Function, Other } kind;
        std::string name;
        int decisions = 0; // functions only
    };
    std::vector<OpenScope> scopes;         // one entry per open '{'
    std::vector<std::string> type_stack;   // enclosing type names

    // pending declarations awaiting their opening brace
    std::string pending_type;
    std::string pending_func;
    bool pending_func_armed = false; // signature complete, next '{' opens the body

    int paren_depth = 0;
    std::set<std::string> seen_refs; // dedupe identical reference records

    auto add_ref = [&](RefKind kind, const std::string& symbol) {
        if (symbol.empty()) return;
        std::string key = std::to_string(static_cast<int>(kind)) + "|" + symbol;
        if (!seen_refs.insert(key).second) return;
        out.references.push_back({path, kind, symbol});
    };

    auto innermost_function = [&]() -> OpenScope* {
        for (auto it = scopes.rbegin(); it != scopes.rend(); ++it)
            if (it->kind == OpenScope::Function) return &*it;
        return nullptr;
    };

    auto read_dotted = [&](std::size_t& k, bool* wildcard) -> std::string {
        std::string name;
        if (wildcard) *wildcard = false;
        while (k < n) {
            if (toks[k].type == Token::Ident) {
                name += toks[k].text;
                ++k;
            } else {
                break;
            }
            if (tok_is(k, ".")) {
                ++k;
                if (tok_is(k, "*")) {
                    if (wildcard) *wildcard = true;
                    ++k;
                    break;
                }
                name += '.';
            } else {
                break;
            }
        }
        return name;
    };

    std::size_t k = 0;
    while (k < n) {
        const Token& t = toks[k];

        if (t.type == Token::Ident && t.text == "package" && type_stack.empty()) {
            ++k;
            out.package = read_dotted(k, nullptr);
            continue;
        }
        if (t.type == Token::Ident && t.text == "import" && type_stack.empty()) {
            ++k;
            bool is_static = k < n && toks[k].type == Token::Ident && toks[k].text == "static";
            if (is_static) ++k;
            bool wildcard = false;
            std::string name = read_dotted(k, &wildcard);
            if (is_static) {
                // import static a.b.C.member / a.b.C.* both reference type a.b.C
                if (!wildcard) {
                    auto dot = name.rfind('.');
                    if (dot != std::string::npos) name = name.substr(0, dot);
                }
                add_ref(RefKind::ExplicitImport, name);
            } else if (wildcard) {
                add_ref(RefKind::WildcardImport, name + ".*");
            } else {
                add_ref(RefKind::ExplicitImport, name);
            }
            continue;
        }

        if (t.type == Token::Ident &&
            (t.text == "class" || t.text == "interface" || t.text == "enum" ||
             (t.text == "record" && k + 2 < n && toks[k + 1].type == Token::Ident &&
              tok_is(k + 2, "(")))) {
            if (k + 1 < n && toks[k + 1].type == Token::Ident) {
                pending_type = toks[k + 1].text;
                std::string rel;
                for (const auto& s : type_stack) rel += s + ".";
                rel += pending_type;
                out.declared_types.push_back(rel);
                k += 2;
                continue;
            }
        }

        if (t.type == Token::Punct) {
            if (t.text == "(") {
                ++paren_depth;
            } else if (t.text == ")") {
                --paren_depth;
                // a completed parameter list may announce a function body
                if (!pending_func.empty() && paren_depth == 0) {
                    std::size_t j = k + 1;
                    // skip "throws A.B, C"
                    if (j < n && toks[j].type == Token::Ident && toks[j].text == "throws") {
                        ++j;
                        while (j < n && (toks[j].type == Token::Ident || tok_is(j, ".") || tok_is(j, ",")))
                            ++j;
                    }
                    if (j < n && tok_is(j, "{")) {
                        pending_func_armed = true;
                    } else {
                        pending_func.clear();
                    }
                }
            } else if (t.text == "{") {
                if (pending_func_armed) {
                    scopes.push_back({OpenScope::Function, pending_func, 0});
                    pending_func.clear();
                    pending_func_armed = false;
                } else if (!pending_type.empty()) {
                    scopes.push_back({OpenScope::Type, pending_type, 0});
                    type_stack.push_back(pending_type);
                    pending_type.clear();
                } else {
                    scopes.push_back({OpenScope::Other, "", 0});
                }
            } else if (t.text == "}") {
                if (scopes.empty()) {
                    out.parse_ok = false;
                    out.error = "unbalanced '}'";
                    out.error_pos = t.pos;
                    return out;
                }
                OpenScope top = scopes.back();
                scopes.pop_back();
                if (top.kind == OpenScope::Function)
                    out.functions.push_back({top.name, 1 + top.decisions});
                else if (top.kind == OpenScope::Type && !type_stack.empty())
                    type_stack.pop_back();
            } else if (t.text == "&&" || t.text == "||") {
                if (auto* f = innermost_function()) ++f->decisions;
            } else if (t.text == "?") {
                // ternary, not a generics wildcard
                bool prev_value = k > 0 && (toks[k - 1].type == Token::Ident ||
                                            toks[k - 1].type == Token::Number ||
                                            toks[k - 1].type == Token::Str ||
                                            tok_is(k - 1, ")") || tok_is(k - 1, "]"));
                bool next_generic = tok_is(k + 1, ">") ||
                                    (k + 1 < n && toks[k + 1].type == Token::Ident &&
                                     (toks[k + 1].text == "extends" || toks[k + 1].text == "super"));
                if (prev_value && !next_generic)
                    if (auto* f = innermost_function()) ++f->decisions;
            }
            ++k;
            continue;
        }

        if (t.type == Token::Ident) {
            if (t.text == "if" || t.text == "for" || t.text == "while" || t.text == "case" ||
                t.text == "catch") {
                if (auto* f = innermost_function()) ++f->decisions;
                ++k;
                continue;
            }
            if (is_keyword(t.text)) {
                ++k;
                continue;
            }
            bool after_dot = k > 0 && tok_is(k - 1, ".");
            if (after_dot) { // member access of an already-handled qualifier
                ++k;
                continue;
            }
            bool after_new = k > 0 && toks[k - 1].type == Token::Ident && toks[k - 1].text == "new";
            // collect the dotted chain starting here
            std::size_t j = k;
            std::vector<std::string> chain;
            while (j < n && toks[j].type == Token::Ident && !is_keyword(toks[j].text)) {
                chain.push_back(toks[j].text);
                if (j + 1 < n && tok_is(j + 1, ".") && j + 2 < n && toks[j + 2].type == Token::Ident)
                    j += 2;
                else
                    break;
            }
            std::size_t after = j + 1;
            // single identifier followed by '(': a call or a declaration site
            if (chain.size() == 1 && tok_is(after, "(") && !after_new) {
                if (pending_func.empty() && paren_depth == 0 && !scopes.empty() &&
                    scopes.back().kind != OpenScope::Function) {
                    // candidate member signature inside a type body
                    pending_func = chain[0];
                    pending_func_armed = false;
                }
            }
            if (chain.size() >= 2) {
                std::string full;
                for (std::size_t c = 0; c < chain.size(); ++c) {
                    if (c) full += '.';
                    full += chain[c];
                }
                add_ref(RefKind::QualifiedUse, full);
            } else if (capitalized(chain[0])) {
                add_ref(RefKind::SamePackageUse, chain[0]);
            }
            k = after;
            continue;
        }
        ++k;
    }

    if (!scopes.empty()) {
        out.parse_ok = false;
        out.error = "unbalanced '{' at end of file";
        out.error_pos = content.size();
    }
    return out;
}

const LanguageAdapter& adapter_by_id(const std::string& id) {
    static const JavaAdapter java;
    if (id == "java") return java;
    throw Error("unknown adapter: " + id);
}

} // namespace debtlens
