#pragma once

// Text format for structures plus the word syntax used by the rotation-group
// tools.
//
// Structure grammar (whitespace-insensitive, `#` comments to end of line):
//
//   structure NAME {
//     universe: id+ ;
//     relation R/k : ( id{k} )* ;
//     ...
//   }
//
// Identifiers match [A-Za-z0-9_.']+ — the dot and prime are admitted so that
// generated vertex ids of word-indexed structures (paths like D2'.D1) are
// themselves valid ids. Duplicate tuples collapse; duplicate universe ids or
// relation names are errors.
//
// Word syntax: space-separated tokens Q1, Q2, D1..Db, with a trailing ' for
// the inverse; empty text is the identity. Letters are encoded as in word.hpp
// with symbols 1 = Q1, 2 = Q2, 2+j = D_j.

#include <cctype>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "csplab/core.hpp"
#include "csplab/structure.hpp"
#include "csplab/word.hpp"

namespace csplab {

namespace detail {

inline bool id_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '\'';
}

struct Token {
    std::string text;
    int line;
    int col;
};

inline std::vector<Token> tokenize_struct(const std::string& text) {
    std::vector<Token> toks;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](char c) {
        if (c == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    };
    while (i < text.size()) {
        char c = text[i];
        if (c == '#') {
            while (i < text.size() && text[i] != '\n') advance(text[i++]);
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(c);
            ++i;
            continue;
        }
        if (id_char(c)) {
            Token t{"", line, col};
            while (i < text.size() && id_char(text[i])) {
                t.text += text[i];
                advance(text[i++]);
            }
            toks.push_back(std::move(t));
            continue;
        }
        if (c == '{' || c == '}' || c == '(' || c == ')' || c == ':' || c == ';' || c == '/') {
            toks.push_back({std::string(1, c), line, col});
            advance(c);
            ++i;
            continue;
        }
        throw parse_error(std::string("unexpected character '") + c + "'", line, col);
    }
    toks.push_back({"", line, col}); // end marker
    return toks;
}

class StructParser {
  public:
    explicit StructParser(const std::string& text) : toks_(tokenize_struct(text)) {}

    Structure parse() {
        expect_word("structure");
        Structure s;
        s.name = expect_id("structure name");
        expect_punct("{");
        expect_word("universe");
        expect_punct(":");
        std::map<std::string, int> elem_ix;
        while (peek().text != ";") {
            Token t = next();
            if (!is_id(t)) fail(t, "expected element id");
            if (elem_ix.count(t.text))
                throw parse_error("duplicate universe id: " + t.text, t.line, t.col);
            elem_ix[t.text] = static_cast<int>(s.universe.size());
            s.universe.push_back(t.text);
        }
        if (s.universe.empty()) fail(peek(), "universe must list at least one id");
        expect_punct(";");

        std::set<std::string> rel_names;
        while (peek().text == "relation") {
            next();
            Relation r;
            Token rname = next();
            if (!is_id(rname)) fail(rname, "expected relation name");
            r.name = rname.text;
            if (!rel_names.insert(r.name).second)
                throw parse_error("duplicate relation name: " + r.name, rname.line, rname.col);
            expect_punct("/");
            Token ar = next();
            r.arity = parse_arity(ar);
            expect_punct(":");
            while (peek().text == "(") {
                Token open = next();
                std::vector<int> row;
                while (peek().text != ")") {
                    Token t = next();
                    if (!is_id(t)) fail(t, "expected element id");
                    auto it = elem_ix.find(t.text);
                    if (it == elem_ix.end())
                        throw parse_error("unknown element id: " + t.text, t.line, t.col);
                    row.push_back(it->second);
                }
                expect_punct(")");
                if (static_cast<int>(row.size()) != r.arity)
                    throw parse_error("relation " + r.name + "/" + std::to_string(r.arity) +
                                          ": tuple has " + std::to_string(row.size()) +
                                          " entries",
                                      open.line, open.col);
                r.tuples.push_back(std::move(row));
            }
            expect_punct(";");
            s.relations.push_back(std::move(r));
        }
        expect_punct("}");
        Token end = next();
        if (!end.text.empty()) fail(end, "expected end of input");
        s.normalize();
        return s;
    }

  private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;

    const Token& peek() const { return toks_[pos_]; }
    Token next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    static bool is_id(const Token& t) {
        if (t.text.empty()) return false;
        for (char c : t.text)
            if (!id_char(c)) return false;
        return true;
    }

    [[noreturn]] static void fail(const Token& t, const std::string& msg) {
        throw parse_error(msg + (t.text.empty() ? ", got end of input" : ", got '" + t.text + "'"),
                          t.line, t.col);
    }

    void expect_word(const std::string& w) {
        Token t = next();
        if (t.text != w) fail(t, "expected '" + w + "'");
    }
    void expect_punct(const std::string& p) {
        Token t = next();
        if (t.text != p) fail(t, "expected '" + p + "'");
    }
    std::string expect_id(const std::string& what) {
        Token t = next();
        if (!is_id(t)) fail(t, "expected " + what);
        return t.text;
    }
    static int parse_arity(const Token& t) {
        if (t.text.empty()) fail(t, "expected arity");
        for (char c : t.text)
            if (!std::isdigit(static_cast<unsigned char>(c))) fail(t, "expected numeric arity");
        long v = std::strtol(t.text.c_str(), nullptr, 10);
        if (v < 1 || v > 1000) fail(t, "arity out of range");
        return static_cast<int>(v);
    }
};

} // namespace detail

inline Structure parse_structure(const std::string& text) {
    return detail::StructParser(text).parse();
}

// Canonical serialization: universe in declaration order, tuples in
// lexicographic (stored) order, fixed layout. parse(serialize(s)) == s for any
// valid s.
inline std::string serialize_structure(const Structure& s) {
    std::string out = "structure " + s.name + " {\n  universe:";
    for (const auto& id : s.universe) out += " " + id;
    out += ";\n";
    for (const auto& r : s.relations) {
        out += "  relation " + r.name + "/" + std::to_string(r.arity) + ":";
        if (r.tuples.empty()) {
            out += ";\n";
            continue;
        }
        out += "\n";
        for (std::size_t ti = 0; ti < r.tuples.size(); ++ti) {
            out += "    (";
            const auto& t = r.tuples[ti];
            for (std::size_t k = 0; k < t.size(); ++k) {
                if (k) out += " ";
                out += s.universe[t[k]];
            }
            out += ")";
            out += (ti + 1 == r.tuples.size()) ? ";\n" : "\n";
        }
    }
    out += "}\n";
    return out;
}

// ---- words over the Q/D alphabet ----
//
// Symbol encoding: 1 = Q1, 2 = Q2, 2+j = D_j (j >= 1); negatives are inverses.

inline constexpr int kSymQ1 = 1;
inline constexpr int kSymQ2 = 2;
inline constexpr int sym_d(int j) { return 2 + j; }

// Word of D-indices only (btlab convention, letters ±1..±b) to the Q/D
// alphabet above.
inline Word lift_tree_word(const Word& w) {
    Word out;
    out.reserve(w.size());
    for (int x : w) out.push_back(x > 0 ? sym_d(x) : -sym_d(-x));
    return out;
}

inline std::string group_symbol_name(int sym) {
    std::string base;
    int s = std::abs(sym);
    if (s == kSymQ1)
        base = "Q1";
    else if (s == kSymQ2)
        base = "Q2";
    else
        base = "D" + std::to_string(s - 2);
    return sym < 0 ? base + "'" : base;
}

// Space-separated token form; empty word serializes to the empty string.
inline std::string format_group_word(const Word& w) {
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) out += " ";
        out += group_symbol_name(w[i]);
    }
    return out;
}

// Parses the token form. b bounds the admissible D-indices; pass b = -1 to
// accept any positive index.
inline Word parse_word(const std::string& text, int b) {
    Word w;
    int col = 1;
    std::size_t i = 0;
    while (i < text.size()) {
        if (std::isspace(static_cast<unsigned char>(text[i]))) {
            ++i;
            ++col;
            continue;
        }
        int tok_col = col;
        std::string tok;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) {
            tok += text[i++];
            ++col;
        }
        bool inv = false;
        if (!tok.empty() && tok.back() == '\'') {
            inv = true;
            tok.pop_back();
        }
        int sym = 0;
        if (tok == "Q1")
            sym = kSymQ1;
        else if (tok == "Q2")
            sym = kSymQ2;
        else if (tok.size() >= 2 && tok[0] == 'D') {
            bool digits = true;
            for (std::size_t k = 1; k < tok.size(); ++k)
                if (!std::isdigit(static_cast<unsigned char>(tok[k]))) digits = false;
            if (!digits) throw parse_error("unknown token: " + tok, 1, tok_col);
            long j = std::strtol(tok.c_str() + 1, nullptr, 10);
            if (j < 1 || (b >= 0 && j > b))
                throw parse_error("generator index out of range: " + tok, 1, tok_col);
            sym = sym_d(static_cast<int>(j));
        } else {
            throw parse_error("unknown token: " + (tok.empty() ? "'" : tok), 1, tok_col);
        }
        w.push_back(inv ? -sym : sym);
    }
    return w;
}

// Tree-word path id used for fragment universes: D-letters joined with dots,
// prime for inverses, "e" for the empty word (e.g. D2'.D1).
inline std::string format_tree_path(const Word& w) {
    if (w.empty()) return "e";
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) out += ".";
        int x = w[i];
        out += "D" + std::to_string(std::abs(x));
        if (x < 0) out += "'";
    }
    return out;
}

} // namespace csplab
