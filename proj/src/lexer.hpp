#pragma once

// Shared line-oriented lexer for the .strs/.csi/.otab/.otm formats and the
// inline expression syntaxes.

#include "cstuple/parser.hpp"

#include <cctype>
#include <cstdint>
#include <string>
#include <vector>

namespace cstuple {

enum class TokKind { Ident, Int, Punct, End };

struct Token {
    TokKind kind;
    std::string text;
    uint64_t value = 0; // Int only
    int line = 0;
    int col = 0; // 1-based
};

inline bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

inline std::vector<Token> lex_line(const std::string& line, int lineNo) {
    std::vector<Token> out;
    size_t i = 0;
    auto push = [&](TokKind k, std::string text, size_t startCol, uint64_t v = 0) {
        out.push_back(Token{k, std::move(text), v, lineNo, static_cast<int>(startCol) + 1});
    };
    while (i < line.size()) {
        char c = line[i];
        if (c == '#') break;
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        size_t start = i;
        if (ident_start(c)) {
            while (i < line.size() && ident_char(line[i])) ++i;
            push(TokKind::Ident, line.substr(start, i - start), start);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
            std::string text = line.substr(start, i - start);
            uint64_t v = 0;
            for (char d : text) {
                uint64_t nv = v * 10 + static_cast<uint64_t>(d - '0');
                if (nv / 10 != v)
                    throw ParseError("integer literal too large", lineNo,
                                     static_cast<int>(start) + 1);
                v = nv;
            }
            push(TokKind::Int, std::move(text), start, v);
            continue;
        }
        switch (c) {
        case '-':
            if (i + 1 < line.size() && line[i + 1] == '>') {
                push(TokKind::Punct, "->", start);
                i += 2;
                continue;
            }
            throw ParseError("stray '-' (did you mean '->'?)", lineNo,
                             static_cast<int>(start) + 1);
        case ':':
            if (i + 1 < line.size() && line[i + 1] == ':') {
                push(TokKind::Punct, "::", start);
                i += 2;
            } else {
                push(TokKind::Punct, ":", start);
                ++i;
            }
            continue;
        case '+':
            // "+B" is a single infix token when the B is not the start of a
            // longer identifier
            if (i + 1 < line.size() && line[i + 1] == 'B' &&
                (i + 2 >= line.size() || !ident_char(line[i + 2]))) {
                push(TokKind::Punct, "+B", start);
                i += 2;
            } else {
                push(TokKind::Punct, "+", start);
                ++i;
            }
            continue;
        case '(': case ')': case '[': case ']': case ';': case ',': case '.':
        case '\\': case '*': case '=':
            push(TokKind::Punct, std::string(1, c), start);
            ++i;
            continue;
        default:
            throw ParseError(std::string("unexpected character '") + c + "'", lineNo,
                             static_cast<int>(start) + 1);
        }
    }
    out.push_back(Token{TokKind::End, "", 0, lineNo, static_cast<int>(line.size()) + 1});
    return out;
}

struct LexedLine {
    int lineNo;
    std::vector<Token> toks;
};

// split into lines, drop comment-only/blank lines, lex the rest
inline std::vector<LexedLine> lex_file(const std::string& text) {
    std::vector<LexedLine> out;
    size_t pos = 0;
    int lineNo = 1;
    while (pos <= text.size()) {
        size_t nl = text.find('\n', pos);
        std::string line =
            nl == std::string::npos ? text.substr(pos) : text.substr(pos, nl - pos);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::vector<Token> toks = lex_line(line, lineNo);
        if (toks.size() > 1) out.push_back(LexedLine{lineNo, std::move(toks)});
        if (nl == std::string::npos) break;
        pos = nl + 1;
        ++lineNo;
    }
    return out;
}

class TokCursor {
public:
    explicit TokCursor(const std::vector<Token>& toks) : toks_(&toks) {}

    const Token& peek() const { return (*toks_)[pos_]; }
    const Token& next() {
        const Token& t = (*toks_)[pos_];
        if (t.kind != TokKind::End) ++pos_;
        return t;
    }
    bool at_end() const { return peek().kind == TokKind::End; }
    bool is_punct(const std::string& p) const {
        return peek().kind == TokKind::Punct && peek().text == p;
    }
    bool is_ident(const std::string& name) const {
        return peek().kind == TokKind::Ident && peek().text == name;
    }
    bool accept_punct(const std::string& p) {
        if (!is_punct(p)) return false;
        next();
        return true;
    }
    const Token& expect_punct(const std::string& p) {
        if (!is_punct(p)) fail("expected '" + p + "'");
        return next();
    }
    const Token& expect_ident() {
        if (peek().kind != TokKind::Ident) fail("expected identifier");
        return next();
    }
    uint64_t expect_int() {
        if (peek().kind != TokKind::Int) fail("expected integer");
        return next().value;
    }
    void expect_end() {
        if (!at_end()) fail("unexpected trailing input");
    }
    [[noreturn]] void fail(const std::string& msg) const {
        const Token& t = peek();
        std::string got = t.kind == TokKind::End ? "end of line" : "'" + t.text + "'";
        throw ParseError(msg + " (got " + got + ")", t.line, t.col);
    }

private:
    const std::vector<Token>* toks_;
    size_t pos_ = 0;
};

} // namespace cstuple
