#include "softqos/lexer.hpp"

#include <cctype>

namespace softqos {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

} // namespace

std::vector<Token> tokenize(const std::string& text) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto push = [&](Tok kind, std::string t, int l, int c) { out.push_back({kind, std::move(t), l, c}); };

    while (i < text.size()) {
        char c = text[i];
        if (c == '\n') {
            ++line;
            col = 1;
            ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++col;
            ++i;
            continue;
        }
        if (c == '#') {
            while (i < text.size() && text[i] != '\n') ++i;
            continue;
        }
        int l = line, cl = col;
        auto two = [&](char a, char b) { return c == a && i + 1 < text.size() && text[i + 1] == b; };

        if (two(':', ':')) { push(Tok::ColonColon, "::", l, cl); i += 2; col += 2; continue; }
        if (two('=', '=')) { push(Tok::EqEq, "==", l, cl); i += 2; col += 2; continue; }
        if (two('!', '=')) { push(Tok::Neq, "!=", l, cl); i += 2; col += 2; continue; }
        if (two('<', '=')) { push(Tok::Le, "<=", l, cl); i += 2; col += 2; continue; }
        if (two('>', '=')) { push(Tok::Ge, ">=", l, cl); i += 2; col += 2; continue; }
        if (two('|', '|')) { push(Tok::Bar2, "||", l, cl); i += 2; col += 2; continue; }
        if (two('.', '.')) { push(Tok::DotDot, "..", l, cl); i += 2; col += 2; continue; }

        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = i;
            while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
            bool isFloat = false;
            if (i < text.size() && text[i] == '.' && i + 1 < text.size() &&
                std::isdigit(static_cast<unsigned char>(text[i + 1]))) {
                isFloat = true;
                ++i;
                while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
            }
            std::string t = text.substr(start, i - start);
            col += static_cast<int>(i - start);
            push(isFloat ? Tok::Float : Tok::Int, std::move(t), l, cl);
            continue;
        }
        if (ident_start(c)) {
            std::size_t start = i;
            while (i < text.size() && ident_char(text[i])) ++i;
            std::string t = text.substr(start, i - start);
            col += static_cast<int>(i - start);
            Tok kind = t == "_" ? Tok::Underscore : Tok::Ident;
            push(kind, std::move(t), l, cl);
            continue;
        }

        Tok kind;
        switch (c) {
        case '(': kind = Tok::LParen; break;
        case ')': kind = Tok::RParen; break;
        case '{': kind = Tok::LBrace; break;
        case '}': kind = Tok::RBrace; break;
        case '[': kind = Tok::LBracket; break;
        case ']': kind = Tok::RBracket; break;
        case ',': kind = Tok::Comma; break;
        case ';': kind = Tok::Semi; break;
        case ':': kind = Tok::Colon; break;
        case '.': kind = Tok::Dot; break;
        case '=': kind = Tok::Eq; break;
        case '<': kind = Tok::Lt; break;
        case '>': kind = Tok::Gt; break;
        case '+': kind = Tok::Plus; break;
        case '-': kind = Tok::Minus; break;
        case '*': kind = Tok::Star; break;
        case '/': kind = Tok::Slash; break;
        case '_': kind = Tok::Underscore; break;
        default:
            throw Error("line " + std::to_string(l) + ":" + std::to_string(cl) +
                        ": unexpected character '" + std::string(1, c) + "'");
        }
        push(kind, std::string(1, c), l, cl);
        ++i;
        ++col;
    }
    out.push_back({Tok::End, "", line, col});
    return out;
}

const Token& TokenStream::peek(std::size_t ahead) const {
    std::size_t p = pos_ + ahead;
    if (p >= tokens_.size()) p = tokens_.size() - 1;
    return tokens_[p];
}

const Token& TokenStream::next() {
    const Token& t = tokens_[pos_];
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
}

bool TokenStream::at_ident(const std::string& word) const {
    return peek().kind == Tok::Ident && peek().text == word;
}

bool TokenStream::accept(Tok kind) {
    if (at(kind)) {
        next();
        return true;
    }
    return false;
}

bool TokenStream::accept_ident(const std::string& word) {
    if (at_ident(word)) {
        next();
        return true;
    }
    return false;
}

Token TokenStream::expect(Tok kind, const std::string& what) {
    if (!at(kind)) fail("expected " + what);
    return next();
}

std::string TokenStream::expect_ident(const std::string& what) {
    if (peek().kind != Tok::Ident) fail("expected " + what);
    return next().text;
}

void TokenStream::expect_word(const std::string& word) {
    if (!accept_ident(word)) fail("expected '" + word + "'");
}

void TokenStream::fail(const std::string& message) const {
    const Token& t = peek();
    std::string got = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw Error("line " + std::to_string(t.line) + ":" + std::to_string(t.col) + ": " + message +
                ", got " + got);
}

} // namespace softqos
