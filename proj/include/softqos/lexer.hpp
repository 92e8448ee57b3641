#pragma once

#include "softqos/semiring.hpp"

#include <string>
#include <vector>

namespace softqos {

enum class Tok {
    Ident,
    Int,
    Float,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Colon,
    ColonColon,
    Dot,
    DotDot,
    Eq,     // =
    EqEq,   // ==
    Neq,    // !=
    Le,     // <=
    Lt,     // <
    Ge,     // >=
    Gt,     // >
    Plus,
    Minus,
    Star,
    Slash,
    Underscore,
    Bar2, // ||
    End,
};

struct Token {
    Tok kind;
    std::string text;
    int line = 1;
    int col = 1;
};

/// Tokenizes the shared concrete syntax ('#' starts a line comment).
/// Throws Error with line/column on an unexpected character.
std::vector<Token> tokenize(const std::string& text);

/// Token stream with one-token lookahead helpers. Parse errors carry the
/// offending token's position.
class TokenStream {
public:
    explicit TokenStream(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

    const Token& peek(std::size_t ahead = 0) const;
    const Token& next();
    bool at(Tok kind) const { return peek().kind == kind; }
    bool at_ident(const std::string& word) const;
    bool accept(Tok kind);
    bool accept_ident(const std::string& word);
    Token expect(Tok kind, const std::string& what);
    std::string expect_ident(const std::string& what);
    void expect_word(const std::string& word);
    [[noreturn]] void fail(const std::string& message) const;

    std::size_t position() const { return pos_; }
    void rewind(std::size_t pos) { pos_ = pos; }

private:
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

} // namespace softqos
