#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "catamerge/source.hpp"

namespace catamerge::detail {

enum class Tok {
    Ident,
    String,
    Int,
    Double,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Colon,
    Comma,
    Dot,
    Arrow, // ->
    Eq,
    Lt,
    Gt,
    Le,
    Ge,
    Plus,
    Minus,
    Star,
    Slash,
    End,
    Invalid,
};

struct Token
{
    Tok kind = Tok::End;
    std::string text; // identifier name, decoded string, or raw number text
    SourceSpan span;
    std::int64_t int_value = 0;
    double double_value = 0;
};

std::string describe(const Token &t);

/// Tokenizes the whole text. Lexical errors become Invalid tokens carrying
/// the message in `text`; the token stream always ends with End.
std::vector<Token> tokenize(const std::string &text);

} // namespace catamerge::detail
