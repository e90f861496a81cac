#include "lexer.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>

namespace catamerge::detail {

namespace {

bool ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

} // namespace

std::string describe(const Token &t)
{
    switch (t.kind) {
    case Tok::Ident: return "'" + t.text + "'";
    case Tok::String: return "string literal";
    case Tok::Int:
    case Tok::Double: return "number '" + t.text + "'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Colon: return "':'";
    case Tok::Comma: return "','";
    case Tok::Dot: return "'.'";
    case Tok::Arrow: return "'->'";
    case Tok::Eq: return "'='";
    case Tok::Lt: return "'<'";
    case Tok::Gt: return "'>'";
    case Tok::Le: return "'<='";
    case Tok::Ge: return "'>='";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::End: return "end of input";
    case Tok::Invalid: return "invalid input";
    }
    return "?";
}

std::vector<Token> tokenize(const std::string &text)
{
    std::vector<Token> out;
    std::size_t i = 0, n = text.size();
    auto push = [&](Tok kind, std::size_t start, std::string s = {}) {
        out.push_back(Token{kind, std::move(s), SourceSpan{start, i - start}});
    };
    while (i < n) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (c == '#') {
            while (i < n && text[i] != '\n')
                ++i;
            continue;
        }
        if (std::isspace(c)) {
            ++i;
            continue;
        }
        std::size_t start = i;
        if (ident_start(c)) {
            while (i < n && ident_char(static_cast<unsigned char>(text[i])))
                ++i;
            push(Tok::Ident, start, text.substr(start, i - start));
            continue;
        }
        if (std::isdigit(c)) {
            bool is_double = false;
            while (i < n && std::isdigit(static_cast<unsigned char>(text[i])))
                ++i;
            if (i + 1 < n && text[i] == '.' && std::isdigit(static_cast<unsigned char>(text[i + 1]))) {
                is_double = true;
                ++i;
                while (i < n && std::isdigit(static_cast<unsigned char>(text[i])))
                    ++i;
            }
            if (i < n && (text[i] == 'e' || text[i] == 'E')) {
                std::size_t j = i + 1;
                if (j < n && (text[j] == '+' || text[j] == '-')) ++j;
                if (j < n && std::isdigit(static_cast<unsigned char>(text[j]))) {
                    is_double = true;
                    i = j;
                    while (i < n && std::isdigit(static_cast<unsigned char>(text[i])))
                        ++i;
                }
            }
            std::string raw = text.substr(start, i - start);
            errno = 0;
            if (is_double) {
                double d = std::strtod(raw.c_str(), nullptr);
                if (errno == ERANGE || !std::isfinite(d)) {
                    push(Tok::Invalid, start, "number '" + raw + "' is out of range");
                    continue;
                }
                push(Tok::Double, start, raw);
                out.back().double_value = d;
            } else {
                long long v = std::strtoll(raw.c_str(), nullptr, 10);
                if (errno == ERANGE) {
                    push(Tok::Invalid, start, "integer '" + raw + "' is out of range");
                    continue;
                }
                push(Tok::Int, start, raw);
                out.back().int_value = v;
            }
            continue;
        }
        if (c == '"') {
            ++i;
            std::string value;
            bool closed = false, bad = false;
            while (i < n) {
                char d = text[i];
                if (d == '"') {
                    closed = true;
                    ++i;
                    break;
                }
                if (d == '\n') break;
                if (d == '\\') {
                    if (i + 1 >= n) break;
                    char e = text[i + 1];
                    switch (e) {
                    case '"': value += '"'; break;
                    case '\\': value += '\\'; break;
                    case 'n': value += '\n'; break;
                    case 't': value += '\t'; break;
                    case 'r': value += '\r'; break;
                    default: bad = true;
                    }
                    i += 2;
                    continue;
                }
                value += d;
                ++i;
            }
            if (!closed)
                push(Tok::Invalid, start, "unterminated string literal");
            else if (bad)
                push(Tok::Invalid, start, "unknown escape sequence in string literal");
            else
                push(Tok::String, start, std::move(value));
            continue;
        }
        auto two = [&](char next) { return i + 1 < n && text[i + 1] == next; };
        Tok kind = Tok::Invalid;
        std::size_t len = 1;
        switch (c) {
        case '{': kind = Tok::LBrace; break;
        case '}': kind = Tok::RBrace; break;
        case '(': kind = Tok::LParen; break;
        case ')': kind = Tok::RParen; break;
        case ':': kind = Tok::Colon; break;
        case ',': kind = Tok::Comma; break;
        case '.': kind = Tok::Dot; break;
        case '=': kind = Tok::Eq; break;
        case '+': kind = Tok::Plus; break;
        case '*': kind = Tok::Star; break;
        case '/': kind = Tok::Slash; break;
        case '-':
            kind = two('>') ? Tok::Arrow : Tok::Minus;
            len = two('>') ? 2 : 1;
            break;
        case '<':
            kind = two('=') ? Tok::Le : Tok::Lt;
            len = two('=') ? 2 : 1;
            break;
        case '>':
            kind = two('=') ? Tok::Ge : Tok::Gt;
            len = two('=') ? 2 : 1;
            break;
        default: break;
        }
        i += len;
        if (kind == Tok::Invalid) {
            std::string shown = std::isprint(c) ? std::string(1, static_cast<char>(c)) : "byte " + std::to_string(c);
            push(Tok::Invalid, start, "unexpected character '" + shown + "'");
        } else {
            push(kind, start, text.substr(start, len));
        }
    }
    out.push_back(Token{Tok::End, {}, SourceSpan{n, 0}});
    return out;
}

} // namespace catamerge::detail
