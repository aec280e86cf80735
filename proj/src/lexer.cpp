#include "lexer.hpp"

#include <cctype>
#include <unordered_map>

#include "error.hpp"

namespace mqp {

namespace {

const std::unordered_map<std::string, Tok>& keywords() {
    static const std::unordered_map<std::string, Tok> kw = {
        {"select", Tok::kw_select}, {"distinct", Tok::kw_distinct},
        {"sum", Tok::kw_sum},       {"from", Tok::kw_from},
        {"where", Tok::kw_where},   {"and", Tok::kw_and},
        {"group", Tok::kw_group},   {"by", Tok::kw_by},
        {"multiquery", Tok::kw_multiquery}, {"end", Tok::kw_end},
    };
    return kw;
}

std::string lower(const std::string& s) {
    std::string out = s;
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

}  // namespace

std::vector<Token> tokenize(const std::string& text) {
    std::vector<Token> out;
    size_t i = 0;
    int line = 1;
    int col = 1;

    auto advance = [&](size_t n) {
        for (size_t k = 0; k < n; ++k) {
            if (i < text.size() && text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    auto push = [&](Tok t, std::string s, int l, int c) {
        out.push_back({t, std::move(s), l, c});
    };

    while (i < text.size()) {
        char c = text[i];
        int tl = line;
        int tc = col;
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t j = i;
            while (j < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
                ++j;
            std::string word = text.substr(i, j - i);
            advance(j - i);
            auto it = keywords().find(lower(word));
            if (it != keywords().end())
                push(it->second, word, tl, tc);
            else
                push(Tok::identifier, word, tl, tc);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i + 1 < text.size() &&
             std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
            size_t j = i;
            bool dot = false;
            while (j < text.size() &&
                   (std::isdigit(static_cast<unsigned char>(text[j])) ||
                    (text[j] == '.' && !dot))) {
                if (text[j] == '.') dot = true;
                ++j;
            }
            std::string num = text.substr(i, j - i);
            advance(j - i);
            push(Tok::number, num, tl, tc);
            continue;
        }
        if (c == '\'') {
            size_t j = i + 1;
            while (j < text.size() && text[j] != '\'') ++j;
            if (j >= text.size())
                fail(ErrorKind::lex, "line " + std::to_string(tl) + ": unterminated string");
            std::string payload = text.substr(i + 1, j - i - 1);
            advance(j - i + 1);
            push(Tok::string_lit, payload, tl, tc);
            continue;
        }
        switch (c) {
            case ',':
                advance(1);
                push(Tok::comma, ",", tl, tc);
                continue;
            case '(':
                advance(1);
                push(Tok::lparen, "(", tl, tc);
                continue;
            case ')':
                advance(1);
                push(Tok::rparen, ")", tl, tc);
                continue;
            case ':':
                advance(1);
                push(Tok::colon, ":", tl, tc);
                continue;
            case ';':
                advance(1);  // statement separators are permitted and ignored
                continue;
            case '=':
                advance(1);
                push(Tok::op_eq, "=", tl, tc);
                continue;
            case '<':
                if (i + 1 < text.size() && text[i + 1] == '>') {
                    advance(2);
                    push(Tok::op_neq, "<>", tl, tc);
                } else {
                    advance(1);
                    push(Tok::op_lt, "<", tl, tc);
                }
                continue;
            case '>':
                advance(1);
                push(Tok::op_gt, ">", tl, tc);
                continue;
            case '!':
                if (i + 1 < text.size() && text[i + 1] == '=') {
                    advance(2);
                    push(Tok::op_neq, "<>", tl, tc);
                    continue;
                }
                fail(ErrorKind::lex, "line " + std::to_string(tl) + ": stray '!'");
            default:
                fail(ErrorKind::lex, "line " + std::to_string(tl) + ": unexpected character '" +
                                         std::string(1, c) + "'");
        }
    }
    out.push_back({Tok::eof, "", line, col});
    return out;
}

}  // namespace mqp
