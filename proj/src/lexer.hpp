#pragma once

#include <string>
#include <vector>

namespace mqp {

enum class Tok {
    kw_select,
    kw_distinct,
    kw_sum,
    kw_from,
    kw_where,
    kw_and,
    kw_group,
    kw_by,
    kw_multiquery,
    kw_end,
    identifier,
    number,
    string_lit,  // text holds the unquoted payload
    comma,
    lparen,
    rparen,
    colon,
    op_eq,
    op_neq,
    op_lt,
    op_gt,
    eof,
};

struct Token {
    Tok type = Tok::eof;
    std::string text;
    int line = 1;
    int col = 1;
};

// Tokenizes a query or batch.  Keywords are case-insensitive; identifiers
// keep their spelling.  Fails with a lex error on stray characters or an
// unterminated string.
std::vector<Token> tokenize(const std::string& text);

}  // namespace mqp
