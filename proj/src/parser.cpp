#include "parser.hpp"

#include <algorithm>
#include <set>

#include "error.hpp"
#include "lexer.hpp"
#include "textutil.hpp"

namespace mqp {

namespace {

class Parser {
public:
    Parser(std::vector<Token> toks, const Catalog& catalog)
        : toks_(std::move(toks)), catalog_(catalog) {}

    ParsedQuery parse_single(const std::string& name) {
        ParsedQuery q = parse_query_body(name);
        expect(Tok::eof, "end of input");
        return q;
    }

    MultiQuery parse_batch() {
        expect(Tok::kw_multiquery, "MULTIQUERY");
        MultiQuery mq;
        std::set<std::string> names;
        while (peek().type != Tok::kw_end) {
            if (peek().type == Tok::eof)
                fail(ErrorKind::syntax,
                     "line " + std::to_string(peek().line) + ": missing END after query batch");
            Token name = expect(Tok::identifier, "query name");
            expect(Tok::colon, "':' after query name");
            if (!names.insert(name.text).second)
                fail(ErrorKind::semantic, "duplicate query name '" + name.text + "'");
            ParsedQuery q = parse_query_body(name.text);
            if (q.select.aggregate != Aggregate::none || !q.select.group_attribute.empty())
                fail(ErrorKind::semantic, "query '" + q.name +
                                              "': aggregates are not supported in a batch");
            mq.queries.push_back(std::move(q));
        }
        expect(Tok::kw_end, "END");
        expect(Tok::eof, "end of input");
        if (mq.queries.empty())
            fail(ErrorKind::syntax, "batch contains no queries");
        finish_batch(mq);
        return mq;
    }

    static void finish_batch(MultiQuery& mq) {
        for (const auto& q : mq.queries) {
            for (const auto& t : q.tables)
                if (std::find(mq.all_tables.begin(), mq.all_tables.end(), t) ==
                    mq.all_tables.end())
                    mq.all_tables.push_back(t);
            auto note_attr = [&](const std::string& a) {
                if (std::find(mq.all_attributes.begin(), mq.all_attributes.end(), a) ==
                    mq.all_attributes.end())
                    mq.all_attributes.push_back(a);
            };
            for (const auto& a : q.select.attributes) note_attr(a);
            for (const auto& cmp : q.predicates()) {
                if (cmp.lhs.is_attribute) note_attr(cmp.lhs.attribute);
                if (cmp.rhs.is_attribute) note_attr(cmp.rhs.attribute);
            }
        }
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    Token take() { return toks_[pos_++]; }

    Token expect(Tok type, const std::string& what) {
        if (peek().type != type)
            fail(ErrorKind::syntax, "line " + std::to_string(peek().line) + ": expected " + what +
                                        ", found '" + peek().text + "'");
        return take();
    }

    ParsedQuery parse_query_body(const std::string& name) {
        ParsedQuery q;
        q.name = name;
        expect(Tok::kw_select, "SELECT");
        parse_select_list(q.select);
        expect(Tok::kw_from, "FROM");
        q.tables.push_back(expect(Tok::identifier, "table name").text);
        while (peek().type == Tok::comma) {
            take();
            q.tables.push_back(expect(Tok::identifier, "table name").text);
        }
        if (peek().type == Tok::kw_where) {
            take();
            q.where = parse_and_list();
        }
        if (peek().type == Tok::kw_group) {
            take();
            expect(Tok::kw_by, "BY after GROUP");
            q.select.group_attribute = expect(Tok::identifier, "grouping attribute").text;
        }
        validate(q);
        return q;
    }

    void parse_select_list(SelectList& select) {
        if (peek().type == Tok::kw_distinct) {
            take();
            if (peek().type == Tok::kw_sum)
                fail(ErrorKind::semantic,
                     "line " + std::to_string(peek().line) + ": DISTINCT cannot be combined with SUM");
            select.aggregate = Aggregate::distinct;
            parse_attr_list(select);
            return;
        }
        if (peek().type == Tok::kw_sum) {
            take();
            select.aggregate = Aggregate::sum;
            expect(Tok::lparen, "'(' after SUM");
            select.sum_attribute = expect(Tok::identifier, "attribute").text;
            expect(Tok::rparen, "')' after SUM argument");
            select.attributes.push_back(select.sum_attribute);
            while (peek().type == Tok::comma) {
                take();
                if (peek().type == Tok::kw_distinct || peek().type == Tok::kw_sum)
                    fail(ErrorKind::semantic, "line " + std::to_string(peek().line) +
                                                  ": only one aggregate is supported");
                select.attributes.push_back(expect(Tok::identifier, "attribute").text);
            }
            return;
        }
        parse_attr_list(select);
    }

    void parse_attr_list(SelectList& select) {
        select.attributes.push_back(expect(Tok::identifier, "attribute").text);
        while (peek().type == Tok::comma) {
            take();
            if (peek().type == Tok::kw_sum)
                fail(ErrorKind::semantic, "line " + std::to_string(peek().line) +
                                              ": SUM must be the first item of the projection");
            select.attributes.push_back(expect(Tok::identifier, "attribute").text);
        }
    }

    std::shared_ptr<AndList> parse_and_list() {
        auto node = std::make_shared<AndList>();
        node->leaf = parse_comparison();
        while (peek().type == Tok::kw_and) {
            take();
            auto parent = std::make_shared<AndList>();
            parent->left = node;
            parent->right = std::make_shared<AndList>();
            parent->right->leaf = parse_comparison();
            node = parent;
        }
        return node;
    }

    Comparison parse_comparison() {
        Comparison cmp;
        cmp.lhs = parse_operand();
        switch (peek().type) {
            case Tok::op_eq: cmp.op = CompareOp::eq; break;
            case Tok::op_neq: cmp.op = CompareOp::neq; break;
            case Tok::op_lt: cmp.op = CompareOp::lt; break;
            case Tok::op_gt: cmp.op = CompareOp::gt; break;
            default:
                fail(ErrorKind::syntax, "line " + std::to_string(peek().line) +
                                            ": expected comparison operator, found '" +
                                            peek().text + "'");
        }
        take();
        cmp.rhs = parse_operand();
        if (!cmp.lhs.is_attribute && !cmp.rhs.is_attribute)
            fail(ErrorKind::semantic, "comparison between two literals is not supported");
        if (cmp.lhs.is_attribute && cmp.rhs.is_attribute && cmp.op != CompareOp::eq)
            fail(ErrorKind::semantic, "join predicate '" + cmp.lhs.attribute + " " +
                                          op_text(cmp.op) + " " + cmp.rhs.attribute +
                                          "' must be an equality");
        return cmp;
    }

    Operand parse_operand() {
        const Token& t = peek();
        if (t.type == Tok::identifier) return Operand::attr(take().text);
        if (t.type == Tok::number) {
            Token tok = take();
            Value v = tok.text.find('.') == std::string::npos
                          ? Value(static_cast<int64_t>(std::stoll(tok.text)))
                          : Value(std::stod(tok.text));
            return Operand::lit(std::move(v), tok.text);
        }
        if (t.type == Tok::string_lit) {
            Token tok = take();
            return Operand::lit(Value(tok.text), "'" + tok.text + "'");
        }
        fail(ErrorKind::syntax, "line " + std::to_string(t.line) +
                                    ": expected attribute or literal, found '" + t.text + "'");
    }

    void validate(const ParsedQuery& q) {
        std::set<std::string> listed;
        for (const auto& t : q.tables) {
            if (!catalog_.has_table(t)) fail(ErrorKind::semantic, "unknown table '" + t + "'");
            if (!listed.insert(t).second)
                fail(ErrorKind::semantic, "table '" + t + "' listed twice in FROM");
        }
        auto check_attr = [&](const std::string& a) {
            auto owner = catalog_.table_of(a);
            if (!owner) fail(ErrorKind::semantic, "unknown attribute '" + a + "'");
            if (!listed.count(*owner))
                fail(ErrorKind::semantic, "attribute '" + a + "' belongs to table '" + *owner +
                                              "', which is not listed in FROM");
        };
        for (const auto& a : q.select.attributes) check_attr(a);
        if (!q.select.group_attribute.empty()) {
            if (q.select.aggregate != Aggregate::sum)
                fail(ErrorKind::semantic, "GROUP BY requires a SUM projection");
            check_attr(q.select.group_attribute);
            // Extra projected attributes must be the grouping attribute.
            for (const auto& a : q.select.attributes)
                if (a != q.select.sum_attribute && a != q.select.group_attribute)
                    fail(ErrorKind::semantic, "attribute '" + a +
                                                  "' must appear in the GROUP BY clause");
        } else if (q.select.aggregate == Aggregate::sum && q.select.attributes.size() > 1) {
            fail(ErrorKind::semantic,
                 "projection mixes SUM with plain attributes but has no GROUP BY");
        }
        for (const auto& cmp : q.predicates()) {
            if (cmp.lhs.is_attribute) check_attr(cmp.lhs.attribute);
            if (cmp.rhs.is_attribute) check_attr(cmp.rhs.attribute);
        }
    }

    std::vector<Token> toks_;
    size_t pos_ = 0;
    const Catalog& catalog_;
};

}  // namespace

ParsedQuery parse_query(const std::string& text, const Catalog& catalog,
                        const std::string& name) {
    Parser p(tokenize(text), catalog);
    return p.parse_single(name);
}

MultiQuery parse_multiquery(const std::string& text, const Catalog& catalog,
                            const std::vector<std::string>& encoding) {
    Parser p(tokenize(text), catalog);
    MultiQuery mq = p.parse_batch();
    if (!encoding.empty()) {
        std::set<std::string> given(encoding.begin(), encoding.end());
        std::set<std::string> derived(mq.all_tables.begin(), mq.all_tables.end());
        if (encoding.size() != given.size())
            fail(ErrorKind::semantic, "table encoding lists a table twice");
        if (given != derived)
            fail(ErrorKind::semantic,
                 "table encoding must be a permutation of the batch's tables");
        mq.all_tables = encoding;
    }
    if (mq.all_tables.size() > 10)
        fail(ErrorKind::plan, "batch references " + std::to_string(mq.all_tables.size()) +
                                  " tables; at most 10 are supported");
    return mq;
}

size_t validate_boundary(const MultiQuery& mq) {
    for (size_t i = 0; i < mq.queries.size(); ++i) {
        const auto cover = mq.queries[i].table_set();
        bool ok = true;
        for (const auto& q : mq.queries)
            for (const auto& t : q.tables)
                if (!cover.count(t)) {
                    ok = false;
                    break;
                }
        if (ok) return i;
    }
    // Report against the widest query so the message names what is missing.
    size_t widest = 0;
    for (size_t i = 1; i < mq.queries.size(); ++i)
        if (mq.queries[i].tables.size() > mq.queries[widest].tables.size()) widest = i;
    const auto cover = mq.queries[widest].table_set();
    std::vector<std::string> missing;
    for (const auto& t : mq.all_tables)
        if (!cover.count(t)) missing.push_back(t);
    fail(ErrorKind::semantic,
         "no query spans the batch's tables; query '" + mq.queries[widest].name +
             "' comes closest but lacks: " + join_strings(missing, ", "));
}

SplitPredicates split_predicates(const ParsedQuery& query, const Catalog& catalog) {
    SplitPredicates out;
    for (const auto& cmp : query.predicates()) {
        if (cmp.lhs.is_attribute && cmp.rhs.is_attribute) {
            JoinPredicate j;
            j.left_attribute = cmp.lhs.attribute;
            j.right_attribute = cmp.rhs.attribute;
            j.left_table = *catalog.table_of(j.left_attribute);
            j.right_table = *catalog.table_of(j.right_attribute);
            if (j.left_table == j.right_table)
                fail(ErrorKind::semantic, "'" + j.left_attribute + "' and '" +
                                              j.right_attribute +
                                              "' belong to the same table; only "
                                              "cross-table key equalities are supported");
            if (cmp.op != CompareOp::eq)
                fail(ErrorKind::semantic, "'" + j.left_attribute + " " + op_text(cmp.op) +
                                              " " + j.right_attribute +
                                              "': attributes of two tables can only be "
                                              "compared with =");
            out.joins.push_back(std::move(j));
            continue;
        }
        // Normalize literal-on-the-left by flipping the operator.
        const Operand& attr = cmp.lhs.is_attribute ? cmp.lhs : cmp.rhs;
        const Operand& lit = cmp.lhs.is_attribute ? cmp.rhs : cmp.lhs;
        CompareOp op = cmp.op;
        if (!cmp.lhs.is_attribute) {
            if (op == CompareOp::lt)
                op = CompareOp::gt;
            else if (op == CompareOp::gt)
                op = CompareOp::lt;
        }
        SelectionPredicate s;
        s.table = *catalog.table_of(attr.attribute);
        s.attribute = attr.attribute;
        s.op = op;
        s.literal = lit.literal;
        s.lexeme = lit.lexeme;
        out.selections.push_back(std::move(s));
    }
    return out;
}

std::string render_sql(const ParsedQuery& query) {
    std::string out = "SELECT ";
    switch (query.select.aggregate) {
        case Aggregate::none:
            out += join_strings(query.select.attributes, ", ");
            break;
        case Aggregate::distinct:
            out += "DISTINCT " + join_strings(query.select.attributes, ", ");
            break;
        case Aggregate::sum: {
            std::vector<std::string> items;
            items.push_back("SUM(" + query.select.sum_attribute + ")");
            for (size_t i = 1; i < query.select.attributes.size(); ++i)
                items.push_back(query.select.attributes[i]);
            out += join_strings(items, ", ");
            break;
        }
    }
    out += " FROM " + join_strings(query.tables, ", ");
    if (query.where) {
        std::vector<std::string> parts;
        for (const auto& cmp : query.where->leaves()) {
            std::string l = cmp.lhs.is_attribute ? cmp.lhs.attribute : cmp.lhs.lexeme;
            std::string r = cmp.rhs.is_attribute ? cmp.rhs.attribute : cmp.rhs.lexeme;
            parts.push_back(l + " " + op_text(cmp.op) + " " + r);
        }
        out += " WHERE " + join_strings(parts, " AND ");
    }
    if (!query.select.group_attribute.empty())
        out += " GROUP BY " + query.select.group_attribute;
    return out;
}

bool queries_equal(const ParsedQuery& a, const ParsedQuery& b) {
    if (a.name != b.name || a.select != b.select || a.tables != b.tables) return false;
    return a.predicates() == b.predicates();
}

}  // namespace mqp
