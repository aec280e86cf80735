#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "value.hpp"

namespace mqp {

enum class Aggregate { none, distinct, sum };

// The projection clause.  `attributes` lists every attribute appearing in the
// clause in source order (a SUM argument contributes its attribute).
struct SelectList {
    std::vector<std::string> attributes;
    Aggregate aggregate = Aggregate::none;
    std::string sum_attribute;    // set when aggregate == sum
    std::string group_attribute;  // set when a grouping clause is present

    bool operator==(const SelectList&) const = default;
};

// One side of a comparison: a column reference or a literal.  Literals keep
// their source spelling so rendered plans reproduce the query text.
struct Operand {
    bool is_attribute = false;
    std::string attribute;
    Value literal;
    std::string lexeme;

    static Operand attr(std::string name) {
        Operand o;
        o.is_attribute = true;
        o.attribute = std::move(name);
        return o;
    }
    static Operand lit(Value v, std::string lex) {
        Operand o;
        o.literal = std::move(v);
        o.lexeme = std::move(lex);
        return o;
    }

    bool operator==(const Operand&) const = default;
};

struct Comparison {
    Operand lhs;
    CompareOp op = CompareOp::eq;
    Operand rhs;

    bool operator==(const Comparison&) const = default;
};

// Conjunction tree: internal nodes are ANDs, leaves are comparisons.
struct AndList {
    std::optional<Comparison> leaf;
    std::shared_ptr<AndList> left;
    std::shared_ptr<AndList> right;

    bool is_leaf() const { return leaf.has_value(); }

    void collect(std::vector<Comparison>& out) const {
        if (is_leaf()) {
            out.push_back(*leaf);
            return;
        }
        if (left) left->collect(out);
        if (right) right->collect(out);
    }
    std::vector<Comparison> leaves() const {
        std::vector<Comparison> out;
        collect(out);
        return out;
    }
};

struct ParsedQuery {
    std::string name;
    SelectList select;
    std::vector<std::string> tables;  // FROM clause order
    std::shared_ptr<AndList> where;   // null when absent

    std::set<std::string> table_set() const { return {tables.begin(), tables.end()}; }
    std::vector<Comparison> predicates() const {
        return where ? where->leaves() : std::vector<Comparison>{};
    }
};

// A filter on a single table, normalized to attribute-on-the-left.
struct SelectionPredicate {
    std::string table;
    std::string attribute;
    CompareOp op = CompareOp::eq;
    Value literal;
    std::string lexeme;

    bool operator==(const SelectionPredicate&) const = default;

    std::string render() const { return attribute + " " + op_text(op) + " " + lexeme; }
};

// An equality linking two tables' attributes.
struct JoinPredicate {
    std::string left_attribute;
    std::string right_attribute;
    std::string left_table;
    std::string right_table;

    bool operator==(const JoinPredicate&) const = default;

    // Unordered attribute-pair identity.
    bool same_pair(const JoinPredicate& o) const {
        return (left_attribute == o.left_attribute && right_attribute == o.right_attribute) ||
               (left_attribute == o.right_attribute && right_attribute == o.left_attribute);
    }

    std::string render() const { return left_attribute + " = " + right_attribute; }
};

struct SplitPredicates {
    std::vector<SelectionPredicate> selections;  // source order
    std::vector<JoinPredicate> joins;            // source order
};

struct MultiQuery {
    std::vector<ParsedQuery> queries;
    std::vector<std::string> all_tables;      // encoding order: index i <-> all_tables[i]
    std::vector<std::string> all_attributes;  // first-appearance order

    int table_index(const std::string& table) const {
        for (size_t i = 0; i < all_tables.size(); ++i)
            if (all_tables[i] == table) return static_cast<int>(i);
        return -1;
    }
};

}  // namespace mqp
