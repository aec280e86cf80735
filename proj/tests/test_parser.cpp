#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <functional>

#include "catalog.hpp"
#include "error.hpp"
#include "parser.hpp"
#include "support/paper_fixtures.hpp"

using namespace mqp;

namespace {
const Catalog& cat() {
    static const Catalog c = Catalog::load_default();
    return c;
}

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::exec;
}
}  // namespace

TEST_CASE("parses a plain select-from-where query") {
    const ParsedQuery q = parse_query(fixtures::kSingleQuery, cat());
    CHECK(q.name == "Q1");
    CHECK(q.select.aggregate == Aggregate::none);
    CHECK(q.select.attributes ==
          std::vector<std::string>{"c_name", "c_address", "c_acctbal"});
    CHECK(q.tables == std::vector<std::string>{"region", "nation", "customer", "orders"});
    REQUIRE(q.where != nullptr);
    CHECK(q.predicates().size() == 4);
}

TEST_CASE("keywords are case-insensitive, names are not") {
    const ParsedQuery q =
        parse_query("select r_name from region where r_regionkey = 1", cat());
    CHECK(q.tables == std::vector<std::string>{"region"});
    CHECK_THROWS_AS(parse_query("SELECT R_NAME FROM region", cat()), Error);
}

TEST_CASE("aggregates and grouping") {
    const ParsedQuery d = parse_query(fixtures::kSingleQueryDistinct, cat());
    CHECK(d.select.aggregate == Aggregate::distinct);

    const ParsedQuery s =
        parse_query("SELECT SUM(o_totalprice) FROM orders WHERE o_custkey = 7", cat());
    CHECK(s.select.aggregate == Aggregate::sum);
    CHECK(s.select.sum_attribute == "o_totalprice");
    CHECK(s.select.group_attribute.empty());

    const ParsedQuery g = parse_query(
        "SELECT SUM(o_totalprice), o_custkey FROM orders GROUP BY o_custkey", cat());
    CHECK(g.select.aggregate == Aggregate::sum);
    CHECK(g.select.group_attribute == "o_custkey");
    CHECK(g.where == nullptr);
    // The aggregate leads the projection, and bare attributes must be grouped.
    CHECK_THROWS_AS(
        parse_query("SELECT o_custkey, SUM(o_totalprice) FROM orders GROUP BY o_custkey",
                    cat()),
        Error);
    CHECK_THROWS_AS(
        parse_query("SELECT SUM(o_totalprice), o_clerk FROM orders GROUP BY o_custkey",
                    cat()),
        Error);
    CHECK_THROWS_AS(parse_query("SELECT SUM(o_totalprice), o_custkey FROM orders", cat()),
                    Error);
    CHECK_THROWS_AS(
        parse_query("SELECT DISTINCT SUM(o_totalprice) FROM orders", cat()), Error);
}

TEST_CASE("literal lexemes are preserved") {
    const ParsedQuery q = parse_query(
        "SELECT l_orderkey FROM lineitem WHERE l_discount < 0.04 AND l_shipmode = 'MAIL'",
        cat());
    const auto preds = q.predicates();
    REQUIRE(preds.size() == 2);
    CHECK(preds[0].rhs.lexeme == "0.04");
    CHECK(preds[0].op == CompareOp::lt);
    CHECK(preds[1].rhs.lexeme == "'MAIL'");
    CHECK(preds[1].rhs.literal == Value(std::string("MAIL")));
}

TEST_CASE("render_sql round-trips") {
    for (const std::string text :
         {fixtures::kSingleQuery, fixtures::kSingleQueryDistinct,
          std::string("SELECT SUM(o_totalprice), o_custkey FROM orders WHERE "
                      "o_totalprice <> 100 GROUP BY o_custkey")}) {
        const ParsedQuery q = parse_query(text, cat());
        const ParsedQuery again = parse_query(render_sql(q), cat(), q.name);
        CHECK(queries_equal(q, again));
    }
}

TEST_CASE("syntax errors carry the syntax kind") {
    CHECK(kind_of([] { parse_query("SELECT FROM region", cat()); }) == ErrorKind::syntax);
    CHECK(kind_of([] { parse_query("SELECT r_name region", cat()); }) == ErrorKind::syntax);
    CHECK(kind_of([] { parse_query("SELECT r_name FROM region WHERE", cat()); }) ==
          ErrorKind::syntax);
    CHECK(kind_of([] { parse_query("", cat()); }) == ErrorKind::syntax);
}

TEST_CASE("semantic errors: unknown or misplaced names") {
    // Unknown table / attribute.
    CHECK(kind_of([] { parse_query("SELECT r_name FROM regions", cat()); }) ==
          ErrorKind::semantic);
    CHECK(kind_of([] { parse_query("SELECT r_size FROM region", cat()); }) ==
          ErrorKind::semantic);
    // Attribute of a table missing from FROM.
    CHECK(kind_of([] { parse_query("SELECT n_name FROM region", cat()); }) ==
          ErrorKind::semantic);
    CHECK(kind_of([] {
              parse_query("SELECT r_name FROM region WHERE n_regionkey = r_regionkey",
                          cat());
          }) == ErrorKind::semantic);
    // Duplicate FROM entry.
    CHECK(kind_of([] { parse_query("SELECT r_name FROM region, region", cat()); }) ==
          ErrorKind::semantic);
}

TEST_CASE("split_predicates separates filters from joins") {
    const ParsedQuery q = parse_query(fixtures::kSingleQuery, cat());
    const SplitPredicates sp = split_predicates(q, cat());
    REQUIRE(sp.selections.size() == 1);
    CHECK(sp.selections[0].table == "region");
    CHECK(sp.selections[0].attribute == "r_regionkey");
    CHECK(sp.selections[0].op == CompareOp::lt);
    CHECK(sp.selections[0].lexeme == "5");
    REQUIRE(sp.joins.size() == 3);
    CHECK(sp.joins[0].left_attribute == "o_custkey");
    CHECK(sp.joins[0].right_attribute == "c_custkey");
    CHECK(sp.joins[0].left_table == "orders");
    CHECK(sp.joins[0].right_table == "customer");
}

TEST_CASE("split_predicates normalizes literal-first filters") {
    const ParsedQuery q =
        parse_query("SELECT r_name FROM region WHERE 2 < r_regionkey", cat());
    const SplitPredicates sp = split_predicates(q, cat());
    REQUIRE(sp.selections.size() == 1);
    CHECK(sp.selections[0].attribute == "r_regionkey");
    CHECK(sp.selections[0].op == CompareOp::gt);  // mirrored around the literal
}

TEST_CASE("same-table attribute comparisons are rejected") {
    CHECK(kind_of([] {
              const ParsedQuery q = parse_query(
                  "SELECT n_name FROM nation WHERE n_nationkey = n_regionkey", cat());
              split_predicates(q, cat());
          }) == ErrorKind::semantic);
    // Non-equality between attributes of two tables is not a join.
    CHECK(kind_of([] {
              const ParsedQuery q = parse_query(
                  "SELECT n_name FROM nation, region WHERE n_regionkey < r_regionkey",
                  cat());
              split_predicates(q, cat());
          }) == ErrorKind::semantic);
}

TEST_CASE("multiquery parsing assigns names and encodings") {
    const MultiQuery mq = parse_multiquery(fixtures::kBatchFour, cat());
    REQUIRE(mq.queries.size() == 4);
    CHECK(mq.queries[0].name == "Query1");
    CHECK(mq.queries[3].name == "Query4");
    // Default encoding: first appearance across the batch.
    CHECK(mq.all_tables == std::vector<std::string>{"lineitem", "orders", "customer",
                                                    "nation", "region"});
    CHECK(mq.table_index("lineitem") == 0);
    CHECK(mq.table_index("region") == 4);
    CHECK(mq.table_index("ghost") == -1);
}

TEST_CASE("explicit encodings override first appearance") {
    const MultiQuery mq = parse_multiquery(fixtures::kBatchFour, cat(),
                                           fixtures::kBatchEncoding);
    CHECK(mq.all_tables == fixtures::kBatchEncoding);
    CHECK(mq.table_index("region") == 1);
    // The encoding must be a permutation of the batch's table set.
    CHECK_THROWS_AS(parse_multiquery(fixtures::kBatchFour, cat(), {"lineitem", "orders"}),
                    Error);
    CHECK_THROWS_AS(
        parse_multiquery(fixtures::kBatchFour, cat(),
                         {"lineitem", "region", "nation", "customer", "supplier"}),
        Error);
}

TEST_CASE("multiquery syntax") {
    CHECK(kind_of([] { parse_multiquery("SELECT r_name FROM region", cat()); }) ==
          ErrorKind::syntax);
    CHECK(kind_of([] { parse_multiquery("MULTIQUERY\nQuery1:\n", cat()); }) ==
          ErrorKind::syntax);
    // Duplicate query names collide.
    CHECK(kind_of([] {
              parse_multiquery(
                  "MULTIQUERY\nA:\nSELECT r_name FROM region\nA:\nSELECT r_name FROM "
                  "region\nEND\n",
                  cat());
          }) == ErrorKind::semantic);
}

TEST_CASE("boundary validation finds a covering query") {
    const MultiQuery four = parse_multiquery(fixtures::kBatchFour, cat());
    CHECK(validate_boundary(four) == 1);  // the five-table query
    const MultiQuery five = parse_multiquery(fixtures::kBatchFive, cat());
    CHECK(validate_boundary(five) == 1);

    CHECK(kind_of([] {
              const MultiQuery mq = parse_multiquery(
                  "MULTIQUERY\nA:\nSELECT r_name FROM region\nB:\nSELECT n_name FROM "
                  "nation\nEND\n",
                  cat());
              validate_boundary(mq);
          }) == ErrorKind::semantic);
}

TEST_CASE("five-query batch keeps batch order") {
    const MultiQuery mq = parse_multiquery(fixtures::kBatchFive, cat(),
                                           fixtures::kBatchEncoding);
    REQUIRE(mq.queries.size() == 5);
    CHECK(mq.queries[4].name == "Query5");
    CHECK(mq.queries[4].tables == std::vector<std::string>{"customer", "orders"});
    const SplitPredicates sp = split_predicates(mq.queries[4], cat());
    REQUIRE(sp.joins.size() == 1);
    REQUIRE(sp.selections.size() == 1);
    CHECK(sp.selections[0].attribute == "o_totalprice");
}
