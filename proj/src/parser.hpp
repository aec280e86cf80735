#pragma once

#include <string>
#include <vector>

#include "ast.hpp"
#include "catalog.hpp"

namespace mqp {

// Parses one SELECT-FROM-WHERE query and validates every name against the
// catalog.  Standalone queries are named "Q1" unless a name is supplied.
ParsedQuery parse_query(const std::string& text, const Catalog& catalog,
                        const std::string& name = "Q1");

// Parses a MULTIQUERY ... END batch of named queries.  `encoding` optionally
// overrides the table-index assignment; it must be a permutation of the
// batch's table set.  When empty, tables are numbered by first appearance
// across the batch in order.
MultiQuery parse_multiquery(const std::string& text, const Catalog& catalog,
                            const std::vector<std::string>& encoding = {});

// Returns the index of the first query whose table set contains every other
// query's tables; fails with a semantic error when no query qualifies.
size_t validate_boundary(const MultiQuery& mq);

// Partitions a query's predicates into single-table filters (normalized to
// attribute-on-the-left) and two-table equality joins.
SplitPredicates split_predicates(const ParsedQuery& query, const Catalog& catalog);

// Reconstructs query text; parse_query(render_sql(q)) reproduces q.
std::string render_sql(const ParsedQuery& query);

bool queries_equal(const ParsedQuery& a, const ParsedQuery& b);

}  // namespace mqp
