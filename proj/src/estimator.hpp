#pragma once

#include <vector>

#include "ast.hpp"
#include "catalog.hpp"

namespace mqp {

// Fraction of rows that survive a single filter: equality keeps 1/V of the
// rows, a range comparison keeps 1/3, and an inequality keeps everything.
double selection_factor(CompareOp op, double distinct);

// Estimated rows of `table` after applying every filter in `selections`
// (factors multiply; the list may mention other tables' filters, which are
// ignored).
double pushdown_size(const Catalog& catalog, const std::string& table, double cardinality,
                     const std::vector<SelectionPredicate>& selections);

// Reduction divisor contributed by one equality join predicate:
// max(V(left), V(right)).
double predicate_divisor(const Catalog& catalog, const JoinPredicate& predicate);

// Divisor for joining two streams connected by `predicates` (their per-
// predicate divisors multiply).  An empty list means a cross product: 1.
double join_divisor(const Catalog& catalog, const std::vector<JoinPredicate>& predicates);

// Estimated output rows of a join: left * right / divisor.
double join_size(double left_size, double right_size, double divisor);

}  // namespace mqp
