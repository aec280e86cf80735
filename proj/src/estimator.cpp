#include "estimator.hpp"

#include <algorithm>

namespace mqp {

double selection_factor(CompareOp op, double distinct) {
    switch (op) {
        case CompareOp::eq: return 1.0 / distinct;
        case CompareOp::lt:
        case CompareOp::gt: return 1.0 / 3.0;
        case CompareOp::neq: return 1.0;
    }
    return 1.0;
}

double pushdown_size(const Catalog& catalog, const std::string& table, double cardinality,
                     const std::vector<SelectionPredicate>& selections) {
    double size = cardinality;
    for (const auto& s : selections) {
        if (s.table != table) continue;
        size *= selection_factor(s.op, catalog.distinct_of(table, s.attribute));
    }
    return size;
}

double predicate_divisor(const Catalog& catalog, const JoinPredicate& predicate) {
    return std::max(catalog.distinct_of(predicate.left_table, predicate.left_attribute),
                    catalog.distinct_of(predicate.right_table, predicate.right_attribute));
}

double join_divisor(const Catalog& catalog, const std::vector<JoinPredicate>& predicates) {
    double divisor = 1.0;
    for (const auto& p : predicates) divisor *= predicate_divisor(catalog, p);
    return divisor;
}

double join_size(double left_size, double right_size, double divisor) {
    return left_size * right_size / divisor;
}

}  // namespace mqp
