#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "ast.hpp"
#include "catalog.hpp"
#include "estimator.hpp"
#include "joinorder.hpp"
#include "planmap.hpp"

namespace mqp {

// Lexicographic successor step: rearranges `indices` into the next
// permutation and returns true, or returns false when `indices` is already
// the last (descending) arrangement.
bool next_permutation_step(std::vector<int>& indices);

// A query prepared for planning: tables resolved to scope indices and the
// predicate split precomputed.
struct QueryInfo {
    std::string name;
    int batch_index = 0;
    std::set<int> tables;  // indices of the FROM tables in the batch encoding
    std::map<int, std::vector<SelectionPredicate>> selections;  // by table index
    struct JoinRef {
        JoinPredicate predicate;
        int left_index = 0;
        int right_index = 0;
        double divisor = 1;  // max(V(left attr), V(right attr))
    };
    std::vector<JoinRef> joins;
};

// Shared planning state: the table encoding plus every query of the batch.
class PlanContext {
public:
    PlanContext(const Catalog& catalog, const MultiQuery& mq);

    const Catalog& catalog() const { return *catalog_; }
    const std::vector<std::string>& tables() const { return tables_; }
    const std::string& table_name(int index) const { return tables_[index]; }
    int table_count() const { return static_cast<int>(tables_.size()); }

    const std::vector<QueryInfo>& queries() const { return queries_; }
    const QueryInfo& query(size_t i) const { return queries_[i]; }
    int batch_index_of(const std::string& name) const;

    // Appends a late-arriving query; its tables must already be part of the
    // batch encoding.
    void add_query(const ParsedQuery& q);

    // Distinct join-predicate sets that connect the two table sets, one per
    // query that links them, deduplicated.  A query spanning both sides
    // without linking them contributes the empty set (keep every pairing);
    // an empty result means no query spans the split at all.
    std::vector<std::vector<JoinPredicate>> predicate_variants(const std::set<int>& left,
                                                               const std::set<int>& right) const;

private:
    int table_slot(const std::string& name) const;

    const Catalog* catalog_;
    std::vector<std::string> tables_;
    std::vector<QueryInfo> queries_;
    std::map<std::string, int> batch_index_;
};

// The filter a shared scan actually applies, together with the size the
// estimator assigns that scan.
struct AdoptedPushdown {
    double size = 0;
    std::vector<SelectionPredicate> predicates;
};

// One relation participating in a planning round: either a base table or a
// nested sub-plan ("view") whose entry is carried in unchanged.
struct ScopeMember {
    int index = 0;           // scope index; kViewIndex for a view
    JoinOrderPtr leaf;       // leaf node, or the view's whole join tree
    std::vector<int> real;   // base-table indices this member stands for
    PlanEntry seed;          // starting entry (views arrive pre-costed)
    bool is_view = false;
};

// Bottom-up cost-based join optimizer over an explicit scope.  Runs the
// seed / push-down / pair / partition phases and memoizes every subset's
// cheapest order in a PlanMap.
class Planner {
public:
    // Full-scope planner: one member per context table, considering the given
    // queries (all of them when `query_subset` is empty).
    explicit Planner(const PlanContext& ctx, std::vector<size_t> query_subset = {});

    // Explicit-scope planner, used for re-planning rounds that carry a view.
    Planner(const PlanContext& ctx, std::vector<ScopeMember> members,
            std::vector<size_t> query_subset);

    void seed_scans();
    void apply_pushdowns();
    void build_pairs();

    // Ensures the entry for `subset` (member indices, ascending) exists and
    // returns it.
    const PlanEntry& partition(const std::vector<int>& subset);

    // Runs every phase and returns the full-scope entry.
    const PlanEntry& optimize();

    const PlanMap& map() const { return map_; }
    PlanMap& map() { return map_; }
    const std::map<int, AdoptedPushdown>& pushdowns() const { return pushdowns_; }
    const PlanContext& context() const { return *ctx_; }
    const std::vector<ScopeMember>& members() const { return members_; }

    // Size-reduction divisor for joining two base-table sets, scoped to this
    // planner's queries; the DAG builder reuses it so node estimates match
    // map entries exactly.
    double divisor_between(const std::set<int>& left_real, const std::set<int>& right_real) const;

private:
    std::set<int> expand(const std::vector<int>& member_indices) const;
    std::vector<std::string> satisfied_for(const std::vector<std::string>& left,
                                           const std::vector<std::string>& right,
                                           const std::set<int>& subset_real) const;
    const QueryInfo& scoped_query(size_t i) const { return ctx_->query(scope_queries_[i]); }

    const PlanContext* ctx_;
    std::vector<ScopeMember> members_;           // sorted by index
    std::map<int, size_t> member_slot_;          // index -> position in members_
    std::vector<size_t> scope_queries_;          // positions into ctx queries
    PlanMap map_;
    std::map<int, AdoptedPushdown> pushdowns_;   // by base-table index
    bool seeded_ = false;
    bool pushed_ = false;
    bool paired_ = false;
};

}  // namespace mqp
