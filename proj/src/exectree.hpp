#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ast.hpp"
#include "planner.hpp"

namespace mqp {

enum class NodeKind { scan, select, join, project, distinct, sum, groupby, print };

const char* kind_name(NodeKind kind);

// One operator of the shared execution DAG.  Scans sit at the bottom; a
// select wraps a scan whose table carries shared filters; joins take a build
// input (left, hash side) and a probe input (right, always the side with the
// smaller estimate); project/distinct/sum/groupby/print form per-query exit
// chains on top.  Nodes are shared: a node may feed several parents.
struct DagNode {
    int id = 0;
    NodeKind kind = NodeKind::scan;
    std::string name;
    int table = -1;                    // scan / select: base table index
    std::vector<int> tables;           // base tables covered, ascending
    DagNode* left = nullptr;           // join: build input; unary ops: the child
    DagNode* right = nullptr;          // join: probe input
    std::vector<DagNode*> parents;
    double est_size = 0;
    int join_seq = 0;                  // joins: 1-based creation order
    std::vector<SelectionPredicate> filters;           // select
    std::vector<std::vector<JoinPredicate>> variants;  // join: per-query key sets
    std::vector<std::string> projection;               // project
    std::string sum_attribute;                         // sum / groupby
    std::string group_attribute;                       // groupby
    std::string query;                 // exit-chain ops: owning query
    std::string order_text;            // canonical join-order identity

    bool is_exit_op() const {
        return kind == NodeKind::project || kind == NodeKind::distinct ||
               kind == NodeKind::sum || kind == NodeKind::groupby ||
               kind == NodeKind::print;
    }
    std::set<int> table_set() const { return {tables.begin(), tables.end()}; }
};

// Renders a join-order subtree ignoring an outer view wrapper, so a nested
// sub-plan matches the node that was built for it.
std::string canonical_order(const JoinOrderNode& node);

// Attributes of `variant` that live on the side covering `tables`, one per
// predicate, in predicate order.
std::vector<std::string> side_keys(const std::vector<JoinPredicate>& variant,
                                   const std::set<int>& tables, const PlanContext& ctx);

// The shared execution DAG.  Join-order subtrees materialize into nodes once:
// a (table set, order rendering) registry makes later rounds reuse existing
// structure, which is how grafting shares work between queries.
class ExecDag {
public:
    explicit ExecDag(const PlanContext& ctx) : ctx_(&ctx) {}
    ExecDag(const ExecDag&) = delete;
    ExecDag& operator=(const ExecDag&) = delete;
    ExecDag(ExecDag&&) = default;
    ExecDag& operator=(ExecDag&&) = default;

    // Builds (or finds) the node for `order`.  New joins take their estimate
    // from their children and `round`'s divisors — the same recurrence the
    // planner used, so estimates equal the round's map sizes.  `scan_filters`
    // holds the batch-level shared scan filters (applied once, at the scan).
    DagNode* materialize(const JoinOrderPtr& order, const Planner& round,
                         const std::map<int, AdoptedPushdown>& scan_filters);

    // Appends a query's exit chain above `attach`: project, then distinct or
    // sum or group-by when the query aggregates, then print.  `classic_names`
    // drops the query suffix (single-exit plans name their top just "PRINT").
    // Returns the print node.
    DagNode* add_exit_chain(DagNode* attach, const std::string& query,
                            const SelectList& select, bool classic_names);

    // Registry lookup; null when the identity was never materialized.
    DagNode* find(const std::vector<int>& tables, const std::string& order_text) const;

    DagNode* scan_node(int table) const;
    const std::map<int, DagNode*>& scans() const { return scans_; }
    const std::vector<std::unique_ptr<DagNode>>& nodes() const { return nodes_; }
    const PlanContext& context() const { return *ctx_; }
    int join_count() const { return next_join_ - 1; }

    // One line per node, in creation order: name, kind, covered tables,
    // estimate, inputs, and operator payload.
    std::string explain() const;

private:
    DagNode* add_node(NodeKind kind, std::string name);

    const PlanContext* ctx_;
    std::vector<std::unique_ptr<DagNode>> nodes_;
    std::map<std::pair<std::string, std::string>, DagNode*> registry_;
    std::map<int, DagNode*> scans_;
    int next_join_ = 1;
};

}  // namespace mqp
