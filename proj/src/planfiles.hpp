#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mqo.hpp"

namespace mqp {

// Structured form of the two plan files an optimized batch emits: a graph
// file describing the dataflow network (scans, waypoints, terminal/regular
// links) and a waypoint file carrying each waypoint's per-query configuration
// (scan attribute lists, hash keys, pass-through columns, predicates).
//
// Terminal links follow the streamed side of the flow: a node reaching a
// join's probe input, or a node feeding a query's exit.  Regular links feed
// hash builds and shared-scan filters.  Exit chains are invisible except for
// their PRINT waypoint; a query with leftover per-query filters additionally
// owns an EXITSEL waypoint between its exit node and its PRINT.  Plans whose
// exits aggregate (DISTINCT/SUM) or whose joins carry more than one key set
// have no file form and are rejected.

struct GraphLeaf {
    std::string table;
    // Per query using the scan: the waypoint two visible steps downstream
    // (the parent of the scan's immediate consumer).
    std::vector<std::pair<std::string, std::string>> destinations;
    std::vector<std::pair<std::string, std::string>> terminal_links;  // (query, target)
    std::vector<std::string> regular_links;

    bool operator==(const GraphLeaf&) const = default;
};

struct GraphNode {
    std::string name;
    std::vector<std::pair<std::string, std::string>> terminal_links;  // (query, target)
    std::vector<std::string> regular_links;

    bool operator==(const GraphNode&) const = default;
};

struct GraphDoc {
    bool extended = false;  // multi-exit / residual-filter extension in use
    std::vector<std::string> tables;     // alphabetical
    std::vector<std::string> waypoints;  // PRINTs, JOINs ascending, SELECTs, EXITSELs
    std::vector<std::string> queries;    // batch order
    std::vector<GraphLeaf> leaves;       // alphabetical by table
    std::vector<GraphNode> nodes;        // same order as `waypoints`

    bool operator==(const GraphDoc&) const = default;
};

struct ScanRequirement {
    std::string query;
    std::string destination;              // same waypoint as the graph leaf pair
    std::vector<std::string> attributes;  // referenced columns, catalog order

    bool operator==(const ScanRequirement&) const = default;
};

struct ScanBlock {
    std::string table;
    std::vector<ScanRequirement> requirements;  // batch query order

    bool operator==(const ScanBlock&) const = default;
};

struct WaypointBlock {
    struct PrintLine {
        std::string query;
        std::vector<std::string> attributes;  // select-list order
        bool operator==(const PrintLine&) const = default;
    };
    struct JoinLine {
        std::string query;
        std::vector<std::string> build_pass;  // hashed-stream columns kept for above
        std::vector<std::string> probe_keys;  // probe-side key columns
        std::vector<std::string> probe_pass;  // probe-stream columns kept for above
        bool operator==(const JoinLine&) const = default;
    };
    struct SelectLine {
        std::string query;
        std::vector<std::string> predicates;  // rendered "val(attr) op literal"
        bool operator==(const SelectLine&) const = default;
    };

    std::string name;
    std::string kind;                    // "print" | "join" | "selection"
    std::vector<std::string> hash_keys;  // join only: build-side key columns
    std::vector<PrintLine> prints;
    std::vector<JoinLine> joins;
    std::vector<SelectLine> selections;

    bool operator==(const WaypointBlock&) const = default;
};

struct WaypointDoc {
    bool extended = false;
    std::vector<ScanBlock> scans;  // ascending distance to their nearest PRINT
    std::vector<WaypointBlock> waypoints;  // PRINTs, JOINs descending, SELECTs, EXITSELs

    bool operator==(const WaypointDoc&) const = default;
};

// Model builders.  Both throw Error(kind=plan) when the plan has no file
// form: an exit that aggregates, or a join with zero or several key sets.
GraphDoc graph_model(const SharedPlan& plan);
WaypointDoc waypoint_model(const SharedPlan& plan);

// Text renderers and their inverses.  Readers accept any whitespace-
// normalized variant of the rendered form and throw Error(kind=plan) on
// malformed input; read_graph(render_graph(d)) == d and likewise for the
// waypoint pair.
std::string render_graph(const GraphDoc& doc);
std::string render_waypoint(const WaypointDoc& doc);
GraphDoc read_graph(const std::string& text);
WaypointDoc read_waypoint(const std::string& text);

// Convenience: model + render in one step.
std::string emit_graph(const SharedPlan& plan);
std::string emit_waypoint(const SharedPlan& plan);

// Writes <name>.graph and <name>.waypoint under `dir` (created if missing)
// and returns the two paths.
std::pair<std::string, std::string> write_plan_files(const SharedPlan& plan,
                                                     const std::string& dir,
                                                     const std::string& name);

}  // namespace mqp
