#include "planfiles.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "error.hpp"

namespace mqp {

namespace {

// One query's view of the shared DAG: the nodes below its exit, each node's
// unique parent within that subtree, and the names of the (invisible) exit
// chain above it.  A query's residual filters surface as an EXITSEL waypoint
// between the exit node and its PRINT.
struct Flow {
    const ExitPoint* exit = nullptr;
    std::set<const DagNode*> members;
    std::map<const DagNode*, const DagNode*> parent;
    std::string print_name;
    std::string above_exit;  // EXITSEL name when residual filters exist
    bool has_exitsel = false;
};

Flow flow_of(const ExitPoint& e) {
    Flow f;
    f.exit = &e;
    f.members.insert(e.node);
    std::vector<const DagNode*> stack{e.node};
    while (!stack.empty()) {
        const DagNode* n = stack.back();
        stack.pop_back();
        for (const DagNode* c : {n->left, n->right}) {
            if (!c) continue;
            if (f.members.insert(c).second) {
                f.parent[c] = n;
                stack.push_back(c);
            }
        }
    }
    f.print_name = e.print->name;
    f.has_exitsel = !e.residual_selections.empty();
    f.above_exit = f.has_exitsel ? "EXITSEL_" + e.query : f.print_name;
    return f;
}

// Visible waypoint names above `n` along the query's flow, nearest first and
// ending at the query's PRINT.
std::vector<std::string> names_above(const Flow& f, const DagNode* n) {
    std::vector<std::string> out;
    const DagNode* cur = n;
    while (cur != f.exit->node) {
        const DagNode* p = f.parent.at(cur);
        out.push_back(p->name);
        cur = p;
    }
    if (f.has_exitsel) out.push_back(f.above_exit);
    out.push_back(f.print_name);
    return out;
}

struct ModelState {
    const SharedPlan* plan = nullptr;
    const PlanContext* ctx = nullptr;
    std::vector<Flow> flows;  // batch query order
    std::vector<const DagNode*> scan_list;
    std::vector<const DagNode*> join_list;    // join_seq ascending
    std::vector<const DagNode*> select_list;  // name alphabetical
    std::map<std::string, int> table_index;   // batch index by table name
    bool extended = false;
};

ModelState make_state(const SharedPlan& plan) {
    ModelState s;
    s.plan = &plan;
    s.ctx = &plan.context();
    for (const ExitPoint& e : plan.exits()) {
        if (!e.satisfied())
            fail(ErrorKind::plan, "query '" + e.query + "' has no exit node yet");
        if (e.projection.aggregate != Aggregate::none)
            fail(ErrorKind::plan, "query '" + e.query +
                                      "' aggregates its result; plan files cover plain "
                                      "select-project queries only");
        s.flows.push_back(flow_of(e));
    }
    std::set<const DagNode*> seen;
    for (const Flow& f : s.flows) {
        for (const DagNode* n : f.members) {
            if (!seen.insert(n).second) continue;
            switch (n->kind) {
                case NodeKind::scan: s.scan_list.push_back(n); break;
                case NodeKind::select: s.select_list.push_back(n); break;
                case NodeKind::join: s.join_list.push_back(n); break;
                default:
                    fail(ErrorKind::plan, "internal: exit operator '" + n->name +
                                              "' inside a query subtree");
            }
        }
    }
    for (const DagNode* j : s.join_list) {
        if (j->variants.empty())
            fail(ErrorKind::plan, "join '" + j->name +
                                      "' has no linking predicate; plan files cannot "
                                      "express a cross product");
        if (j->variants.size() > 1)
            fail(ErrorKind::plan, "join '" + j->name + "' carries " +
                                      std::to_string(j->variants.size()) +
                                      " candidate key sets; plan files require a single "
                                      "hash key per join");
    }
    std::sort(s.scan_list.begin(), s.scan_list.end(),
              [&](const DagNode* a, const DagNode* b) {
                  return s.ctx->table_name(a->table) < s.ctx->table_name(b->table);
              });
    std::sort(s.join_list.begin(), s.join_list.end(),
              [](const DagNode* a, const DagNode* b) { return a->join_seq < b->join_seq; });
    std::sort(s.select_list.begin(), s.select_list.end(),
              [](const DagNode* a, const DagNode* b) { return a->name < b->name; });
    for (int t = 0; t < s.ctx->table_count(); ++t) s.table_index[s.ctx->table_name(t)] = t;
    s.extended = !plan.classic_names();
    return s;
}

int owner_index(const ModelState& s, const std::string& attr) {
    auto table = s.ctx->catalog().table_of(attr);
    if (!table) return -1;
    auto it = s.table_index.find(*table);
    return it == s.table_index.end() ? -1 : it->second;
}

int column_index(const ModelState& s, int table, const std::string& attr) {
    const TableStats& stats = s.ctx->catalog().table(s.ctx->table_name(table));
    for (size_t i = 0; i < stats.attributes.size(); ++i)
        if (stats.attributes[i].name == attr) return static_cast<int>(i);
    return static_cast<int>(stats.attributes.size());
}

// Columns of table `t` that query `qi` touches anywhere: filters, join keys,
// or its print list.
std::set<std::string> referenced_on(const ModelState& s, size_t qi, int t) {
    const QueryInfo& q = s.ctx->query(qi);
    std::set<std::string> out;
    auto sel = q.selections.find(t);
    if (sel != q.selections.end())
        for (const SelectionPredicate& p : sel->second) out.insert(p.attribute);
    for (const QueryInfo::JoinRef& jr : q.joins) {
        if (jr.left_index == t) out.insert(jr.predicate.left_attribute);
        if (jr.right_index == t) out.insert(jr.predicate.right_attribute);
    }
    for (const std::string& a : s.flows[qi].exit->projection.attributes)
        if (owner_index(s, a) == t) out.insert(a);
    return out;
}

// Deterministic column order: batch table position first, then the table's
// declared column order.
std::vector<std::string> ordered_attrs(const ModelState& s, const std::set<std::string>& attrs) {
    std::vector<std::string> out(attrs.begin(), attrs.end());
    std::sort(out.begin(), out.end(), [&](const std::string& a, const std::string& b) {
        int ta = owner_index(s, a), tb = owner_index(s, b);
        if (ta != tb) return ta < tb;
        return column_index(s, ta, a) < column_index(s, tb, b);
    });
    return out;
}

// Columns `qi` still needs strictly above join `n`: keys consumed by ancestor
// joins from the stream rising out of `n`, residual filters, and the print
// list.
std::set<std::string> needed_above(const ModelState& s, size_t qi, const DagNode* n) {
    const Flow& f = s.flows[qi];
    std::set<std::string> out;
    const DagNode* cur = n;
    while (cur != f.exit->node) {
        const DagNode* p = f.parent.at(cur);
        if (p->kind == NodeKind::join)
            for (const std::string& k : side_keys(p->variants[0], cur->table_set(), *s.ctx))
                out.insert(k);
        cur = p;
    }
    for (const SelectionPredicate& sp : f.exit->residual_selections) out.insert(sp.attribute);
    for (const std::string& a : f.exit->projection.attributes) out.insert(a);
    return out;
}

std::vector<std::string> pass_through(const ModelState& s, size_t qi, const DagNode* side,
                                      const std::set<std::string>& needed) {
    std::set<std::string> keep;
    for (const std::string& a : needed) {
        int t = owner_index(s, a);
        if (t >= 0 && std::binary_search(side->tables.begin(), side->tables.end(), t))
            keep.insert(a);
    }
    return ordered_attrs(s, keep);
}

std::string render_filter(const SelectionPredicate& p) {
    return "val(" + p.attribute + ") " + op_text(p.op) + " " + p.lexeme;
}

// Waypoint identity shared by both files; `node` is null for the virtual
// exit-chain waypoints (PRINT_<q> / EXITSEL_<q>).
struct NamedWp {
    enum Tag { print, join, select, exitsel };
    Tag tag;
    std::string name;
    const DagNode* node = nullptr;
    const Flow* flow = nullptr;
};

std::vector<NamedWp> waypoint_order(const ModelState& s, bool joins_descending) {
    std::vector<NamedWp> out;
    for (const Flow& f : s.flows)
        out.push_back({NamedWp::print, f.print_name, f.exit->print, &f});
    std::vector<const DagNode*> joins = s.join_list;
    if (joins_descending) std::reverse(joins.begin(), joins.end());
    for (const DagNode* j : joins) out.push_back({NamedWp::join, j->name, j, nullptr});
    for (const DagNode* sel : s.select_list)
        out.push_back({NamedWp::select, sel->name, sel, nullptr});
    for (const Flow& f : s.flows)
        if (f.has_exitsel) out.push_back({NamedWp::exitsel, f.above_exit, nullptr, &f});
    return out;
}

// Outgoing links of a structural node under one query: terminal when the node
// feeds a join's probe input or the query's exit, regular otherwise.
void collect_links(const ModelState& s, const DagNode* n,
                   std::vector<std::pair<std::string, std::string>>& terminal,
                   std::vector<std::string>& regular) {
    std::vector<const DagNode*> regs;
    for (const Flow& f : s.flows) {
        if (!f.members.count(n)) continue;
        if (n == f.exit->node) {
            terminal.push_back({f.exit->query, f.above_exit});
            continue;
        }
        const DagNode* p = f.parent.at(n);
        if (p->kind == NodeKind::join && p->right == n)
            terminal.push_back({f.exit->query, p->name});
        else
            regs.push_back(p);
    }
    std::sort(regs.begin(), regs.end(),
              [](const DagNode* a, const DagNode* b) { return a->id < b->id; });
    regs.erase(std::unique(regs.begin(), regs.end()), regs.end());
    for (const DagNode* p : regs) regular.push_back(p->name);
}

}  // namespace

GraphDoc graph_model(const SharedPlan& plan) {
    const ModelState s = make_state(plan);
    GraphDoc doc;
    doc.extended = s.extended;
    for (const DagNode* sc : s.scan_list) doc.tables.push_back(s.ctx->table_name(sc->table));
    for (const NamedWp& w : waypoint_order(s, false)) doc.waypoints.push_back(w.name);
    for (const Flow& f : s.flows) doc.queries.push_back(f.exit->query);

    for (const DagNode* sc : s.scan_list) {
        GraphLeaf leaf;
        leaf.table = s.ctx->table_name(sc->table);
        for (const Flow& f : s.flows) {
            if (!f.members.count(sc)) continue;
            const std::vector<std::string> chain = names_above(f, sc);
            leaf.destinations.push_back(
                {f.exit->query, chain.size() > 1 ? chain[1] : chain[0]});
        }
        collect_links(s, sc, leaf.terminal_links, leaf.regular_links);
        doc.leaves.push_back(std::move(leaf));
    }

    for (const NamedWp& w : waypoint_order(s, false)) {
        GraphNode node;
        node.name = w.name;
        switch (w.tag) {
            case NamedWp::print:
                break;  // the flow's top: no outgoing links
            case NamedWp::exitsel:
                node.terminal_links.push_back({w.flow->exit->query, w.flow->print_name});
                break;
            default:
                collect_links(s, w.node, node.terminal_links, node.regular_links);
        }
        doc.nodes.push_back(std::move(node));
    }
    return doc;
}

WaypointDoc waypoint_model(const SharedPlan& plan) {
    const ModelState s = make_state(plan);
    WaypointDoc doc;
    doc.extended = s.extended;

    std::vector<std::pair<int, const DagNode*>> by_depth;  // (flow distance, scan)
    for (const DagNode* sc : s.scan_list) {
        int depth = 0;
        for (const Flow& f : s.flows)
            if (f.members.count(sc)) {
                const int d = static_cast<int>(names_above(f, sc).size());
                if (depth == 0 || d < depth) depth = d;
            }
        by_depth.push_back({depth, sc});
    }
    std::stable_sort(by_depth.begin(), by_depth.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    for (const auto& [depth, sc] : by_depth) {
        (void)depth;
        ScanBlock block;
        block.table = s.ctx->table_name(sc->table);
        for (size_t qi = 0; qi < s.flows.size(); ++qi) {
            const Flow& f = s.flows[qi];
            if (!f.members.count(sc)) continue;
            const std::vector<std::string> chain = names_above(f, sc);
            ScanRequirement req;
            req.query = f.exit->query;
            req.destination = chain.size() > 1 ? chain[1] : chain[0];
            req.attributes =
                ordered_attrs(s, referenced_on(s, qi, sc->table));
            block.requirements.push_back(std::move(req));
        }
        doc.scans.push_back(std::move(block));
    }

    for (const NamedWp& w : waypoint_order(s, true)) {
        WaypointBlock block;
        block.name = w.name;
        switch (w.tag) {
            case NamedWp::print: {
                block.kind = "print";
                block.prints.push_back(
                    {w.flow->exit->query, w.flow->exit->projection.attributes});
                break;
            }
            case NamedWp::join: {
                block.kind = "join";
                const DagNode* n = w.node;
                block.hash_keys = side_keys(n->variants[0], n->left->table_set(), *s.ctx);
                for (size_t qi = 0; qi < s.flows.size(); ++qi) {
                    const Flow& f = s.flows[qi];
                    if (!f.members.count(n)) continue;
                    const std::set<std::string> needed = needed_above(s, qi, n);
                    WaypointBlock::JoinLine line;
                    line.query = f.exit->query;
                    line.build_pass = pass_through(s, qi, n->left, needed);
                    line.probe_keys = side_keys(n->variants[0], n->right->table_set(), *s.ctx);
                    line.probe_pass = pass_through(s, qi, n->right, needed);
                    block.joins.push_back(std::move(line));
                }
                break;
            }
            case NamedWp::select: {
                block.kind = "selection";
                std::vector<std::string> preds;
                for (const SelectionPredicate& p : w.node->filters)
                    preds.push_back(render_filter(p));
                for (const Flow& f : s.flows)
                    if (f.members.count(w.node))
                        block.selections.push_back({f.exit->query, preds});
                break;
            }
            case NamedWp::exitsel: {
                block.kind = "selection";
                std::vector<std::string> preds;
                for (const SelectionPredicate& p : w.flow->exit->residual_selections)
                    preds.push_back(render_filter(p));
                block.selections.push_back({w.flow->exit->query, std::move(preds)});
                break;
            }
        }
        doc.waypoints.push_back(std::move(block));
    }
    return doc;
}

namespace {

constexpr const char* kExtensionHeader = "# extended plan: per-query exits";

void append_tokens(std::ostringstream& out, const std::vector<std::string>& items) {
    for (const std::string& it : items) out << ' ' << it;
}

std::string join_list(const std::vector<std::string>& items, const char* sep) {
    std::string out;
    for (size_t i = 0; i < items.size(); ++i) {
        if (i) out += sep;
        out += items[i];
    }
    return out;
}

}  // namespace

std::string render_graph(const GraphDoc& doc) {
    std::ostringstream out;
    if (doc.extended) out << kExtensionHeader << '\n';
    out << doc.tables.size() << " TableScans";
    append_tokens(out, doc.tables);
    out << '\n' << doc.waypoints.size() << " WayPoints";
    append_tokens(out, doc.waypoints);
    out << '\n' << doc.queries.size() << " Queries";
    append_tokens(out, doc.queries);
    out << '\n' << doc.leaves.size() << " Leaves";
    bool first = true;
    for (const GraphLeaf& l : doc.leaves) {
        out << (first ? " " : "");
        first = false;
        out << l.table << ' ' << l.destinations.size() << " Queries";
        for (const auto& [q, d] : l.destinations) out << ' ' << q << ' ' << d;
        out << ' ' << l.terminal_links.size() << " TerminalLinks";
        for (const auto& [q, t] : l.terminal_links) out << ' ' << q << ' ' << t;
        out << ' ' << l.regular_links.size() << " RegularLinks";
        append_tokens(out, l.regular_links);
        out << '\n';
    }
    out << doc.nodes.size() << " Nodes";
    first = true;
    for (const GraphNode& n : doc.nodes) {
        out << (first ? " " : "");
        first = false;
        out << n.name << ' ' << n.terminal_links.size() << " TerminalLinks";
        for (const auto& [q, t] : n.terminal_links) out << ' ' << q << ' ' << t;
        out << ' ' << n.regular_links.size() << " RegularLinks";
        append_tokens(out, n.regular_links);
        out << '\n';
    }
    return out.str();
}

std::string render_waypoint(const WaypointDoc& doc) {
    std::ostringstream out;
    if (doc.extended) out << kExtensionHeader << '\n';
    out << doc.scans.size() << " TableScans\n";
    for (const ScanBlock& sb : doc.scans) {
        out << sb.table << ' ' << sb.requirements.size() << '\n';
        for (const ScanRequirement& r : sb.requirements) {
            out << r.query << ' ' << r.destination << ' ' << r.attributes.size();
            append_tokens(out, r.attributes);
            out << " 0\n";
        }
    }
    out << doc.waypoints.size() << " WayPoints\n";
    for (const WaypointBlock& wb : doc.waypoints) {
        const size_t lines = wb.prints.size() + wb.joins.size() + wb.selections.size() +
                             (wb.kind == "join" || wb.kind == "selection" ? 1 : 0);
        out << wb.name << ' ' << wb.kind << ' ' << lines << '\n';
        if (wb.kind == "join")
            out << "lefthash string " << join_list(wb.hash_keys, " ") << "$\n";
        if (wb.kind == "selection") out << "Drop string $\n";
        for (const auto& p : wb.prints) {
            std::vector<std::string> vals;
            for (const std::string& a : p.attributes) vals.push_back("val(" + a + ")");
            out << p.query << " printList (" << join_list(vals, ", ") << ")$\n";
        }
        for (const auto& j : wb.joins) {
            out << j.query << " join (" << join_list(j.build_pass, ", ") << "), (("
                << join_list(j.probe_keys, ", ") << "),(" << join_list(j.probe_pass, ", ")
                << "))$\n";
        }
        for (const auto& sel : wb.selections) {
            std::vector<std::string> wrapped;
            for (const std::string& p : sel.predicates) wrapped.push_back("(" + p + ")");
            out << sel.query << " selection (" << join_list(wrapped, " && ") << ")$\n";
        }
    }
    return out.str();
}

std::string emit_graph(const SharedPlan& plan) { return render_graph(graph_model(plan)); }

std::string emit_waypoint(const SharedPlan& plan) {
    return render_waypoint(waypoint_model(plan));
}

namespace {

[[noreturn]] void bad_file(const std::string& what) {
    fail(ErrorKind::plan, "plan file: " + what);
}

// Sequential token cursor over a whole document; newlines carry no meaning in
// the graph grammar, so parsing is count-driven.
struct TokenCursor {
    std::vector<std::string> tokens;
    size_t pos = 0;

    std::string next(const char* what) {
        if (pos >= tokens.size()) bad_file(std::string("unexpected end, wanted ") + what);
        return tokens[pos++];
    }
    size_t next_count(const char* what) {
        const std::string t = next(what);
        try {
            size_t idx = 0;
            const long v = std::stol(t, &idx);
            if (idx != t.size() || v < 0) throw std::invalid_argument(t);
            return static_cast<size_t>(v);
        } catch (const std::exception&) {
            bad_file("expected a count for " + std::string(what) + ", got '" + t + "'");
        }
    }
    void expect(const char* word) {
        const std::string t = next(word);
        if (t != word) bad_file("expected '" + std::string(word) + "', got '" + t + "'");
    }
    bool done() const { return pos == tokens.size(); }
};

// Splits text into lines, recording and stripping extension-header comments.
std::vector<std::string> clean_lines(const std::string& text, bool& extended) {
    extended = false;
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const size_t at = line.find_first_not_of(" \t");
        if (at == std::string::npos) continue;
        if (line[at] == '#') {
            extended = true;
            continue;
        }
        out.push_back(line.substr(at));
    }
    return out;
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string t;
    while (in >> t) out.push_back(t);
    return out;
}

// Index just past the group opened at `open` (text[open] must be '(').
size_t match_paren(const std::string& text, size_t open) {
    int depth = 0;
    for (size_t i = open; i < text.size(); ++i) {
        if (text[i] == '(') ++depth;
        if (text[i] == ')' && --depth == 0) return i + 1;
    }
    bad_file("unbalanced parentheses in '" + text + "'");
}

// Splits "a, b, c" at top level; "" yields an empty list.
std::vector<std::string> split_items(const std::string& body) {
    std::vector<std::string> out;
    int depth = 0;
    std::string cur;
    for (const char c : body) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == ',' && depth == 0) {
            out.push_back(cur);
            cur.clear();
            continue;
        }
        cur += c;
    }
    if (!cur.empty()) out.push_back(cur);
    for (std::string& s : out) {
        const size_t a = s.find_first_not_of(' ');
        const size_t b = s.find_last_not_of(' ');
        s = (a == std::string::npos) ? "" : s.substr(a, b - a + 1);
    }
    return out;
}

// Parses "(x, y)" starting at `pos`; returns the items and advances `pos`
// just past the group.
std::vector<std::string> parse_group(const std::string& text, size_t& pos) {
    pos = text.find('(', pos);
    if (pos == std::string::npos) bad_file("expected '(' in '" + text + "'");
    const size_t end = match_paren(text, pos);
    const std::string body = text.substr(pos + 1, end - pos - 2);
    pos = end;
    return split_items(body);
}

std::string strip_terminator(const std::string& payload) {
    if (payload.empty() || payload.back() != '$')
        bad_file("payload missing '$' terminator: '" + payload + "'");
    return payload.substr(0, payload.size() - 1);
}

size_t parse_count(const std::string& token) {
    try {
        size_t idx = 0;
        const long v = std::stol(token, &idx);
        if (idx != token.size() || v < 0) throw std::invalid_argument(token);
        return static_cast<size_t>(v);
    } catch (const std::exception&) {
        bad_file("expected a count, got '" + token + "'");
    }
}

std::string unwrap_val(const std::string& item) {
    if (item.rfind("val(", 0) == 0 && item.back() == ')')
        return item.substr(4, item.size() - 5);
    bad_file("expected val(<attr>), got '" + item + "'");
}

}  // namespace

GraphDoc read_graph(const std::string& text) {
    GraphDoc doc;
    TokenCursor cur;
    for (const std::string& line : clean_lines(text, doc.extended))
        for (std::string& t : split_ws(line)) cur.tokens.push_back(std::move(t));

    const size_t tables = cur.next_count("TableScans");
    cur.expect("TableScans");
    for (size_t i = 0; i < tables; ++i) doc.tables.push_back(cur.next("table name"));

    const size_t waypoints = cur.next_count("WayPoints");
    cur.expect("WayPoints");
    for (size_t i = 0; i < waypoints; ++i) doc.waypoints.push_back(cur.next("waypoint name"));

    const size_t queries = cur.next_count("Queries");
    cur.expect("Queries");
    for (size_t i = 0; i < queries; ++i) doc.queries.push_back(cur.next("query name"));

    if (cur.next_count("Leaves") != tables) bad_file("leaf count differs from TableScans");
    cur.expect("Leaves");
    for (size_t i = 0; i < tables; ++i) {
        GraphLeaf leaf;
        leaf.table = cur.next("leaf table");
        const size_t dests = cur.next_count("leaf Queries");
        cur.expect("Queries");
        for (size_t k = 0; k < dests; ++k) {
            const std::string q = cur.next("query");
            leaf.destinations.push_back({q, cur.next("destination")});
        }
        const size_t terms = cur.next_count("TerminalLinks");
        cur.expect("TerminalLinks");
        for (size_t k = 0; k < terms; ++k) {
            const std::string q = cur.next("query");
            leaf.terminal_links.push_back({q, cur.next("target")});
        }
        const size_t regs = cur.next_count("RegularLinks");
        cur.expect("RegularLinks");
        for (size_t k = 0; k < regs; ++k) leaf.regular_links.push_back(cur.next("target"));
        doc.leaves.push_back(std::move(leaf));
    }

    if (cur.next_count("Nodes") != waypoints) bad_file("node count differs from WayPoints");
    cur.expect("Nodes");
    for (size_t i = 0; i < waypoints; ++i) {
        GraphNode node;
        node.name = cur.next("node name");
        const size_t terms = cur.next_count("TerminalLinks");
        cur.expect("TerminalLinks");
        for (size_t k = 0; k < terms; ++k) {
            const std::string q = cur.next("query");
            node.terminal_links.push_back({q, cur.next("target")});
        }
        const size_t regs = cur.next_count("RegularLinks");
        cur.expect("RegularLinks");
        for (size_t k = 0; k < regs; ++k) node.regular_links.push_back(cur.next("target"));
        doc.nodes.push_back(std::move(node));
    }
    if (!cur.done()) bad_file("trailing tokens after Nodes section");
    return doc;
}

WaypointDoc read_waypoint(const std::string& text) {
    WaypointDoc doc;
    const std::vector<std::string> lines = clean_lines(text, doc.extended);
    size_t at = 0;
    auto next_line = [&](const char* what) -> std::string {
        if (at >= lines.size()) bad_file(std::string("unexpected end, wanted ") + what);
        return lines[at++];
    };

    {
        const std::vector<std::string> head = split_ws(next_line("TableScans header"));
        if (head.size() != 2 || head[1] != "TableScans")
            bad_file("expected '<n> TableScans' header");
        const size_t scans = parse_count(head[0]);
        for (size_t i = 0; i < scans; ++i) {
            const std::vector<std::string> sh = split_ws(next_line("scan header"));
            if (sh.size() != 2) bad_file("expected '<table> <count>' scan header");
            ScanBlock block;
            block.table = sh[0];
            const size_t reqs = parse_count(sh[1]);
            for (size_t k = 0; k < reqs; ++k) {
                const std::vector<std::string> t = split_ws(next_line("scan requirement"));
                if (t.size() < 4 || t.back() != "0")
                    bad_file("malformed scan requirement line");
                ScanRequirement req;
                req.query = t[0];
                req.destination = t[1];
                const size_t n = parse_count(t[2]);
                if (t.size() != n + 4) bad_file("scan attribute count mismatch");
                for (size_t a = 0; a < n; ++a) req.attributes.push_back(t[3 + a]);
                block.requirements.push_back(std::move(req));
            }
            doc.scans.push_back(std::move(block));
        }
    }

    const std::vector<std::string> head = split_ws(next_line("WayPoints header"));
    if (head.size() != 2 || head[1] != "WayPoints") bad_file("expected '<n> WayPoints' header");
    const size_t count = parse_count(head[0]);
    for (size_t i = 0; i < count; ++i) {
        const std::vector<std::string> bh = split_ws(next_line("waypoint header"));
        if (bh.size() != 3) bad_file("expected '<name> <kind> <lines>' waypoint header");
        WaypointBlock block;
        block.name = bh[0];
        block.kind = bh[1];
        size_t body = parse_count(bh[2]);
        if (block.kind == "join") {
            const std::string lh = strip_terminator(next_line("lefthash"));
            const std::vector<std::string> t = split_ws(lh);
            if (t.size() < 2 || t[0] != "lefthash" || t[1] != "string")
                bad_file("expected 'lefthash string <keys>$'");
            block.hash_keys.assign(t.begin() + 2, t.end());
            --body;
        } else if (block.kind == "selection") {
            const std::vector<std::string> dt = split_ws(strip_terminator(next_line("Drop")));
            if (dt != std::vector<std::string>{"Drop", "string"})
                bad_file("expected 'Drop string $'");
            --body;
        } else if (block.kind != "print") {
            bad_file("unknown waypoint kind '" + block.kind + "'");
        }
        for (size_t k = 0; k < body; ++k) {
            const std::string line = strip_terminator(next_line("waypoint payload"));
            std::istringstream in(line);
            std::string query, verb;
            in >> query >> verb;
            std::string rest;
            std::getline(in, rest);
            if (block.kind == "print") {
                if (verb != "printList") bad_file("expected printList payload");
                size_t pos = 0;
                WaypointBlock::PrintLine p;
                p.query = query;
                for (const std::string& item : parse_group(rest, pos))
                    p.attributes.push_back(unwrap_val(item));
                block.prints.push_back(std::move(p));
            } else if (block.kind == "join") {
                if (verb != "join") bad_file("expected join payload");
                WaypointBlock::JoinLine j;
                j.query = query;
                size_t pos = 0;
                j.build_pass = parse_group(rest, pos);
                const size_t outer = rest.find('(', pos);
                if (outer == std::string::npos) bad_file("join payload missing probe group");
                const size_t outer_end = match_paren(rest, outer);
                const std::string inner = rest.substr(outer + 1, outer_end - outer - 2);
                size_t ipos = 0;
                j.probe_keys = parse_group(inner, ipos);
                j.probe_pass = parse_group(inner, ipos);
                block.joins.push_back(std::move(j));
            } else {
                if (verb != "selection") bad_file("expected selection payload");
                const size_t open = rest.find('(');
                if (open == std::string::npos) bad_file("selection payload missing '('");
                const size_t end = match_paren(rest, open);
                const std::string body_text = rest.substr(open + 1, end - open - 2);
                WaypointBlock::SelectLine sel;
                sel.query = query;
                // "(p1) && (p2)": strip one paren layer per predicate.
                int depth = 0;
                std::string cur;
                for (const char c : body_text) {
                    if (c == '(' && depth++ == 0) continue;
                    if (c == ')' && --depth == 0) {
                        sel.predicates.push_back(cur);
                        cur.clear();
                        continue;
                    }
                    if (depth > 0) cur += c;
                }
                block.selections.push_back(std::move(sel));
            }
        }
        doc.waypoints.push_back(std::move(block));
    }
    if (at != lines.size()) bad_file("trailing lines after WayPoints section");
    return doc;
}

std::pair<std::string, std::string> write_plan_files(const SharedPlan& plan,
                                                     const std::string& dir,
                                                     const std::string& name) {
    const std::string graph = emit_graph(plan);
    const std::string waypoint = emit_waypoint(plan);
    std::filesystem::create_directories(dir);
    const std::filesystem::path base = std::filesystem::path(dir) / name;
    const std::string gpath = base.string() + ".graph";
    const std::string wpath = base.string() + ".waypoint";
    std::ofstream gout(gpath);
    gout << graph;
    if (!gout) fail(ErrorKind::exec, "cannot write '" + gpath + "'");
    std::ofstream wout(wpath);
    wout << waypoint;
    if (!wout) fail(ErrorKind::exec, "cannot write '" + wpath + "'");
    return {gpath, wpath};
}

}  // namespace mqp
