#include "exectree.hpp"

#include "error.hpp"
#include "estimator.hpp"
#include "textutil.hpp"

namespace mqp {

const char* kind_name(NodeKind kind) {
    switch (kind) {
        case NodeKind::scan: return "scan";
        case NodeKind::select: return "select";
        case NodeKind::join: return "join";
        case NodeKind::project: return "project";
        case NodeKind::distinct: return "distinct";
        case NodeKind::sum: return "sum";
        case NodeKind::groupby: return "groupby";
        case NodeKind::print: return "print";
    }
    return "?";
}

std::string canonical_order(const JoinOrderNode& node) {
    if (!node.wrapped) return render_order(node);
    JoinOrderNode inner = node;
    inner.wrapped = false;
    return render_order(inner);
}

std::vector<std::string> side_keys(const std::vector<JoinPredicate>& variant,
                                   const std::set<int>& tables, const PlanContext& ctx) {
    std::vector<std::string> keys;
    for (const auto& p : variant) {
        int left_index = -1;
        for (int i = 0; i < ctx.table_count(); ++i)
            if (ctx.table_name(i) == p.left_table) left_index = i;
        keys.push_back(tables.count(left_index) ? p.left_attribute : p.right_attribute);
    }
    return keys;
}

DagNode* ExecDag::add_node(NodeKind kind, std::string name) {
    auto node = std::make_unique<DagNode>();
    node->id = static_cast<int>(nodes_.size());
    node->kind = kind;
    node->name = std::move(name);
    nodes_.push_back(std::move(node));
    return nodes_.back().get();
}

DagNode* ExecDag::find(const std::vector<int>& tables, const std::string& order_text) const {
    auto it = registry_.find({key_of(tables), order_text});
    return it == registry_.end() ? nullptr : it->second;
}

DagNode* ExecDag::scan_node(int table) const {
    auto it = scans_.find(table);
    return it == scans_.end() ? nullptr : it->second;
}

DagNode* ExecDag::materialize(const JoinOrderPtr& order, const Planner& round,
                              const std::map<int, AdoptedPushdown>& scan_filters) {
    const JoinOrderNode& n = *order;
    const std::string canon = canonical_order(n);
    const std::string tkey = key_of(n.tables);
    if (auto it = registry_.find({tkey, canon}); it != registry_.end()) return it->second;

    if (n.is_leaf()) {
        const int t = n.table;
        const std::string& table = ctx_->table_name(t);
        const auto filter = scan_filters.find(t);
        DagNode* scan = scan_node(t);
        if (!scan) {
            scan = add_node(NodeKind::scan, table);
            scan->table = t;
            scan->tables = {t};
            scan->order_text = std::string(1, index_char(t));
            scan->est_size = (filter != scan_filters.end() && filter->second.predicates.empty())
                                 ? filter->second.size
                                 : ctx_->catalog().cardinality(table);
            scans_[t] = scan;
        }
        DagNode* handle = scan;
        if (filter != scan_filters.end() && !filter->second.predicates.empty()) {
            DagNode* sel = add_node(NodeKind::select, "SELECT" + table);
            sel->table = t;
            sel->tables = {t};
            sel->order_text = scan->order_text;
            sel->est_size = filter->second.size;
            sel->filters = filter->second.predicates;
            sel->left = scan;
            scan->parents.push_back(sel);
            handle = sel;
        }
        registry_[{tkey, canon}] = handle;
        return handle;
    }

    if (n.wrapped)
        fail(ErrorKind::plan,
             "internal: nested sub-plan " + canon + " was never materialized");

    DagNode* a = materialize(n.left, round, scan_filters);
    DagNode* b = materialize(n.right, round, scan_filters);
    // The smaller estimated side probes (right); ties keep the order's sides.
    DagNode* build = a;
    DagNode* probe = b;
    if (b->est_size > a->est_size) std::swap(build, probe);

    DagNode* join = add_node(NodeKind::join, "JOIN" + std::to_string(next_join_));
    join->join_seq = next_join_++;
    join->tables = n.tables;
    join->order_text = canon;
    join->left = build;
    join->right = probe;
    build->parents.push_back(join);
    probe->parents.push_back(join);
    join->variants = ctx_->predicate_variants(build->table_set(), probe->table_set());
    join->est_size = join_size(build->est_size, probe->est_size,
                               round.divisor_between(build->table_set(), probe->table_set()));
    registry_[{tkey, canon}] = join;
    return join;
}

DagNode* ExecDag::add_exit_chain(DagNode* attach, const std::string& query,
                                 const SelectList& select, bool classic_names) {
    const std::string suffix = classic_names ? "" : "_" + query;
    auto stack = [&](NodeKind kind, const std::string& base, DagNode* below) {
        DagNode* node = add_node(kind, base + suffix);
        node->tables = below->tables;
        node->est_size = below->est_size;
        node->query = query;
        node->left = below;
        below->parents.push_back(node);
        return node;
    };
    DagNode* proj = stack(NodeKind::project, "PROJECT", attach);
    proj->projection = select.attributes;
    DagNode* top = proj;
    switch (select.aggregate) {
        case Aggregate::none:
            break;
        case Aggregate::distinct:
            top = stack(NodeKind::distinct, "DISTINCT", top);
            break;
        case Aggregate::sum:
            if (select.group_attribute.empty()) {
                top = stack(NodeKind::sum, "SUM", top);
                top->sum_attribute = select.sum_attribute;
            } else {
                top = stack(NodeKind::groupby, "GROUPBY", top);
                top->sum_attribute = select.sum_attribute;
                top->group_attribute = select.group_attribute;
            }
            break;
    }
    return stack(NodeKind::print, "PRINT", top);
}

std::string ExecDag::explain() const {
    std::string out;
    for (const auto& owned : nodes_) {
        const DagNode& n = *owned;
        out += n.name;
        out += " ";
        out += kind_name(n.kind);
        out += " [" + key_of(n.tables) + "] est=" + format_real(n.est_size);
        if (n.kind == NodeKind::join) {
            out += " build=" + n.left->name + " probe=" + n.right->name;
            std::vector<std::string> rendered;
            for (const auto& variant : n.variants) {
                std::vector<std::string> preds;
                for (const auto& p : variant) preds.push_back(p.render());
                rendered.push_back(preds.empty() ? "any" : join_strings(preds, " && "));
            }
            out += rendered.empty() ? " cross" : " on " + join_strings(rendered, " | ");
        } else if (n.left) {
            out += " from=" + n.left->name;
        }
        if (n.kind == NodeKind::select) {
            std::vector<std::string> preds;
            for (const auto& p : n.filters) preds.push_back(p.render());
            out += " filters=(" + join_strings(preds, " && ") + ")";
        }
        if (n.kind == NodeKind::project)
            out += " attrs=(" + join_strings(n.projection, ", ") + ")";
        if (n.kind == NodeKind::sum) out += " sum=" + n.sum_attribute;
        if (n.kind == NodeKind::groupby)
            out += " group=" + n.group_attribute + " sum=" + n.sum_attribute;
        out += "\n";
    }
    return out;
}

}  // namespace mqp
