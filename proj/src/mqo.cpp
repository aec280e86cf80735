#include "mqo.hpp"

#include <algorithm>
#include <numeric>

#include "error.hpp"
#include "parser.hpp"
#include "textutil.hpp"

namespace mqp {

namespace {

bool links(const QueryInfo::JoinRef& ref, const std::set<int>& left,
           const std::set<int>& right) {
    return (left.count(ref.left_index) && right.count(ref.right_index)) ||
           (left.count(ref.right_index) && right.count(ref.left_index));
}

bool same_filter(const SelectionPredicate& a, const SelectionPredicate& b) {
    return a.attribute == b.attribute && a.op == b.op && a.literal == b.literal;
}

ScopeMember table_member(int index) {
    ScopeMember m;
    m.index = index;
    m.leaf = make_leaf(index);
    m.real = {index};
    return m;
}

// Non-exit nodes reachable from `attach` (the query's shared subtree).
std::vector<const DagNode*> subtree_of(const DagNode* attach) {
    std::vector<const DagNode*> out;
    std::vector<const DagNode*> stack = {attach};
    std::set<const DagNode*> seen;
    while (!stack.empty()) {
        const DagNode* n = stack.back();
        stack.pop_back();
        if (!seen.insert(n).second) continue;
        out.push_back(n);
        if (n->left) stack.push_back(n->left);
        if (n->right) stack.push_back(n->right);
    }
    return out;
}

std::vector<SelectionPredicate> residual_selections_for(const QueryInfo& q,
                                                        const DagNode* attach) {
    std::vector<SelectionPredicate> residual;
    std::vector<std::pair<int, const SelectionPredicate*>> applied;
    for (const DagNode* n : subtree_of(attach))
        if (n->kind == NodeKind::select)
            for (const auto& p : n->filters) applied.push_back({n->table, &p});
    for (const auto& [table, preds] : q.selections)
        for (const auto& p : preds) {
            bool done = false;
            for (const auto& [at, ap] : applied)
                if (at == table && same_filter(*ap, p)) done = true;
            if (!done) residual.push_back(p);
        }
    return residual;
}

// Joins shared by queries with different keys keep the union of pairings, so
// each such query re-checks its own keys at its exit.
std::vector<JoinPredicate> residual_joins_for(const QueryInfo& q, const DagNode* attach) {
    std::vector<JoinPredicate> residual;
    for (const DagNode* n : subtree_of(attach)) {
        if (n->kind != NodeKind::join || n->variants.size() <= 1) continue;
        const std::set<int> left = n->left->table_set();
        const std::set<int> right = n->right->table_set();
        for (const auto& ref : q.joins)
            if (links(ref, left, right)) residual.push_back(ref.predicate);
    }
    return residual;
}

}  // namespace

std::string select_best(const PlanMap& map) {
    if (map.empty()) fail(ErrorKind::plan, "cannot pick a plan from an empty map");
    const std::string* best_key = nullptr;
    size_t best_count = 0;
    double best_cost = 0;
    for (const auto& [key, entry] : map) {
        const size_t count = entry.satisfied.size();
        if (!best_key || count > best_count ||
            (count == best_count && entry.cost < best_cost)) {
            best_key = &key;
            best_count = count;
            best_cost = entry.cost;
        }
    }
    return *best_key;
}

bool sub_tree(const ExecDag& dag, const JoinOrderPtr& order) {
    if (!order) return true;
    return dag.find(order->tables, canonical_order(*order)) != nullptr;
}

SharedPlan::SharedPlan(std::shared_ptr<const Catalog> catalog, MultiQuery mq, unsigned seed)
    : catalog_(std::move(catalog)),
      mq_(std::move(mq)),
      ctx_(*catalog_, mq_),
      planner_(ctx_),
      dag_(ctx_),
      classic_(mq_.queries.size() == 1),
      seed_(seed),
      rng_(seed) {
    validate_boundary(mq_);
    planner_.optimize();
    best_key_ = select_best(planner_.map());
    dag_.materialize(best().order, planner_, planner_.pushdowns());
    exits_.resize(mq_.queries.size());
    for (size_t i = 0; i < exits_.size(); ++i) {
        exits_[i].query = ctx_.query(i).name;
        exits_[i].query_index = i;
        exits_[i].projection = mq_.queries[i].select;
    }
    run_loop();
}

void SharedPlan::run_loop() {
    sweep_exits();
    // Each pass either answers a query or grows the covered tables, so this
    // many passes always suffice.
    size_t guard = exits_.size() + ctx_.tables().size() + 1;
    while (std::any_of(exits_.begin(), exits_.end(),
                       [](const ExitPoint& e) { return !e.satisfied(); })) {
        if (guard-- == 0)
            fail(ErrorKind::plan, "internal: sharing loop failed to converge");
        const size_t qi = pick_unsatisfied();
        const std::set<int>& need = ctx_.query(qi).tables;
        const std::set<int> have = plan_tables();
        if (std::includes(have.begin(), have.end(), need.begin(), need.end()))
            add_more_joins(qi);
        else
            add_more_tables(qi);
        sweep_exits();
    }
}

void SharedPlan::sweep_exits() {
    for (auto& exit : exits_) {
        if (exit.satisfied()) continue;
        const std::set<int>& need = ctx_.query(exit.query_index).tables;
        DagNode* attach = nullptr;
        for (size_t i = 0; i < dag_.nodes().size() && !attach; ++i) {
            DagNode* n = dag_.nodes()[i].get();
            if (n->is_exit_op() || n->table_set() != need) continue;
            // Streams are taken from registry handles only; a filtered scan
            // is reached through its select.
            if (dag_.find(n->tables, n->order_text) != n) continue;
            attach = n;
        }
        if (attach) register_exit(exit.query_index, attach);
    }
}

void SharedPlan::register_exit(size_t qi, DagNode* attach) {
    ExitPoint& exit = exits_[qi];
    const QueryInfo& q = ctx_.query(qi);
    exit.node = attach;
    exit.residual_selections = residual_selections_for(q, attach);
    exit.residual_joins = residual_joins_for(q, attach);
    exit.print = dag_.add_exit_chain(attach, exit.query, exit.projection, classic_);
}

size_t SharedPlan::pick_unsatisfied() const {
    std::vector<size_t> pending;
    for (const auto& e : exits_)
        if (!e.satisfied()) pending.push_back(e.query_index);
    if (pending.empty()) fail(ErrorKind::plan, "internal: nothing left to answer");
    if (seed_ == 0) return pending.front();
    return pending[rng_() % pending.size()];
}

std::set<int> SharedPlan::plan_tables() const {
    std::set<int> tables;
    for (const auto& [index, node] : dag_.scans()) tables.insert(index);
    return tables;
}

void SharedPlan::add_more_joins(size_t qi) {
    const QueryInfo& q = ctx_.query(qi);
    std::vector<ScopeMember> members;
    for (int t : q.tables) members.push_back(table_member(t));
    // The query's own round: its private filters shape the costs, but any
    // structure it shares with the DAG is reused as-is.
    Planner solo(ctx_, std::move(members), {qi});
    const PlanEntry& winner = solo.optimize();
    dag_.materialize(winner.order, solo, planner_.pushdowns());
}

void SharedPlan::add_more_tables(size_t qi) {
    const QueryInfo& q = ctx_.query(qi);
    const PlanEntry anchor = best();  // copied: its map slot is replaced below
    const std::set<int> have(anchor.order->tables.begin(), anchor.order->tables.end());

    std::vector<ScopeMember> members;
    std::vector<int> covered(have.begin(), have.end());
    for (int t : q.tables)
        if (!have.count(t)) {
            members.push_back(table_member(t));
            covered.push_back(t);
        }
    ScopeMember view;
    view.index = kViewIndex;
    view.leaf = make_view(anchor.order);
    view.real = {have.begin(), have.end()};
    view.seed = anchor;
    view.is_view = true;
    members.push_back(std::move(view));

    std::vector<size_t> everyone(mq_.queries.size());
    std::iota(everyone.begin(), everyone.end(), size_t{0});
    Planner fresh(ctx_, std::move(members), std::move(everyone));
    const PlanEntry root = fresh.optimize();

    // The widened plan takes over the old best's role in the main map.
    std::sort(covered.begin(), covered.end());
    best_key_ = key_of(covered);
    planner_.map()[best_key_] = root;

    dag_.materialize(root.order, fresh, planner_.pushdowns());
}

void SharedPlan::admit(const ParsedQuery& query) {
    for (const auto& q : mq_.queries)
        if (q.name == query.name)
            fail(ErrorKind::semantic, "duplicate query name '" + query.name + "'");
    for (const auto& t : query.tables)
        if (std::find(mq_.all_tables.begin(), mq_.all_tables.end(), t) ==
            mq_.all_tables.end())
            fail(ErrorKind::semantic, "query '" + query.name + "' uses table '" + t +
                                          "', which the batch does not cover");

    // A filter some earlier query adopted at a shared scan must also hold for
    // the newcomer, or the scan's output is too narrow for it.
    const SplitPredicates split = split_predicates(query, *catalog_);
    for (const auto& [table, pushed] : planner_.pushdowns()) {
        if (pushed.predicates.empty()) continue;
        const std::string& name = ctx_.table_name(table);
        if (std::find(query.tables.begin(), query.tables.end(), name) ==
            query.tables.end())
            continue;
        for (const auto& p : pushed.predicates) {
            bool holds = false;
            for (const auto& s : split.selections)
                if (s.table == name && same_filter(s, p)) holds = true;
            if (!holds)
                fail(ErrorKind::plan, "query '" + query.name +
                                          "' cannot join the batch: the shared scan of '" +
                                          name + "' already filters " + p.render());
        }
    }

    mq_.queries.push_back(query);
    ctx_.add_query(query);
    ExitPoint exit;
    exit.query = query.name;
    exit.query_index = exits_.size();
    exit.projection = query.select;
    exits_.push_back(std::move(exit));

    if (classic_) {
        classic_ = false;
        for (const auto& node : dag_.nodes())
            if (node->is_exit_op()) node->name += "_" + node->query;
    }

    // The newcomer's keys widen what shared joins must keep, so refresh every
    // join's variant list and re-derive the residuals that depend on them.
    for (const auto& node : dag_.nodes())
        if (node->kind == NodeKind::join)
            node->variants = ctx_.predicate_variants(node->left->table_set(),
                                                     node->right->table_set());
    for (auto& e : exits_)
        if (e.satisfied())
            e.residual_joins = residual_joins_for(ctx_.query(e.query_index), e.node);

    run_loop();
}

std::string SharedPlan::exit_table() const {
    std::string out;
    for (const auto& exit : exits_) {
        out += exit.query;
        out += " -> ";
        out += exit.node ? exit.node->name : "(pending)";
        std::vector<std::string> parts;
        for (const auto& p : exit.residual_selections) parts.push_back(p.render());
        for (const auto& p : exit.residual_joins) parts.push_back(p.render());
        out += parts.empty() ? " -> complete"
                             : " -> residual " + join_strings(parts, " && ");
        out += "\n";
    }
    return out;
}

std::string SharedPlan::explain() const { return dag_.explain() + exit_table(); }

std::unique_ptr<SharedPlan> shared_optimized_plan(std::shared_ptr<const Catalog> catalog,
                                                  MultiQuery mq, unsigned seed) {
    return std::make_unique<SharedPlan>(std::move(catalog), std::move(mq), seed);
}

}  // namespace mqp
