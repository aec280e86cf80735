#pragma once

#include <map>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "catalog.hpp"
#include "exectree.hpp"
#include "planner.hpp"

namespace mqp {

// Where one query's tuples leave the shared DAG.  `node` covers exactly the
// query's tables; whatever the shared part did not apply of the query's own
// predicates is re-checked here before projecting.
struct ExitPoint {
    std::string query;
    size_t query_index = 0;  // batch position
    DagNode* node = nullptr;
    DagNode* print = nullptr;
    std::vector<SelectionPredicate> residual_selections;
    std::vector<JoinPredicate> residual_joins;
    SelectList projection;

    bool satisfied() const { return node != nullptr; }
};

// A fully optimized batch: one shared execution DAG with an exit per query.
//
// Construction picks the map entry answering the most queries, materializes
// its tree, then loops over the still-unanswered queries: one whose tables
// the plan already covers gets its own best tree grafted onto the shared
// structure; one needing more tables triggers a re-planning round where the
// current best entry participates as a single nested relation, and the
// winner replaces the old full-set entry.  Every round strictly grows either
// the answered-query count or the covered-table set, so the loop terminates.
class SharedPlan {
public:
    SharedPlan(std::shared_ptr<const Catalog> catalog, MultiQuery mq, unsigned seed);
    SharedPlan(const SharedPlan&) = delete;
    SharedPlan& operator=(const SharedPlan&) = delete;

    const Catalog& catalog() const { return *catalog_; }
    const MultiQuery& mq() const { return mq_; }
    const PlanContext& context() const { return ctx_; }
    const PlanMap& map() const { return planner_.map(); }
    const std::map<int, AdoptedPushdown>& pushdowns() const { return planner_.pushdowns(); }
    const std::string& best_key() const { return best_key_; }
    const PlanEntry& best() const { return planner_.map().at(best_key_); }
    const ExecDag& dag() const { return dag_; }
    ExecDag& dag() { return dag_; }
    const std::vector<ExitPoint>& exits() const { return exits_; }
    bool classic_names() const { return classic_; }
    unsigned seed() const { return seed_; }

    // Folds one more query into the finished plan without disturbing the
    // queries already answered.  The query may only use tables the batch
    // encoding already has, and may not conflict with a shared scan filter
    // some earlier query adopted.
    void admit(const ParsedQuery& query);

    // The DAG listing followed by the per-query exit table.
    std::string explain() const;
    std::string exit_table() const;

private:
    void run_loop();
    void sweep_exits();
    void register_exit(size_t qi, DagNode* attach);
    size_t pick_unsatisfied() const;
    void add_more_joins(size_t qi);
    void add_more_tables(size_t qi);
    std::set<int> plan_tables() const;

    std::shared_ptr<const Catalog> catalog_;
    MultiQuery mq_;
    PlanContext ctx_;
    Planner planner_;
    std::string best_key_;
    ExecDag dag_;
    std::vector<ExitPoint> exits_;  // batch order; node == nullptr while pending
    bool classic_ = false;
    unsigned seed_ = 0;
    mutable std::mt19937 rng_;
};

// Picks the map entry answering the most queries; ties go to the cheaper
// entry, then to the smaller key.  Returns the winning key.
std::string select_best(const PlanMap& map);

// Whether `order`'s tree already exists inside the DAG (the empty order
// counts as present).
bool sub_tree(const ExecDag& dag, const JoinOrderPtr& order);

// Runs the whole pipeline: plan the batch, build the shared DAG, attach one
// exit per query.  `seed` 0 resolves the answer order deterministically
// (batch order); any other seed randomizes which pending query goes next.
std::unique_ptr<SharedPlan> shared_optimized_plan(std::shared_ptr<const Catalog> catalog,
                                                  MultiQuery mq, unsigned seed = 0);

}  // namespace mqp
