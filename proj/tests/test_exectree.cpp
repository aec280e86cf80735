#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>
#include <string>
#include <vector>

#include "catalog.hpp"
#include "estimator.hpp"
#include "exectree.hpp"
#include "parser.hpp"
#include "planner.hpp"
#include "support/paper_fixtures.hpp"

using namespace mqp;

namespace {

const Catalog& cat() {
    static const Catalog c = Catalog::load_default();
    return c;
}

MultiQuery wrap_single(const std::string& text, const std::string& name = "Q1") {
    return parse_multiquery("MULTIQUERY\n" + name + ":\n" + text + "END\n", cat());
}

ScopeMember table_member(int index) {
    ScopeMember m;
    m.index = index;
    m.leaf = make_leaf(index);
    m.real = {index};
    return m;
}

// Every join of the materialized tree coming from a winning map entry must
// carry that entry's size as its estimate.
void check_join_estimates(const ExecDag& dag, const PlanMap& map) {
    for (const auto& node : dag.nodes()) {
        if (node->kind != NodeKind::join) continue;
        auto it = map.find(key_of(node->tables));
        if (it == map.end() || it->second.order_text() != node->order_text) continue;
        INFO("join " << node->name << " over " << key_of(node->tables));
        CHECK(node->est_size == it->second.size);
    }
}

void check_probe_side_smaller(const ExecDag& dag) {
    for (const auto& node : dag.nodes()) {
        if (node->kind != NodeKind::join) continue;
        INFO("join " << node->name);
        CHECK(node->right->est_size <= node->left->est_size);
    }
}

}  // namespace

TEST_CASE("canonical order ignores the view wrapper") {
    const JoinOrderPtr plain = make_join(make_leaf(0), make_join(make_leaf(3), make_leaf(4)));
    CHECK(render_order(plain) == "0(34)");
    CHECK(canonical_order(*plain) == "0(34)");
    const JoinOrderPtr view = make_view(plain);
    CHECK(render_order(view) == "(0(34))");
    CHECK(canonical_order(*view) == "0(34)");
    CHECK(canonical_order(*make_leaf(2)) == "2");
}

TEST_CASE("side keys pick each predicate's attribute on the given side") {
    const MultiQuery mq = parse_multiquery(fixtures::kBatchFour, cat(),
                                           fixtures::kBatchEncoding);
    const PlanContext ctx(cat(), mq);
    // lineitem 0 vs orders 4: Query2/Query3 both join on l_orderkey = o_orderkey.
    const auto variants = ctx.predicate_variants({0}, {4});
    REQUIRE(variants.size() == 1);
    REQUIRE(variants[0].size() == 1);
    CHECK(side_keys(variants[0], {0}, ctx) == std::vector<std::string>{"l_orderkey"});
    CHECK(side_keys(variants[0], {4}, ctx) == std::vector<std::string>{"o_orderkey"});
    CHECK(side_keys(variants[0], {4, 3}, ctx) == std::vector<std::string>{"o_orderkey"});
}

TEST_CASE("single-query tree: structure, orientation, and estimates") {
    const MultiQuery mq = wrap_single(fixtures::kSingleQuery);
    const PlanContext ctx(cat(), mq);
    Planner planner(ctx);
    const PlanEntry& best = planner.optimize();
    REQUIRE(best.order_text() == "((01)2)3");

    ExecDag dag(ctx);
    DagNode* root = dag.materialize(best.order, planner, planner.pushdowns());

    // region select + 4 scans + 3 joins.
    CHECK(dag.nodes().size() == 8);
    CHECK(dag.join_count() == 3);
    CHECK(dag.scans().size() == 4);
    CHECK(root->name == "JOIN3");
    CHECK(root->order_text == "((01)2)3");
    CHECK(root->tables == std::vector<int>{0, 1, 2, 3});

    // The filtered region scan is wrapped in a shared select.
    DagNode* region = dag.scan_node(0);
    REQUIRE(region != nullptr);
    CHECK(region->kind == NodeKind::scan);
    CHECK(region->est_size == 5);
    REQUIRE(region->parents.size() == 1);
    DagNode* sel = region->parents[0];
    CHECK(sel->kind == NodeKind::select);
    CHECK(sel->name == "SELECTregion");
    CHECK(sel->est_size == doctest::Approx(5.0 / 3.0));
    REQUIRE(sel->filters.size() == 1);
    CHECK(sel->filters[0].render() == "r_regionkey < 5");
    // The registry hands out the select, not the bare scan.
    CHECK(dag.find({0}, "0") == sel);

    // JOIN1 = region x nation; nation (25) builds, filtered region (5/3) probes.
    DagNode* j1 = dag.find({0, 1}, "01");
    REQUIRE(j1 != nullptr);
    CHECK(j1->join_seq == 1);
    CHECK(j1->left == dag.scan_node(1));
    CHECK(j1->right == sel);
    // JOIN2 = (01) x customer; customer (150000) builds, JOIN1 probes.
    DagNode* j2 = dag.find({0, 1, 2}, "(01)2");
    REQUIRE(j2 != nullptr);
    CHECK(j2->join_seq == 2);
    CHECK(j2->left == dag.scan_node(2));
    CHECK(j2->right == j1);
    // JOIN3 = (012) x orders; orders (1.5e6) builds, JOIN2 probes.
    CHECK(root->left == dag.scan_node(3));
    CHECK(root->right == j2);

    check_probe_side_smaller(dag);
    check_join_estimates(dag, planner.map());
    CHECK(j1->est_size == planner.map().at("01").size);
    CHECK(j2->est_size == planner.map().at("012").size);
    CHECK(root->est_size == planner.map().at("0123").size);

    // Unfiltered scans carry catalog cardinalities.
    CHECK(dag.scan_node(1)->est_size == cat().cardinality("nation"));
    CHECK(dag.scan_node(2)->est_size == cat().cardinality("customer"));
    CHECK(dag.scan_node(3)->est_size == cat().cardinality("orders"));

    // Each join sees exactly one key-predicate variant here.
    for (const auto& node : dag.nodes())
        if (node->kind == NodeKind::join) {
            REQUIRE(node->variants.size() == 1);
            REQUIRE(node->variants[0].size() == 1);
        }
    CHECK(root->variants[0][0].same_pair(
        JoinPredicate{"o_custkey", "c_custkey", "orders", "customer"}));
    CHECK(side_keys(root->variants[0], root->left->table_set(), ctx) ==
          std::vector<std::string>{"o_custkey"});

    // Materializing the same order again returns the same nodes.
    CHECK(dag.materialize(best.order, planner, planner.pushdowns()) == root);
    CHECK(dag.materialize(planner.map().at("01").order, planner, planner.pushdowns()) == j1);
    CHECK(dag.nodes().size() == 8);
    CHECK(dag.join_count() == 3);
}

TEST_CASE("exit chains stack project, aggregate, and print") {
    const MultiQuery mq = wrap_single(fixtures::kSingleQuery);
    const PlanContext ctx(cat(), mq);
    Planner planner(ctx);
    const PlanEntry& best = planner.optimize();
    ExecDag dag(ctx);
    DagNode* root = dag.materialize(best.order, planner, planner.pushdowns());

    SUBCASE("plain projection, classic names") {
        DagNode* print = dag.add_exit_chain(root, "Q1", mq.queries[0].select, true);
        CHECK(print->kind == NodeKind::print);
        CHECK(print->name == "PRINT");
        CHECK(print->query == "Q1");
        DagNode* proj = print->left;
        REQUIRE(proj != nullptr);
        CHECK(proj->kind == NodeKind::project);
        CHECK(proj->name == "PROJECT");
        CHECK(proj->projection ==
              std::vector<std::string>{"c_name", "c_address", "c_acctbal"});
        CHECK(proj->left == root);
        CHECK(proj->tables == root->tables);
        CHECK(proj->est_size == root->est_size);
        REQUIRE(root->parents.size() == 1);
        CHECK(root->parents[0] == proj);
        CHECK(print->is_exit_op());
        CHECK(!root->is_exit_op());
    }

    SUBCASE("distinct inserts a dedup step, suffixed names") {
        SelectList select = mq.queries[0].select;
        select.aggregate = Aggregate::distinct;
        DagNode* print = dag.add_exit_chain(root, "Q9", select, false);
        CHECK(print->name == "PRINT_Q9");
        DagNode* dedup = print->left;
        CHECK(dedup->kind == NodeKind::distinct);
        CHECK(dedup->name == "DISTINCT_Q9");
        CHECK(dedup->left->kind == NodeKind::project);
        CHECK(dedup->left->name == "PROJECT_Q9");
        CHECK(dedup->left->left == root);
    }

    SUBCASE("sum without grouping") {
        SelectList select;
        select.aggregate = Aggregate::sum;
        select.sum_attribute = "o_totalprice";
        select.attributes = {"o_totalprice"};
        DagNode* print = dag.add_exit_chain(root, "Q2", select, false);
        DagNode* sum = print->left;
        CHECK(sum->kind == NodeKind::sum);
        CHECK(sum->name == "SUM_Q2");
        CHECK(sum->sum_attribute == "o_totalprice");
        CHECK(sum->group_attribute.empty());
        CHECK(sum->left->kind == NodeKind::project);
    }

    SUBCASE("grouped sum becomes a single group-by step") {
        SelectList select;
        select.aggregate = Aggregate::sum;
        select.sum_attribute = "o_totalprice";
        select.group_attribute = "o_custkey";
        select.attributes = {"o_totalprice", "o_custkey"};
        DagNode* print = dag.add_exit_chain(root, "Q3", select, false);
        DagNode* grp = print->left;
        CHECK(grp->kind == NodeKind::groupby);
        CHECK(grp->name == "GROUPBY_Q3");
        CHECK(grp->sum_attribute == "o_totalprice");
        CHECK(grp->group_attribute == "o_custkey");
        CHECK(grp->left->kind == NodeKind::project);
        // No separate sum node: the chain is print - groupby - project - join.
        CHECK(grp->left->left == root);
    }
}

TEST_CASE("batch tree plus solo graft shares existing structure") {
    const MultiQuery mq = parse_multiquery(fixtures::kBatchFour, cat(),
                                           fixtures::kBatchEncoding);
    const PlanContext ctx(cat(), mq);
    Planner planner(ctx);
    planner.optimize();
    const PlanEntry& best = planner.map().at("01234");
    REQUIRE(best.order_text() == "0(((12)3)4)");

    ExecDag dag(ctx);
    DagNode* root = dag.materialize(best.order, planner, planner.pushdowns());

    // 5 scans + the region select + 4 joins.
    CHECK(dag.nodes().size() == 10);
    CHECK(dag.join_count() == 4);
    CHECK(root->name == "JOIN4");
    CHECK(root->order_text == "0(((12)3)4)");

    // Only region gets a shared pushdown in this batch.
    int selects = 0;
    for (const auto& node : dag.nodes())
        if (node->kind == NodeKind::select) {
            ++selects;
            CHECK(node->table == 1);
            REQUIRE(node->filters.size() == 1);
            CHECK(node->filters[0].render() == "r_regionkey = 1");
        }
    CHECK(selects == 1);
    CHECK(dag.scan_node(0)->est_size == cat().cardinality("lineitem"));

    // Creation order follows the recursion depth-first: deepest join first.
    DagNode* j12 = dag.find({1, 2}, "12");
    DagNode* j123 = dag.find({1, 2, 3}, "(12)3");
    DagNode* j1234 = dag.find({1, 2, 3, 4}, "((12)3)4");
    REQUIRE(j12 != nullptr);
    REQUIRE(j123 != nullptr);
    REQUIRE(j1234 != nullptr);
    CHECK(j12->join_seq == 1);
    CHECK(j123->join_seq == 2);
    CHECK(j1234->join_seq == 3);
    CHECK(root->join_seq == 4);
    CHECK(root->left == dag.scan_node(0));
    CHECK(root->right == j1234);

    check_probe_side_smaller(dag);
    check_join_estimates(dag, planner.map());

    // Graft Query3 (lineitem, customer, orders) with its own solo round.
    const size_t q3 = 2;
    Planner solo(ctx, {table_member(0), table_member(3), table_member(4)}, {q3});
    const PlanEntry& winner = solo.optimize();
    CHECK(winner.order_text() == "0(34)");

    DagNode* graft = dag.materialize(winner.order, solo, planner.pushdowns());
    CHECK(dag.join_count() == 6);
    CHECK(dag.nodes().size() == 12);  // two new joins, nothing else
    CHECK(graft->name == "JOIN6");

    DagNode* j34 = dag.find({3, 4}, "34");
    REQUIRE(j34 != nullptr);
    CHECK(j34->join_seq == 5);
    // Children are the scans that already existed: orders builds, customer probes.
    CHECK(j34->left == dag.scan_node(4));
    CHECK(j34->right == dag.scan_node(3));
    // The estimate follows the shared scans, not Query3's solo filters.
    CHECK(j34->est_size == join_size(cat().cardinality("orders"),
                                     cat().cardinality("customer"), 150000));
    CHECK(graft->left == dag.scan_node(0));
    CHECK(graft->right == j34);
    CHECK(graft->est_size == doctest::Approx(cat().cardinality("lineitem")));

    // The scans now feed both the original tree and the graft.
    CHECK(dag.scan_node(4)->parents.size() == 2);
    CHECK(dag.scan_node(3)->parents.size() == 2);
    check_probe_side_smaller(dag);

    // Re-grafting the same winner adds nothing.
    CHECK(dag.materialize(winner.order, solo, planner.pushdowns()) == graft);
    CHECK(dag.join_count() == 6);
}

TEST_CASE("re-planning round reuses the materialized view subtree") {
    const MultiQuery mq = parse_multiquery(fixtures::kBatchFive, cat(),
                                           fixtures::kBatchEncoding);
    const PlanContext ctx(cat(), mq);
    Planner full(ctx);
    full.optimize();
    const PlanEntry seed = full.map().at("034");
    REQUIRE(seed.order_text() == "0(34)");

    ExecDag dag(ctx);
    DagNode* old_root = dag.materialize(seed.order, full, full.pushdowns());
    CHECK(dag.join_count() == 2);
    CHECK(old_root->name == "JOIN2");
    CHECK(dag.nodes().size() == 5);  // lineitem, customer, orders, two joins

    ScopeMember view;
    view.index = kViewIndex;
    view.leaf = make_view(seed.order);
    view.real = {0, 3, 4};
    view.seed = seed;
    view.is_view = true;
    Planner fresh(ctx, {table_member(1), table_member(2), view}, {0, 1, 2, 3, 4});
    const PlanEntry& replacement = fresh.optimize();
    REQUIRE(replacement.order_text() == "(12)(0(34))");

    DagNode* root = dag.materialize(replacement.order, fresh, full.pushdowns());
    CHECK(root->order_text == "(12)(0(34))");
    CHECK(root->tables == std::vector<int>{0, 1, 2, 3, 4});
    CHECK(dag.join_count() == 4);
    // New: region scan + select, nation scan, the (12) join, the root.
    CHECK(dag.nodes().size() == 10);

    // The nested view resolved to the join built in the first round.
    CHECK(root->left == old_root);
    DagNode* j12 = dag.find({1, 2}, "12");
    REQUIRE(j12 != nullptr);
    CHECK(root->right == j12);
    CHECK(j12->est_size == fresh.map().at("12").size);
    CHECK(root->est_size == fresh.map().at("12v").size);
    CHECK(root->est_size == doctest::Approx(1200243));
    check_probe_side_smaller(dag);

    // Exits for the whole batch attach without growing the join count.
    CHECK(dag.find({0}, "0") == dag.scan_node(0));
    CHECK(dag.find({0, 3, 4}, "0(34)") == old_root);
}

TEST_CASE("explain lists every node with its inputs") {
    const MultiQuery mq = wrap_single(fixtures::kSingleQuery);
    const PlanContext ctx(cat(), mq);
    Planner planner(ctx);
    const PlanEntry& best = planner.optimize();
    ExecDag dag(ctx);
    DagNode* root = dag.materialize(best.order, planner, planner.pushdowns());
    dag.add_exit_chain(root, "Q1", mq.queries[0].select, true);

    const std::string text = dag.explain();
    CHECK(text.find("JOIN3 join [0123]") != std::string::npos);
    CHECK(text.find("build=orders probe=JOIN2 on o_custkey = c_custkey") !=
          std::string::npos);
    CHECK(text.find("SELECTregion select [0]") != std::string::npos);
    CHECK(text.find("filters=(r_regionkey < 5)") != std::string::npos);
    CHECK(text.find("PRINT print") != std::string::npos);
    CHECK(text.find("attrs=(c_name, c_address, c_acctbal)") != std::string::npos);
}
