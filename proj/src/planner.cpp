#include "planner.hpp"

#include <algorithm>

#include "error.hpp"
#include "parser.hpp"

namespace mqp {

bool next_permutation_step(std::vector<int>& indices) {
    const int n = static_cast<int>(indices.size());
    int k = -1;
    for (int i = 0; i + 1 < n; ++i)
        if (indices[i] < indices[i + 1]) k = i;
    if (k < 0) {
        // Exhausted: restore ascending order, like the library function.
        std::reverse(indices.begin(), indices.end());
        return false;
    }
    int l = -1;
    for (int i = k + 1; i < n; ++i)
        if (indices[k] < indices[i]) l = i;
    std::swap(indices[k], indices[l]);
    std::reverse(indices.begin() + k + 1, indices.end());
    return true;
}

PlanContext::PlanContext(const Catalog& catalog, const MultiQuery& mq)
    : catalog_(&catalog), tables_(mq.all_tables) {
    for (const ParsedQuery& q : mq.queries) add_query(q);
}

int PlanContext::table_slot(const std::string& name) const {
    for (size_t i = 0; i < tables_.size(); ++i)
        if (tables_[i] == name) return static_cast<int>(i);
    fail(ErrorKind::semantic, "table '" + name + "' is not part of this batch");
}

void PlanContext::add_query(const ParsedQuery& q) {
    QueryInfo info;
    info.name = q.name;
    info.batch_index = static_cast<int>(queries_.size());
    for (const auto& t : q.tables) info.tables.insert(table_slot(t));

    SplitPredicates split = split_predicates(q, *catalog_);
    for (auto& s : split.selections) {
        int idx = table_slot(s.table);
        info.selections[idx].push_back(s);
    }
    for (auto& j : split.joins) {
        QueryInfo::JoinRef ref;
        ref.left_index = table_slot(j.left_table);
        ref.right_index = table_slot(j.right_table);
        ref.divisor = predicate_divisor(*catalog_, j);
        ref.predicate = std::move(j);
        info.joins.push_back(std::move(ref));
    }
    batch_index_[info.name] = info.batch_index;
    queries_.push_back(std::move(info));
}

int PlanContext::batch_index_of(const std::string& name) const {
    auto it = batch_index_.find(name);
    return it == batch_index_.end() ? -1 : it->second;
}

namespace {

bool connects(const QueryInfo::JoinRef& ref, const std::set<int>& left,
              const std::set<int>& right) {
    return (left.count(ref.left_index) && right.count(ref.right_index)) ||
           (left.count(ref.right_index) && right.count(ref.left_index));
}

bool same_predicate_set(const std::vector<JoinPredicate>& a, const std::vector<JoinPredicate>& b) {
    if (a.size() != b.size()) return false;
    for (const auto& pa : a) {
        bool found = false;
        for (const auto& pb : b)
            if (pa.same_pair(pb)) found = true;
        if (!found) return false;
    }
    return true;
}

}  // namespace

std::vector<std::vector<JoinPredicate>> PlanContext::predicate_variants(
    const std::set<int>& left, const std::set<int>& right) const {
    std::vector<std::vector<JoinPredicate>> variants;
    auto touches = [](const std::set<int>& tables, const std::set<int>& side) {
        for (int t : side)
            if (tables.count(t)) return true;
        return false;
    };
    for (const auto& q : queries_) {
        std::vector<JoinPredicate> linking;
        for (const auto& ref : q.joins)
            if (connects(ref, left, right)) linking.push_back(ref.predicate);
        // A query spanning both sides without a linking predicate needs every
        // pairing kept; its empty set means "no key restriction".
        if (linking.empty() && !(touches(q.tables, left) && touches(q.tables, right)))
            continue;
        bool duplicate = false;
        for (const auto& v : variants)
            if (same_predicate_set(v, linking)) duplicate = true;
        if (!duplicate) variants.push_back(std::move(linking));
    }
    return variants;
}

Planner::Planner(const PlanContext& ctx, std::vector<size_t> query_subset) : ctx_(&ctx) {
    for (int i = 0; i < ctx.table_count(); ++i) {
        ScopeMember m;
        m.index = i;
        m.leaf = make_leaf(i);
        m.real = {i};
        members_.push_back(std::move(m));
    }
    if (query_subset.empty())
        for (size_t i = 0; i < ctx.queries().size(); ++i) query_subset.push_back(i);
    scope_queries_ = std::move(query_subset);
    for (size_t s = 0; s < members_.size(); ++s) member_slot_[members_[s].index] = s;
}

Planner::Planner(const PlanContext& ctx, std::vector<ScopeMember> members,
                 std::vector<size_t> query_subset)
    : ctx_(&ctx), members_(std::move(members)) {
    std::sort(members_.begin(), members_.end(),
              [](const ScopeMember& a, const ScopeMember& b) { return a.index < b.index; });
    if (query_subset.empty())
        for (size_t i = 0; i < ctx.queries().size(); ++i) query_subset.push_back(i);
    scope_queries_ = std::move(query_subset);
    for (size_t s = 0; s < members_.size(); ++s) member_slot_[members_[s].index] = s;
}

std::set<int> Planner::expand(const std::vector<int>& member_indices) const {
    std::set<int> real;
    for (int idx : member_indices) {
        const ScopeMember& m = members_[member_slot_.at(idx)];
        real.insert(m.real.begin(), m.real.end());
    }
    return real;
}

double Planner::divisor_between(const std::set<int>& left_real,
                                const std::set<int>& right_real) const {
    double best = 1;
    bool any = false;
    for (size_t qi : scope_queries_) {
        const QueryInfo& q = ctx_->query(qi);
        double product = 1;
        bool linked = false;
        for (const auto& ref : q.joins) {
            if (!connects(ref, left_real, right_real)) continue;
            linked = true;
            product *= ref.divisor;
        }
        if (!linked) continue;
        if (!any || product < best) best = product;
        any = true;
    }
    return any ? best : 1;
}

std::vector<std::string> Planner::satisfied_for(const std::vector<std::string>& left,
                                                const std::vector<std::string>& right,
                                                const std::set<int>& subset_real) const {
    std::vector<std::string> names = left;
    for (const auto& n : right)
        if (std::find(names.begin(), names.end(), n) == names.end()) names.push_back(n);
    for (size_t qi : scope_queries_) {
        const QueryInfo& q = ctx_->query(qi);
        if (q.tables != subset_real) continue;
        if (std::find(names.begin(), names.end(), q.name) == names.end()) names.push_back(q.name);
    }
    std::sort(names.begin(), names.end(), [this](const std::string& a, const std::string& b) {
        return ctx_->batch_index_of(a) < ctx_->batch_index_of(b);
    });
    return names;
}

void Planner::seed_scans() {
    if (seeded_) return;
    seeded_ = true;
    for (const ScopeMember& m : members_) {
        PlanEntry e;
        if (m.is_view) {
            e = m.seed;
            e.order = m.leaf;
        } else {
            e.size = ctx_->catalog().cardinality(ctx_->table_name(m.index));
            e.cost = 0;
            e.order = m.leaf;
            e.satisfied = satisfied_for({}, {}, {m.index});
        }
        map_[key_of({m.index})] = std::move(e);
    }
}

void Planner::apply_pushdowns() {
    if (pushed_) return;
    pushed_ = true;
    for (const ScopeMember& m : members_) {
        if (m.is_view) continue;
        const std::string& table = ctx_->table_name(m.index);
        const double cardinality = ctx_->catalog().cardinality(table);

        // Largest post-filter estimate among the queries scanning this table
        // wins; the scan then applies only the filters every one of them asks
        // for, so no query loses rows it needs.
        std::vector<size_t> users;
        for (size_t qi : scope_queries_)
            if (ctx_->query(qi).tables.count(m.index)) users.push_back(qi);
        if (users.empty()) continue;

        static const std::vector<SelectionPredicate> kNone;
        auto selections_of = [&](size_t qi) -> const std::vector<SelectionPredicate>& {
            const QueryInfo& q = ctx_->query(qi);
            auto it = q.selections.find(m.index);
            return it == q.selections.end() ? kNone : it->second;
        };

        size_t widest = users[0];
        double size = pushdown_size(ctx_->catalog(), table, cardinality, selections_of(widest));
        for (size_t k = 1; k < users.size(); ++k) {
            double s = pushdown_size(ctx_->catalog(), table, cardinality, selections_of(users[k]));
            if (s > size) {
                size = s;
                widest = users[k];
            }
        }

        std::vector<SelectionPredicate> adopted;
        for (const auto& pred : selections_of(widest)) {
            bool everywhere = true;
            for (size_t qi : users) {
                const auto& sels = selections_of(qi);
                bool present = std::any_of(sels.begin(), sels.end(), [&](const auto& s) {
                    return s.attribute == pred.attribute && s.op == pred.op &&
                           s.literal == pred.literal;
                });
                if (!present) everywhere = false;
            }
            if (everywhere) adopted.push_back(pred);
        }

        if (size >= cardinality && adopted.empty()) continue;
        map_[key_of({m.index})].size = size;
        pushdowns_[m.index] = AdoptedPushdown{size, std::move(adopted)};
    }
}

void Planner::build_pairs() {
    if (paired_) return;
    paired_ = true;
    for (size_t i = 0; i < members_.size(); ++i) {
        for (size_t j = i + 1; j < members_.size(); ++j) {
            const ScopeMember& a = members_[i];
            const ScopeMember& b = members_[j];
            const PlanEntry& l = map_.at(key_of({a.index}));
            const PlanEntry& r = map_.at(key_of({b.index}));
            std::set<int> left_real(a.real.begin(), a.real.end());
            std::set<int> right_real(b.real.begin(), b.real.end());

            PlanEntry e;
            e.size = join_size(l.size, r.size, divisor_between(left_real, right_real));
            e.cost = l.cost + r.cost;
            e.order = make_join(l.order, r.order);
            e.satisfied = satisfied_for(l.satisfied, r.satisfied, expand({a.index, b.index}));
            map_[key_of({a.index, b.index})] = std::move(e);
        }
    }
}

const PlanEntry& Planner::partition(const std::vector<int>& subset) {
    const std::string key = key_of(subset);
    if (auto it = map_.find(key); it != map_.end()) return it->second;

    const int n = static_cast<int>(subset.size());
    if (n < 3) fail(ErrorKind::plan, "missing plan entry for " + key);

    std::vector<int> perm = subset;
    std::sort(perm.begin(), perm.end());

    bool have_best = false;
    double best_cost = 0;
    std::vector<int> best_left, best_right;
    do {
        for (int j = 1; j < n; ++j) {
            std::vector<int> left(perm.begin(), perm.begin() + j);
            std::vector<int> right(perm.begin() + j, perm.end());
            const PlanEntry& l = partition(left);
            const PlanEntry& r = partition(right);
            double cost = l.cost + r.cost;
            if (j != 1) cost += l.size;      // left side is an intermediate result
            if (j != n - 1) cost += r.size;  // right side is an intermediate result
            if (!have_best || cost < best_cost) {
                have_best = true;
                best_cost = cost;
                best_left = std::move(left);
                best_right = std::move(right);
            }
        }
    } while (next_permutation_step(perm));

    const PlanEntry& l = map_.at(key_of(best_left));
    const PlanEntry& r = map_.at(key_of(best_right));
    PlanEntry e;
    e.size = join_size(l.size, r.size, divisor_between(expand(best_left), expand(best_right)));
    e.cost = best_cost;
    e.order = make_join(l.order, r.order);
    e.satisfied = satisfied_for(l.satisfied, r.satisfied, expand(subset));
    auto [it, inserted] = map_.emplace(key, std::move(e));
    return it->second;
}

const PlanEntry& Planner::optimize() {
    if (members_.size() > 10)
        fail(ErrorKind::plan, "cannot optimize a scope of more than 10 relations");
    if (members_.empty()) fail(ErrorKind::plan, "empty planning scope");
    seed_scans();
    apply_pushdowns();
    build_pairs();
    std::vector<int> full;
    for (const auto& m : members_) full.push_back(m.index);
    if (full.size() <= 2) return map_.at(key_of(full));
    return partition(full);
}

}  // namespace mqp
