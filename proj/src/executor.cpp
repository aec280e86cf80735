#include "executor.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>

#include "parser.hpp"

namespace mqp {

namespace {

Row project(const Row& row, const std::vector<int>& columns) {
    Row out;
    out.reserve(columns.size());
    for (int c : columns) out.push_back(row[c]);
    return out;
}

// One (build column, probe column) pair per predicate of one key-set variant.
struct VariantCheck {
    std::vector<std::pair<int, int>> pairs;
};

std::vector<VariantCheck> resolve_variants(
    const std::vector<std::vector<JoinPredicate>>& variants, const Schema& build,
    const Schema& probe) {
    std::vector<VariantCheck> out;
    out.reserve(variants.size());
    for (const auto& variant : variants) {
        VariantCheck vc;
        for (const auto& p : variant) {
            int b = find_column(build, p.left_attribute);
            int pr = 0;
            if (b >= 0) {
                pr = require_column(probe, p.right_attribute);
            } else {
                b = require_column(build, p.right_attribute);
                pr = require_column(probe, p.left_attribute);
            }
            vc.pairs.emplace_back(b, pr);
        }
        out.push_back(std::move(vc));
    }
    return out;
}

// A row pair survives a multi-variant join when any variant's predicates all
// hold; a variant with no predicates holds vacuously, and no variants at all
// means an unconditioned pairing.
bool passes_variants(const std::vector<VariantCheck>& checks, const Row& build,
                     const Row& probe) {
    if (checks.empty()) return true;
    for (const auto& vc : checks) {
        bool ok = true;
        for (auto [b, p] : vc.pairs)
            if (!compare_values(build[b], CompareOp::eq, probe[p])) {
                ok = false;
                break;
            }
        if (ok) return true;
    }
    return false;
}

// Runs one exit aggregate: feed every worker's state, fold the worker tree,
// terminate once at the coordinator.
template <typename State, typename Feed>
std::vector<Row> run_exit(int workers, Feed feed) {
    std::vector<State> states(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) feed(states[static_cast<size_t>(w)], w);
    return tree_merge(std::move(states)).terminate();
}

Schema result_schema(const SelectList& sel) {
    if (sel.aggregate == Aggregate::sum) {
        Schema s;
        if (!sel.group_attribute.empty()) s.push_back(sel.group_attribute);
        s.push_back("sum(" + sel.sum_attribute + ")");
        return s;
    }
    return sel.attributes;
}

}  // namespace

const TableData* Dataset::find(const std::string& name) const {
    auto it = tables.find(name);
    return it == tables.end() ? nullptr : &it->second;
}

TableData load_tbl(const std::string& path, const TableStats& stats) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::exec, "cannot open table file '" + path + "'");
    TableData td;
    td.name = stats.name;
    for (const auto& a : stats.attributes) td.schema.push_back(a.name);
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::string body = line;
        if (body.back() == '|') body.pop_back();
        std::vector<std::string> fields;
        size_t start = 0;
        while (true) {
            size_t pos = body.find('|', start);
            if (pos == std::string::npos) {
                fields.push_back(body.substr(start));
                break;
            }
            fields.push_back(body.substr(start, pos - start));
            start = pos + 1;
        }
        if (fields.size() < td.schema.size())
            fail(ErrorKind::exec, "table '" + td.name + "' line " + std::to_string(lineno) +
                                      " has " + std::to_string(fields.size()) +
                                      " fields; expected " + std::to_string(td.schema.size()));
        Row row;
        row.reserve(td.schema.size());
        for (size_t c = 0; c < td.schema.size(); ++c)
            row.push_back(Value::parse_field(fields[c]));
        td.rows.push_back(std::move(row));
    }
    return td;
}

Dataset load_dataset(const std::string& dir, const Catalog& catalog,
                     const std::vector<std::string>& tables) {
    Dataset d;
    for (const auto& name : tables) {
        if (!catalog.has_table(name))
            fail(ErrorKind::exec, "no catalog entry for table '" + name + "'");
        d.tables.emplace(name, load_tbl(dir + "/" + name + ".tbl", catalog.table(name)));
    }
    return d;
}

std::vector<std::vector<Chunk>> partition_table(const TableData& data, int workers,
                                                int chunk_size) {
    if (workers < 1) fail(ErrorKind::exec, "worker count must be at least 1");
    if (chunk_size < 1) fail(ErrorKind::exec, "chunk size must be at least 1");
    std::vector<std::vector<Chunk>> out(static_cast<size_t>(workers));
    const size_t n = data.rows.size();
    const auto step = static_cast<size_t>(chunk_size);
    size_t index = 0;
    for (size_t begin = 0; begin < n; begin += step, ++index) {
        Chunk c;
        c.schema = data.schema;
        c.rows.assign(data.rows.begin() + static_cast<long>(begin),
                      data.rows.begin() + static_cast<long>(std::min(n, begin + step)));
        out[index % static_cast<size_t>(workers)].push_back(std::move(c));
    }
    return out;
}

RunOutput run_plan(const SharedPlan& plan, const Dataset& data, int workers, int chunk_size) {
    if (workers < 1) fail(ErrorKind::exec, "worker count must be at least 1");
    if (chunk_size < 1) fail(ErrorKind::exec, "chunk size must be at least 1");
    const PlanContext& ctx = plan.context();
    const Catalog& catalog = plan.catalog();

    // Everything below an exit, in creation order (children precede parents).
    std::set<int> needed;
    std::function<void(const DagNode*)> visit = [&](const DagNode* n) {
        if (!n || needed.count(n->id)) return;
        needed.insert(n->id);
        visit(n->left);
        visit(n->right);
    };
    for (const auto& e : plan.exits()) {
        if (!e.satisfied())
            fail(ErrorKind::exec, "query '" + e.query + "' has no exit in the plan");
        visit(e.node);
    }

    RunOutput out;
    std::map<int, Schema> schemas;
    std::map<int, std::vector<std::vector<Row>>> streams;  // node id -> per-worker rows

    for (const auto& owned : plan.dag().nodes()) {
        const DagNode* n = owned.get();
        if (!needed.count(n->id) || n->is_exit_op()) continue;
        switch (n->kind) {
            case NodeKind::scan: {
                const std::string& table = ctx.table_name(n->table);
                const TableData* td = data.find(table);
                if (!td) fail(ErrorKind::exec, "no data for table '" + table + "'");
                Schema declared;
                for (const auto& a : catalog.table(table).attributes)
                    declared.push_back(a.name);
                if (td->schema != declared)
                    fail(ErrorKind::exec,
                         "table '" + table + "' data does not match the declared schema");
                for (const Row& r : td->rows)
                    if (r.size() != declared.size())
                        fail(ErrorKind::exec, "table '" + table +
                                                  "' row width does not match the declared schema");
                schemas[n->id] = declared;
                auto parts = partition_table(*td, workers, chunk_size);
                auto& s = streams[n->id];
                s.assign(static_cast<size_t>(workers), {});
                for (int w = 0; w < workers; ++w)
                    for (const Chunk& c : parts[static_cast<size_t>(w)]) {
                        auto& mine = s[static_cast<size_t>(w)];
                        mine.insert(mine.end(), c.rows.begin(), c.rows.end());
                        out.stats.rows_read[table] += static_cast<long>(c.rows.size());
                    }
                break;
            }
            case NodeKind::select: {
                const Schema& schema = schemas.at(n->left->id);
                schemas[n->id] = schema;
                const auto& in = streams.at(n->left->id);
                auto& s = streams[n->id];
                s.assign(static_cast<size_t>(workers), {});
                for (int w = 0; w < workers; ++w) {
                    SelectionState state(schema, n->filters);
                    for (const Row& r : in[static_cast<size_t>(w)]) state.accumulate(r);
                    s[static_cast<size_t>(w)] = state.rows();
                }
                break;
            }
            case NodeKind::join: {
                const DagNode* build = n->left;
                const DagNode* probe = n->right;
                const Schema& bs = schemas.at(build->id);
                const Schema& ps = schemas.at(probe->id);
                Schema joined = bs;
                joined.insert(joined.end(), ps.begin(), ps.end());
                schemas[n->id] = std::move(joined);

                const bool hashed = n->variants.size() == 1;
                std::vector<std::string> build_keys;
                std::vector<int> probe_cols;
                std::vector<VariantCheck> checks;
                if (hashed) {
                    build_keys = side_keys(n->variants[0], build->table_set(), ctx);
                    for (const auto& a : side_keys(n->variants[0], probe->table_set(), ctx))
                        probe_cols.push_back(require_column(ps, a));
                } else {
                    checks = resolve_variants(n->variants, bs, ps);
                }

                std::vector<JoinBuildState> states;
                states.reserve(static_cast<size_t>(workers));
                for (int w = 0; w < workers; ++w) {
                    JoinBuildState st(bs, build_keys);
                    for (const Row& r : streams.at(build->id)[static_cast<size_t>(w)])
                        st.accumulate(r);
                    states.push_back(std::move(st));
                }
                const std::string bytes = tree_merge(std::move(states)).serialize();

                auto& s = streams[n->id];
                s.assign(static_cast<size_t>(workers), {});
                for (int w = 0; w < workers; ++w) {
                    JoinBuildState table = JoinBuildState::deserialize(bytes);
                    auto& mine = s[static_cast<size_t>(w)];
                    for (const Row& r : streams.at(probe->id)[static_cast<size_t>(w)]) {
                        const std::vector<Row>* bucket =
                            table.lookup(hashed ? encode_key(r, probe_cols) : std::string());
                        if (!bucket) continue;
                        for (const Row& b : *bucket) {
                            if (!hashed && !passes_variants(checks, b, r)) continue;
                            Row joined_row = b;
                            joined_row.insert(joined_row.end(), r.begin(), r.end());
                            mine.push_back(std::move(joined_row));
                        }
                    }
                }
                break;
            }
            default:
                fail(ErrorKind::exec, "unexpected operator below an exit");
        }
    }

    for (const auto& e : plan.exits()) {
        const Schema& schema = schemas.at(e.node->id);
        std::vector<int> res_cols;
        res_cols.reserve(e.residual_selections.size());
        for (const auto& p : e.residual_selections)
            res_cols.push_back(require_column(schema, p.attribute));
        std::vector<std::pair<int, int>> res_joins;
        res_joins.reserve(e.residual_joins.size());
        for (const auto& p : e.residual_joins)
            res_joins.emplace_back(require_column(schema, p.left_attribute),
                                   require_column(schema, p.right_attribute));
        auto passes = [&](const Row& r) {
            for (size_t i = 0; i < res_cols.size(); ++i)
                if (!compare_values(r[res_cols[i]], e.residual_selections[i].op,
                                    e.residual_selections[i].literal))
                    return false;
            for (auto [a, b] : res_joins)
                if (!compare_values(r[a], CompareOp::eq, r[b])) return false;
            return true;
        };

        const auto& stream = streams.at(e.node->id);
        const SelectList& sel = e.projection;
        QueryResult qr;
        qr.query = e.query;
        qr.schema = result_schema(sel);
        if (sel.aggregate == Aggregate::sum) {
            const int sum_col = require_column(schema, sel.sum_attribute);
            if (sel.group_attribute.empty()) {
                qr.rows = run_exit<SumState>(workers, [&](SumState& st, int w) {
                    for (const Row& r : stream[static_cast<size_t>(w)])
                        if (passes(r)) st.accumulate(r[sum_col]);
                });
            } else {
                const int group_col = require_column(schema, sel.group_attribute);
                qr.rows = run_exit<GroupByState>(workers, [&](GroupByState& st, int w) {
                    for (const Row& r : stream[static_cast<size_t>(w)])
                        if (passes(r)) st.accumulate(r[group_col], r[sum_col]);
                });
            }
        } else {
            std::vector<int> proj_cols;
            proj_cols.reserve(sel.attributes.size());
            for (const auto& a : sel.attributes) proj_cols.push_back(require_column(schema, a));
            if (sel.aggregate == Aggregate::distinct) {
                qr.rows = run_exit<DistinctState>(workers, [&](DistinctState& st, int w) {
                    for (const Row& r : stream[static_cast<size_t>(w)])
                        if (passes(r)) st.accumulate(project(r, proj_cols));
                });
            } else {
                qr.rows = run_exit<CollectState>(workers, [&](CollectState& st, int w) {
                    for (const Row& r : stream[static_cast<size_t>(w)])
                        if (passes(r)) st.accumulate(project(r, proj_cols));
                });
            }
        }
        out.queries.push_back(std::move(qr));
    }
    return out;
}

QueryResult naive_eval(const ParsedQuery& query, const Catalog& catalog, const Dataset& data) {
    const SplitPredicates split = split_predicates(query, catalog);

    // Bind tables smallest-first; predicates apply at the deepest table they
    // mention, so a mismatch prunes the whole subtree under it.
    std::vector<const TableData*> bound_tables;
    for (const auto& name : query.tables) {
        const TableData* td = data.find(name);
        if (!td) fail(ErrorKind::exec, "no data for table '" + name + "'");
        bound_tables.push_back(td);
    }
    std::stable_sort(bound_tables.begin(), bound_tables.end(),
                     [](const TableData* a, const TableData* b) {
                         return a->rows.size() < b->rows.size();
                     });
    const int depth_count = static_cast<int>(bound_tables.size());
    std::map<std::string, int> depth_of;
    for (int d = 0; d < depth_count; ++d) depth_of[bound_tables[static_cast<size_t>(d)]->name] = d;

    auto locate = [&](const std::string& attr) -> std::pair<int, int> {
        auto table = catalog.table_of(attr);
        if (!table) fail(ErrorKind::exec, "attribute '" + attr + "' not in the catalog");
        const int d = depth_of.at(*table);
        return {d, require_column(bound_tables[static_cast<size_t>(d)]->schema, attr)};
    };

    struct SelCheck {
        int col;
        CompareOp op;
        Value literal;
    };
    struct JoinCheck {
        int depth_a, col_a, col_b;  // col_b lives at the depth the check runs at
    };
    std::vector<std::vector<SelCheck>> sels_at(static_cast<size_t>(depth_count));
    std::vector<std::vector<JoinCheck>> joins_at(static_cast<size_t>(depth_count));
    for (const auto& sp : split.selections) {
        auto [d, c] = locate(sp.attribute);
        sels_at[static_cast<size_t>(d)].push_back({c, sp.op, sp.literal});
    }
    for (const auto& jp : split.joins) {
        auto [da, ca] = locate(jp.left_attribute);
        auto [db, cb] = locate(jp.right_attribute);
        if (da > db) {
            std::swap(da, db);
            std::swap(ca, cb);
        }
        joins_at[static_cast<size_t>(db)].push_back({da, ca, cb});
    }

    const SelectList& sel = query.select;
    QueryResult qr;
    qr.query = query.name;
    qr.schema = result_schema(sel);

    std::vector<std::pair<int, int>> proj;
    int sum_depth = -1, sum_col = -1, group_depth = -1, group_col = -1;
    if (sel.aggregate == Aggregate::sum) {
        std::tie(sum_depth, sum_col) = locate(sel.sum_attribute);
        if (!sel.group_attribute.empty())
            std::tie(group_depth, group_col) = locate(sel.group_attribute);
    } else {
        for (const auto& a : sel.attributes) proj.push_back(locate(a));
    }

    std::vector<const Row*> bound(static_cast<size_t>(depth_count), nullptr);
    auto emit = [&](auto&& feed) {
        std::function<void(int)> descend = [&](int depth) {
            if (depth == depth_count) {
                feed();
                return;
            }
            const auto d = static_cast<size_t>(depth);
            for (const Row& r : bound_tables[d]->rows) {
                bound[d] = &r;
                bool ok = true;
                for (const auto& s : sels_at[d])
                    if (!compare_values(r[s.col], s.op, s.literal)) {
                        ok = false;
                        break;
                    }
                for (const auto& j : joins_at[d]) {
                    if (!ok) break;
                    if (!compare_values((*bound[static_cast<size_t>(j.depth_a)])[j.col_a],
                                        CompareOp::eq, r[j.col_b]))
                        ok = false;
                }
                if (ok) descend(depth + 1);
            }
        };
        descend(0);
    };

    // The final reduction goes through the same aggregate states the shared
    // executor uses, so totals agree exactly.
    if (sel.aggregate == Aggregate::sum && group_depth < 0) {
        qr.rows = run_exit<SumState>(1, [&](SumState& st, int) {
            emit([&] { st.accumulate((*bound[static_cast<size_t>(sum_depth)])[sum_col]); });
        });
    } else if (sel.aggregate == Aggregate::sum) {
        qr.rows = run_exit<GroupByState>(1, [&](GroupByState& st, int) {
            emit([&] {
                st.accumulate((*bound[static_cast<size_t>(group_depth)])[group_col],
                              (*bound[static_cast<size_t>(sum_depth)])[sum_col]);
            });
        });
    } else {
        auto projected = [&] {
            Row r;
            r.reserve(proj.size());
            for (auto [d, c] : proj) r.push_back((*bound[static_cast<size_t>(d)])[c]);
            return r;
        };
        if (sel.aggregate == Aggregate::distinct) {
            qr.rows = run_exit<DistinctState>(1, [&](DistinctState& st, int) {
                emit([&] { st.accumulate(projected()); });
            });
        } else {
            qr.rows = run_exit<CollectState>(1, [&](CollectState& st, int) {
                emit([&] { st.accumulate(projected()); });
            });
        }
    }
    return qr;
}

bool compare_results(const std::vector<Row>& a, const std::vector<Row>& b,
                     bool set_semantics) {
    std::vector<std::string> ea, eb;
    ea.reserve(a.size());
    eb.reserve(b.size());
    for (const Row& r : a) ea.push_back(encode_row(r));
    for (const Row& r : b) eb.push_back(encode_row(r));
    std::sort(ea.begin(), ea.end());
    std::sort(eb.begin(), eb.end());
    if (set_semantics) {
        ea.erase(std::unique(ea.begin(), ea.end()), ea.end());
        eb.erase(std::unique(eb.begin(), eb.end()), eb.end());
    }
    return ea == eb;
}

std::string render_cell(const Value& v) {
    if (v.is_real()) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.12g", v.as_real());
        return buf;
    }
    return v.render();
}

std::string format_result(const QueryResult& result) {
    std::string out = "-- " + result.query + "\n";
    for (const Row& r : result.rows) {
        for (size_t i = 0; i < r.size(); ++i) {
            if (i) out.push_back('|');
            out += render_cell(r[i]);
        }
        out.push_back('\n');
    }
    return out;
}

std::string format_results(const RunOutput& out) {
    std::string text;
    for (const auto& q : out.queries) text += format_result(q);
    return text;
}

}  // namespace mqp
