#pragma once

#include <map>
#include <string>
#include <vector>

#include "catalog.hpp"
#include "gla.hpp"
#include "mqo.hpp"

namespace mqp {

// A slice of a table's rows, the unit the scanner hands to workers.
struct Chunk {
    Schema schema;
    std::vector<Row> rows;
};

struct TableData {
    std::string name;
    Schema schema;
    std::vector<Row> rows;
};

struct Dataset {
    std::map<std::string, TableData> tables;
    const TableData* find(const std::string& name) const;
};

// Reads a pipe-delimited .tbl file against the table's declared attributes.
// A trailing delimiter is tolerated, surplus fields are dropped, short rows
// are an error.  Fields parse as int, then real, then text.
TableData load_tbl(const std::string& path, const TableStats& stats);

// Loads <table>.tbl from `dir` for each requested table.
Dataset load_dataset(const std::string& dir, const Catalog& catalog,
                     const std::vector<std::string>& tables);

// Splits a table into chunks of `chunk_size` rows dealt round-robin to
// `workers` streams, preserving row order within each worker.
std::vector<std::vector<Chunk>> partition_table(const TableData& data, int workers,
                                                int chunk_size);

struct RunStats {
    std::map<std::string, long> rows_read;  // per table, summed over workers
};

struct QueryResult {
    std::string query;
    Schema schema;
    std::vector<Row> rows;
};

struct RunOutput {
    std::vector<QueryResult> queries;  // batch order
    RunStats stats;
};

// Executes the shared plan over `data` on a simulated shared-nothing cluster:
// every worker owns a row partition and runs the whole DAG over it; each
// join's build side folds up the worker tree as serialized hash states and
// broadcasts back; per-query exits re-check residual predicates, project,
// and aggregate, with final termination at the coordinator only.
RunOutput run_plan(const SharedPlan& plan, const Dataset& data, int workers = 8,
                   int chunk_size = 64);

// Reference evaluation of one query: the filtered Cartesian product of its
// FROM tables (explored join-order-first so linked tables prune early),
// projected and aggregated.  Semantics match run_plan exactly.
QueryResult naive_eval(const ParsedQuery& query, const Catalog& catalog, const Dataset& data);

// Multiset equality over canonically encoded rows; `set_semantics` collapses
// duplicates on both sides first.
bool compare_results(const std::vector<Row>& a, const std::vector<Row>& b,
                     bool set_semantics = false);

// Result listing: one `-- <query>` header per query followed by its rows,
// pipe-delimited, reals printed to full working precision.
std::string render_cell(const Value& v);
std::string format_result(const QueryResult& result);
std::string format_results(const RunOutput& out);

}  // namespace mqp
