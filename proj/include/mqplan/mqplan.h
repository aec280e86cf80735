#ifndef MQPLAN_H
#define MQPLAN_H

/*
 * C interface to the multi-query planning and execution engine.
 *
 * Handles are opaque; every function that can fail either returns NULL (for
 * handle/text producers) or a status code from the list below, and leaves a
 * message retrievable with mqp_last_error().  Strings returned by the
 * library are heap-allocated and must be released with mqp_string_free().
 */

#ifdef __cplusplus
extern "C" {
#endif

enum {
    MQP_OK = 0,
    MQP_ERR_PARSE = 1,    /* lexical or syntactic rejection */
    MQP_ERR_SEMANTIC = 2, /* unknown names, batch rule violations */
    MQP_ERR_PLAN = 3,     /* planning limits, unrepresentable plans */
    MQP_ERR_EXEC = 4      /* data files, execution, verification plumbing */
};

typedef struct mqp_catalog mqp_catalog;
typedef struct mqp_plan mqp_plan;

/* Most recent error message for the calling thread; never NULL. */
const char* mqp_last_error(void);

/* Status code of the most recent failure on the calling thread, MQP_OK when
 * the last call succeeded. */
int mqp_last_status(void);

/* Releases a string returned by this library. */
void mqp_string_free(char* text);

/* --- statistics catalog ------------------------------------------------ */

/* Built-in profile of the five standard sales tables. */
mqp_catalog* mqp_catalog_default(void);

/* Loads the line-oriented catalog format from a file. */
mqp_catalog* mqp_catalog_open(const char* path);

int mqp_catalog_save(const mqp_catalog* catalog, const char* path);

/* The catalog in its text format. */
char* mqp_catalog_text(const mqp_catalog* catalog);

/* Measures exact statistics from a pipe-delimited data file and defines (or
 * replaces) `table` with the comma-separated attribute names in column
 * order. */
int mqp_catalog_ingest(mqp_catalog* catalog, const char* tbl_path, const char* table,
                       const char* attributes_csv);

void mqp_catalog_free(mqp_catalog* catalog);

/* --- planning ---------------------------------------------------------- */

/* Plans one SELECT-FROM-WHERE query. */
mqp_plan* mqp_plan_query(const mqp_catalog* catalog, const char* sql, unsigned seed);

/* Plans a MULTIQUERY .. END batch.  `encoding_csv` optionally fixes the
 * table numbering (comma-separated table names); pass NULL for the default
 * first-appearance numbering. */
mqp_plan* mqp_plan_batch(const mqp_catalog* catalog, const char* sql,
                         const char* encoding_csv, unsigned seed);

void mqp_plan_free(mqp_plan* plan);

/* Dump of the memoized subset map, one entry per line. */
char* mqp_plan_map(const mqp_plan* plan);

/* The winning full-scope entry as a single line. */
char* mqp_plan_best(const mqp_plan* plan);

/* Per-query exit listing. */
char* mqp_plan_exits(const mqp_plan* plan);

/* Operator-level rendering of the shared execution DAG. */
char* mqp_plan_explain(const mqp_plan* plan);

/* Plan-file texts describing node topology and per-node processing. */
char* mqp_plan_graph(const mqp_plan* plan);
char* mqp_plan_waypoint(const mqp_plan* plan);

/* Writes <name>.graph and <name>.waypoint into `dir` (created if needed). */
int mqp_plan_emit(const mqp_plan* plan, const char* dir, const char* name);

/* --- execution --------------------------------------------------------- */

/* Executes the plan over <table>.tbl files found in `data_dir` and returns
 * the per-query result listing.  With `verify` nonzero every query is also
 * evaluated by the independent reference evaluator: verdict lines are
 * appended to the listing and *verified (ignored when NULL) receives 1 when
 * all queries agree, 0 otherwise. */
char* mqp_plan_run(const mqp_plan* plan, const char* data_dir, int workers, int chunk,
                   int verify, int* verified);

#ifdef __cplusplus
}
#endif

#endif /* MQPLAN_H */
