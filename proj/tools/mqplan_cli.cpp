#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mqplan/mqplan.h"

namespace {

// Everything an invocation can configure; subcommands pick the fields they
// need.
struct RunConfig {
    std::string catalog_path;  // empty = built-in profile
    std::string sql_path;      // positional input file
    std::string inline_sql;    // -e text
    std::string out_dir = ".";
    std::string data_dir;
    std::string encoding;  // comma-separated table numbering
    unsigned seed = 0;
    int workers = 8;
    int chunk = 64;
    bool verify = false;
};

// Owning wrappers over the library's C handles.
struct Text {
    explicit Text(char* s) : p(s) {}
    Text(const Text&) = delete;
    Text& operator=(const Text&) = delete;
    ~Text() { mqp_string_free(p); }
    explicit operator bool() const { return p != nullptr; }
    char* p;
};

struct CatalogHandle {
    CatalogHandle(const CatalogHandle&) = delete;
    CatalogHandle& operator=(const CatalogHandle&) = delete;
    explicit CatalogHandle(mqp_catalog* c) : p(c) {}
    ~CatalogHandle() { mqp_catalog_free(p); }
    mqp_catalog* p;
};

struct PlanHandle {
    PlanHandle(const PlanHandle&) = delete;
    PlanHandle& operator=(const PlanHandle&) = delete;
    explicit PlanHandle(mqp_plan* q) : p(q) {}
    ~PlanHandle() { mqp_plan_free(p); }
    mqp_plan* p;
};

int report_error() {
    std::fprintf(stderr, "error: %s\n", mqp_last_error());
    const int code = mqp_last_status();
    return code == MQP_OK ? MQP_ERR_EXEC : code;
}

int report_usage(const std::string& message) {
    std::fprintf(stderr, "error: %s\n", message.c_str());
    return MQP_ERR_EXEC;
}

bool read_sql(const RunConfig& cfg, std::string& out, int& code) {
    if (!cfg.inline_sql.empty()) {
        out = cfg.inline_sql;
        if (out.back() != '\n') out.push_back('\n');
        return true;
    }
    if (cfg.sql_path.empty()) {
        code = report_usage("no input: pass an SQL file or -e <text>");
        return false;
    }
    std::ifstream in(cfg.sql_path);
    if (!in) {
        code = report_usage("cannot open '" + cfg.sql_path + "'");
        return false;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    out = buf.str();
    return true;
}

mqp_catalog* open_catalog(const RunConfig& cfg) {
    return cfg.catalog_path.empty() ? mqp_catalog_default()
                                    : mqp_catalog_open(cfg.catalog_path.c_str());
}

bool is_batch(const std::string& sql) {
    size_t i = 0;
    while (i < sql.size() && std::isspace(static_cast<unsigned char>(sql[i]))) ++i;
    return i < sql.size() && sql.compare(i, 10, "MULTIQUERY") == 0;
}

mqp_plan* make_plan(const RunConfig& cfg, const mqp_catalog* catalog,
                    const std::string& sql) {
    if (is_batch(sql))
        return mqp_plan_batch(catalog, sql.c_str(),
                              cfg.encoding.empty() ? nullptr : cfg.encoding.c_str(),
                              cfg.seed);
    return mqp_plan_query(catalog, sql.c_str(), cfg.seed);
}

// plan/mqplan: map dump, winning entry, per-query exits, then the DAG.
int print_plan_report(const mqp_plan* plan) {
    Text map(mqp_plan_map(plan));
    if (!map) return report_error();
    std::fputs(map.p, stdout);
    Text best(mqp_plan_best(plan));
    if (!best) return report_error();
    std::printf("best: %s\n", best.p);
    Text exits(mqp_plan_exits(plan));
    if (!exits) return report_error();
    std::fputs(exits.p, stdout);
    Text dag(mqp_plan_explain(plan));
    if (!dag) return report_error();
    std::fputs(dag.p, stdout);
    return MQP_OK;
}

int cmd_plan(const RunConfig& cfg, bool batch_command) {
    std::string sql;
    int code = 0;
    if (!read_sql(cfg, sql, code)) return code;
    CatalogHandle catalog(open_catalog(cfg));
    if (!catalog.p) return report_error();
    PlanHandle plan(batch_command
                        ? mqp_plan_batch(catalog.p, sql.c_str(),
                                         cfg.encoding.empty() ? nullptr : cfg.encoding.c_str(),
                                         cfg.seed)
                        : mqp_plan_query(catalog.p, sql.c_str(), cfg.seed));
    if (!plan.p) return report_error();
    return print_plan_report(plan.p);
}

int cmd_emit(const RunConfig& cfg) {
    std::string sql;
    int code = 0;
    if (!read_sql(cfg, sql, code)) return code;
    CatalogHandle catalog(open_catalog(cfg));
    if (!catalog.p) return report_error();
    PlanHandle plan(make_plan(cfg, catalog.p, sql));
    if (!plan.p) return report_error();
    const int status = mqp_plan_emit(plan.p, cfg.out_dir.c_str(), "plan");
    if (status != MQP_OK) return report_error();
    std::printf("wrote %s/plan.graph\n", cfg.out_dir.c_str());
    std::printf("wrote %s/plan.waypoint\n", cfg.out_dir.c_str());
    return MQP_OK;
}

int cmd_run(const RunConfig& cfg) {
    if (cfg.workers < 1) return report_usage("workers must be at least 1");
    if (cfg.chunk < 1) return report_usage("chunk size must be at least 1");
    if (cfg.data_dir.empty()) return report_usage("run needs --data <dir>");
    std::string sql;
    int code = 0;
    if (!read_sql(cfg, sql, code)) return code;
    CatalogHandle catalog(open_catalog(cfg));
    if (!catalog.p) return report_error();
    PlanHandle plan(make_plan(cfg, catalog.p, sql));
    if (!plan.p) return report_error();
    int verified = 1;
    Text results(mqp_plan_run(plan.p, cfg.data_dir.c_str(), cfg.workers, cfg.chunk,
                              cfg.verify ? 1 : 0, &verified));
    if (!results) return report_error();
    std::fputs(results.p, stdout);
    if (cfg.verify && !verified) {
        std::fprintf(stderr, "error: verification failed\n");
        return MQP_ERR_EXEC;
    }
    return MQP_OK;
}

int cmd_explain(const RunConfig& cfg) {
    std::string sql;
    int code = 0;
    if (!read_sql(cfg, sql, code)) return code;
    CatalogHandle catalog(open_catalog(cfg));
    if (!catalog.p) return report_error();
    PlanHandle plan(make_plan(cfg, catalog.p, sql));
    if (!plan.p) return report_error();
    Text dag(mqp_plan_explain(plan.p));
    if (!dag) return report_error();
    std::fputs(dag.p, stdout);
    return MQP_OK;
}

int cmd_catalog_show(const RunConfig& cfg) {
    CatalogHandle catalog(open_catalog(cfg));
    if (!catalog.p) return report_error();
    Text text(mqp_catalog_text(catalog.p));
    if (!text) return report_error();
    std::fputs(text.p, stdout);
    return MQP_OK;
}

int cmd_catalog_ingest(const RunConfig& cfg, const std::string& tbl,
                       const std::string& table, const std::string& attrs,
                       const std::string& save_path) {
    CatalogHandle catalog(open_catalog(cfg));
    if (!catalog.p) return report_error();
    if (mqp_catalog_ingest(catalog.p, tbl.c_str(), table.c_str(), attrs.c_str()) != MQP_OK)
        return report_error();
    if (!save_path.empty()) {
        if (mqp_catalog_save(catalog.p, save_path.c_str()) != MQP_OK) return report_error();
        std::printf("wrote %s\n", save_path.c_str());
        return MQP_OK;
    }
    Text text(mqp_catalog_text(catalog.p));
    if (!text) return report_error();
    std::fputs(text.p, stdout);
    return MQP_OK;
}

void add_input_options(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("sql", cfg.sql_path, "SQL input file");
    sub->add_option("-e", cfg.inline_sql, "inline SQL text");
    sub->add_option("--catalog", cfg.catalog_path, "statistics catalog file");
    sub->add_option("--seed", cfg.seed, "tie-break randomization seed");
    sub->add_option("--encoding", cfg.encoding, "comma-separated table numbering");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-query planning and execution over pipe-delimited data"};
    app.require_subcommand(1);
    RunConfig cfg;

    CLI::App* plan = app.add_subcommand("plan", "optimize one query: subset map, best order, operator tree");
    add_input_options(plan, cfg);

    CLI::App* mqplan = app.add_subcommand("mqplan", "optimize a MULTIQUERY batch into one shared plan");
    add_input_options(mqplan, cfg);

    CLI::App* emit = app.add_subcommand("emit", "write the graph and waypoint plan files");
    add_input_options(emit, cfg);
    emit->add_option("--out", cfg.out_dir, "output directory (default .)");

    CLI::App* run = app.add_subcommand("run", "execute over <table>.tbl files and print results");
    add_input_options(run, cfg);
    run->add_option("--data", cfg.data_dir, "directory holding <table>.tbl files");
    run->add_option("--workers", cfg.workers, "simulated worker count (default 8)");
    run->add_option("--chunk", cfg.chunk, "rows per scan chunk (default 64)");
    run->add_flag("--verify", cfg.verify, "check every query against the reference evaluator");

    CLI::App* explain = app.add_subcommand("explain", "print the operator-level plan");
    add_input_options(explain, cfg);

    CLI::App* catalog = app.add_subcommand("catalog", "statistics catalog utilities");
    catalog->require_subcommand(1);
    CLI::App* show = catalog->add_subcommand("show", "print the catalog");
    show->add_option("--catalog", cfg.catalog_path, "statistics catalog file");
    std::string tbl_path, table_name, attrs_csv, save_path;
    CLI::App* ingest = catalog->add_subcommand("ingest", "measure statistics from a .tbl file");
    ingest->add_option("tbl", tbl_path, ".tbl data file")->required();
    ingest->add_option("--table", table_name, "table name")->required();
    ingest->add_option("--attrs", attrs_csv, "comma-separated attribute names")->required();
    ingest->add_option("--catalog", cfg.catalog_path, "statistics catalog file to extend");
    ingest->add_option("--save", save_path, "write the updated catalog here instead of stdout");

    CLI11_PARSE(app, argc, argv);

    if (plan->parsed()) return cmd_plan(cfg, false);
    if (mqplan->parsed()) return cmd_plan(cfg, true);
    if (emit->parsed()) return cmd_emit(cfg);
    if (run->parsed()) return cmd_run(cfg);
    if (explain->parsed()) return cmd_explain(cfg);
    if (catalog->parsed()) {
        if (show->parsed()) return cmd_catalog_show(cfg);
        if (ingest->parsed())
            return cmd_catalog_ingest(cfg, tbl_path, table_name, attrs_csv, save_path);
    }
    return 0;
}
