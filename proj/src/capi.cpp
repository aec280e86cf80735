#include "mqplan/mqplan.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include "engine.hpp"
#include "error.hpp"
#include "textutil.hpp"

struct mqp_catalog {
    std::shared_ptr<mqp::Catalog> impl;
};

struct mqp_plan {
    std::unique_ptr<mqp::SharedPlan> impl;
};

namespace {

thread_local std::string g_error;
thread_local int g_status = MQP_OK;

void set_error(int status, std::string message) {
    g_status = status;
    g_error = std::move(message);
}

char* dup_text(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) {
        set_error(MQP_ERR_EXEC, "out of memory");
        return nullptr;
    }
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

bool bad_arg(const void* p, const char* what) {
    if (p) return false;
    set_error(MQP_ERR_EXEC, std::string(what) + " must not be NULL");
    return true;
}

template <typename F>
int guard_status(F&& f) {
    try {
        f();
        g_status = MQP_OK;
        return MQP_OK;
    } catch (const mqp::Error& e) {
        set_error(static_cast<int>(e.kind()), e.what());
        return g_status;
    } catch (const std::exception& e) {
        set_error(MQP_ERR_EXEC, e.what());
        return g_status;
    }
}

template <typename F>
auto guard_ptr(F&& f) -> decltype(f()) {
    try {
        auto out = f();
        if (out) g_status = MQP_OK;
        return out;
    } catch (const mqp::Error& e) {
        set_error(static_cast<int>(e.kind()), e.what());
        return nullptr;
    } catch (const std::exception& e) {
        set_error(MQP_ERR_EXEC, e.what());
        return nullptr;
    }
}

std::vector<std::string> split_csv(const char* csv) {
    std::vector<std::string> out;
    if (!csv || !*csv) return out;
    for (const std::string& part : mqp::split(csv, ','))
        out.push_back(mqp::trim(part));
    return out;
}

// Plans hold their own immutable catalog snapshot so later ingests into the
// source catalog cannot drift under a finished plan.
std::shared_ptr<const mqp::Catalog> snapshot(const mqp_catalog* catalog) {
    return std::make_shared<const mqp::Catalog>(*catalog->impl);
}

}  // namespace

extern "C" {

const char* mqp_last_error(void) { return g_error.c_str(); }

int mqp_last_status(void) { return g_status; }

void mqp_string_free(char* text) { std::free(text); }

mqp_catalog* mqp_catalog_default(void) {
    return guard_ptr([] {
        return new mqp_catalog{std::make_shared<mqp::Catalog>(mqp::Catalog::load_default())};
    });
}

mqp_catalog* mqp_catalog_open(const char* path) {
    if (bad_arg(path, "path")) return nullptr;
    return guard_ptr([&] {
        return new mqp_catalog{std::make_shared<mqp::Catalog>(mqp::Catalog::load_file(path))};
    });
}

int mqp_catalog_save(const mqp_catalog* catalog, const char* path) {
    if (bad_arg(catalog, "catalog") || bad_arg(path, "path")) return MQP_ERR_EXEC;
    return guard_status([&] { catalog->impl->save_file(path); });
}

char* mqp_catalog_text(const mqp_catalog* catalog) {
    if (bad_arg(catalog, "catalog")) return nullptr;
    return guard_ptr([&] { return dup_text(catalog->impl->to_text()); });
}

int mqp_catalog_ingest(mqp_catalog* catalog, const char* tbl_path, const char* table,
                       const char* attributes_csv) {
    if (bad_arg(catalog, "catalog") || bad_arg(tbl_path, "tbl_path") ||
        bad_arg(table, "table") || bad_arg(attributes_csv, "attributes_csv"))
        return MQP_ERR_EXEC;
    return guard_status([&] {
        catalog->impl->add_table(
            mqp::Catalog::ingest_tbl(tbl_path, table, split_csv(attributes_csv)));
    });
}

void mqp_catalog_free(mqp_catalog* catalog) { delete catalog; }

mqp_plan* mqp_plan_query(const mqp_catalog* catalog, const char* sql, unsigned seed) {
    if (bad_arg(catalog, "catalog") || bad_arg(sql, "sql")) return nullptr;
    return guard_ptr([&] {
        return new mqp_plan{mqp::plan_single_text(snapshot(catalog), sql, seed)};
    });
}

mqp_plan* mqp_plan_batch(const mqp_catalog* catalog, const char* sql,
                         const char* encoding_csv, unsigned seed) {
    if (bad_arg(catalog, "catalog") || bad_arg(sql, "sql")) return nullptr;
    return guard_ptr([&] {
        return new mqp_plan{
            mqp::plan_batch_text(snapshot(catalog), sql, split_csv(encoding_csv), seed)};
    });
}

void mqp_plan_free(mqp_plan* plan) { delete plan; }

char* mqp_plan_map(const mqp_plan* plan) {
    if (bad_arg(plan, "plan")) return nullptr;
    return guard_ptr([&] { return dup_text(mqp::dump_map(plan->impl->map())); });
}

char* mqp_plan_best(const mqp_plan* plan) {
    if (bad_arg(plan, "plan")) return nullptr;
    return guard_ptr([&] {
        return dup_text(mqp::dump_entry(plan->impl->best_key(), plan->impl->best()));
    });
}

char* mqp_plan_exits(const mqp_plan* plan) {
    if (bad_arg(plan, "plan")) return nullptr;
    return guard_ptr([&] { return dup_text(plan->impl->exit_table()); });
}

char* mqp_plan_explain(const mqp_plan* plan) {
    if (bad_arg(plan, "plan")) return nullptr;
    return guard_ptr([&] { return dup_text(plan->impl->dag().explain()); });
}

char* mqp_plan_graph(const mqp_plan* plan) {
    if (bad_arg(plan, "plan")) return nullptr;
    return guard_ptr([&] { return dup_text(mqp::emit_graph(*plan->impl)); });
}

char* mqp_plan_waypoint(const mqp_plan* plan) {
    if (bad_arg(plan, "plan")) return nullptr;
    return guard_ptr([&] { return dup_text(mqp::emit_waypoint(*plan->impl)); });
}

int mqp_plan_emit(const mqp_plan* plan, const char* dir, const char* name) {
    if (bad_arg(plan, "plan") || bad_arg(dir, "dir") || bad_arg(name, "name"))
        return MQP_ERR_EXEC;
    return guard_status([&] { mqp::write_plan_files(*plan->impl, dir, name); });
}

char* mqp_plan_run(const mqp_plan* plan, const char* data_dir, int workers, int chunk,
                   int verify, int* verified) {
    if (bad_arg(plan, "plan") || bad_arg(data_dir, "data_dir")) return nullptr;
    return guard_ptr([&]() -> char* {
        const mqp::SharedPlan& p = *plan->impl;
        mqp::Dataset data =
            mqp::load_dataset(data_dir, p.catalog(), p.context().tables());
        mqp::RunOutput run = mqp::run_plan(p, data, workers, chunk);
        std::string text = mqp::format_results(run);
        if (verify) {
            mqp::VerifyReport report = mqp::verify_run(p, data, run);
            text += report.details;
            if (verified) *verified = report.matched ? 1 : 0;
        } else if (verified) {
            *verified = 1;
        }
        return dup_text(text);
    });
}

}  // extern "C"
