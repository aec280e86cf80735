#include "engine.hpp"

#include <cctype>

#include "parser.hpp"

namespace mqp {

std::unique_ptr<SharedPlan> plan_single_text(std::shared_ptr<const Catalog> catalog,
                                             const std::string& sql, unsigned seed) {
    ParsedQuery q = parse_query(sql, *catalog);
    MultiQuery mq;
    mq.all_tables = q.tables;
    mq.queries.push_back(std::move(q));
    return shared_optimized_plan(std::move(catalog), std::move(mq), seed);
}

std::unique_ptr<SharedPlan> plan_batch_text(std::shared_ptr<const Catalog> catalog,
                                            const std::string& sql,
                                            const std::vector<std::string>& encoding,
                                            unsigned seed) {
    MultiQuery mq = parse_multiquery(sql, *catalog, encoding);
    return shared_optimized_plan(std::move(catalog), std::move(mq), seed);
}

std::unique_ptr<SharedPlan> plan_any_text(std::shared_ptr<const Catalog> catalog,
                                          const std::string& sql,
                                          const std::vector<std::string>& encoding,
                                          unsigned seed) {
    for (size_t i = 0; i < sql.size();) {
        if (std::isspace(static_cast<unsigned char>(sql[i]))) {
            ++i;
            continue;
        }
        if (sql.compare(i, 10, "MULTIQUERY") == 0)
            return plan_batch_text(std::move(catalog), sql, encoding, seed);
        break;
    }
    return plan_single_text(std::move(catalog), sql, seed);
}

VerifyReport verify_run(const SharedPlan& plan, const Dataset& data, const RunOutput& run) {
    VerifyReport report;
    for (size_t i = 0; i < run.queries.size(); ++i) {
        const ParsedQuery& q = plan.mq().queries[i];
        QueryResult oracle = naive_eval(q, plan.catalog(), data);
        const bool ok = compare_results(run.queries[i].rows, oracle.rows);
        report.matched = report.matched && ok;
        report.details += "verify " + q.name + ": ";
        if (ok)
            report.details += "ok\n";
        else
            report.details += "MISMATCH (engine " + std::to_string(run.queries[i].rows.size()) +
                              " rows, reference " + std::to_string(oracle.rows.size()) + ")\n";
    }
    return report;
}

}  // namespace mqp
