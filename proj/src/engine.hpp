#pragma once

#include <memory>
#include <string>
#include <vector>

#include "executor.hpp"
#include "mqo.hpp"
#include "planfiles.hpp"

namespace mqp {

// Plans one standalone SELECT-FROM-WHERE query as its own single-exit batch,
// so every pipeline stage downstream of parsing sees the same plan shape.
std::unique_ptr<SharedPlan> plan_single_text(std::shared_ptr<const Catalog> catalog,
                                             const std::string& sql, unsigned seed = 0);

// Plans a MULTIQUERY .. END batch; `encoding` optionally renumbers the
// batch's tables.
std::unique_ptr<SharedPlan> plan_batch_text(std::shared_ptr<const Catalog> catalog,
                                            const std::string& sql,
                                            const std::vector<std::string>& encoding = {},
                                            unsigned seed = 0);

// Plans `sql` as a batch when it opens with MULTIQUERY, as a single query
// otherwise.
std::unique_ptr<SharedPlan> plan_any_text(std::shared_ptr<const Catalog> catalog,
                                          const std::string& sql,
                                          const std::vector<std::string>& encoding = {},
                                          unsigned seed = 0);

// Re-evaluates every query of a finished run with the reference evaluator
// and reports per-query verdict lines.
struct VerifyReport {
    bool matched = true;
    std::string details;
};
VerifyReport verify_run(const SharedPlan& plan, const Dataset& data, const RunOutput& run);

}  // namespace mqp
