#pragma once

#include <map>
#include <string>
#include <vector>

#include "joinorder.hpp"
#include "textutil.hpp"

namespace mqp {

// One memoized plan: the cheapest join order found for a set of tables,
// with its estimated output size, cost (sum of intermediate result sizes),
// and the queries answered somewhere inside that order.
struct PlanEntry {
    double size = 0;
    double cost = 0;
    JoinOrderPtr order;
    std::vector<std::string> satisfied;  // query names in batch order

    std::string order_text() const { return order ? render_order(order) : ""; }
};

// Keyed by ascending index strings ("0" < "01" < "012" ...), so iteration
// order doubles as the dump order.
using PlanMap = std::map<std::string, PlanEntry>;

// One line per entry:
//   <key> <size> <cost> <satisfied-count> <name,name,...|{}> <order>
inline std::string dump_map(const PlanMap& map) {
    std::string out;
    for (const auto& [key, e] : map) {
        out += key + " " + format_real(e.size) + " " + format_real(e.cost) + " " +
               std::to_string(e.satisfied.size()) + " ";
        out += e.satisfied.empty() ? "{}" : join_strings(e.satisfied, ",");
        out += " " + e.order_text() + "\n";
    }
    return out;
}

inline std::string dump_entry(const std::string& key, const PlanEntry& e) {
    std::string out = key + " " + format_real(e.size) + " " + format_real(e.cost) + " " +
                      std::to_string(e.satisfied.size()) + " ";
    out += e.satisfied.empty() ? "{}" : join_strings(e.satisfied, ",");
    out += " " + e.order_text();
    return out;
}

}  // namespace mqp
