#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace mqp {

struct AttributeStats {
    std::string name;
    double distinct = 0;  // number of distinct values observed/estimated

    bool operator==(const AttributeStats&) const = default;
};

// Per-table statistics: row count plus the declared attribute list in column
// order.  The column order doubles as the data-file layout for that table.
struct TableStats {
    std::string name;
    double cardinality = 0;
    std::vector<AttributeStats> attributes;

    bool operator==(const TableStats&) const = default;

    const AttributeStats* find_attribute(const std::string& attr) const {
        for (const auto& a : attributes)
            if (a.name == attr) return &a;
        return nullptr;
    }
};

// Statistics catalog consumed by the estimator and planner.  Attribute names
// are globally unique: each one resolves to exactly one table.
class Catalog {
public:
    // Built-in profile for the five standard sales tables at scale factor 1.
    static Catalog load_default();

    // Text format, one declaration per line ('#' starts a comment):
    //   table <name> <cardinality>
    //   attr <name> <table> <distinct-count>
    static Catalog load_file(const std::string& path);
    static Catalog parse_text(const std::string& text);

    // Scans a pipe-delimited data file and returns exact statistics for it.
    // `attrs` names the leading columns in order; extra columns are ignored.
    static TableStats ingest_tbl(const std::string& path, const std::string& table,
                                 const std::vector<std::string>& attrs);

    void add_table(TableStats stats);

    std::string to_text() const;
    void save_file(const std::string& path) const;

    bool has_table(const std::string& name) const { return index_.count(name) != 0; }
    const TableStats& table(const std::string& name) const;
    const std::vector<TableStats>& tables() const { return tables_; }

    // Maps an attribute to its owning table, or nullopt if unknown.
    std::optional<std::string> table_of(const std::string& attr) const;

    // Distinct-value count V(table, attr); unknown names are semantic errors.
    double distinct_of(const std::string& table, const std::string& attr) const;
    double distinct_of_attr(const std::string& attr) const;

    double cardinality(const std::string& table) const;

    bool operator==(const Catalog& o) const { return tables_ == o.tables_; }

private:
    void check_invariants(const TableStats& stats) const;

    std::vector<TableStats> tables_;
    std::unordered_map<std::string, size_t> index_;          // table name -> slot
    std::unordered_map<std::string, std::string> attr_owner_;  // attr -> table
};

}  // namespace mqp
