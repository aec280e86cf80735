#include "catalog.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "error.hpp"
#include "textutil.hpp"

namespace mqp {

namespace {

TableStats make_table(const std::string& name, double card,
                      std::initializer_list<std::pair<const char*, double>> attrs) {
    TableStats t;
    t.name = name;
    t.cardinality = card;
    for (const auto& [attr, distinct] : attrs) t.attributes.push_back({attr, distinct});
    return t;
}

}  // namespace

Catalog Catalog::load_default() {
    Catalog cat;
    cat.add_table(make_table("region", 5,
                             {{"r_regionkey", 5}, {"r_name", 5}, {"r_comment", 5}}));
    cat.add_table(make_table("nation", 25,
                             {{"n_nationkey", 25},
                              {"n_name", 25},
                              {"n_regionkey", 5},
                              {"n_comment", 25}}));
    cat.add_table(make_table("customer", 150000,
                             {{"c_custkey", 150000},
                              {"c_name", 150000},
                              {"c_address", 150000},
                              {"c_nationkey", 25},
                              {"c_phone", 150000},
                              {"c_acctbal", 140187},
                              {"c_mktsegment", 5},
                              {"c_comment", 149968}}));
    cat.add_table(make_table("orders", 1500000,
                             {{"o_orderkey", 1500000},
                              {"o_custkey", 150000},
                              {"o_orderstatus", 3},
                              {"o_totalprice", 1464556},
                              {"o_orderdate", 2406},
                              {"o_orderpriority", 5},
                              {"o_clerk", 1000},
                              {"o_shippriority", 1},
                              {"o_comment", 1482071}}));
    cat.add_table(make_table("lineitem", 6001215,
                             {{"l_orderkey", 1500000},
                              {"l_partkey", 200000},
                              {"l_suppkey", 10000},
                              {"l_linenumber", 7},
                              {"l_quantity", 50},
                              {"l_extendedprice", 933900},
                              {"l_discount", 11},
                              {"l_tax", 9},
                              {"l_returnflag", 3},
                              {"l_linestatus", 2},
                              {"l_shipdate", 2526},
                              {"l_commitdate", 2466},
                              {"l_receiptdate", 2554},
                              {"l_shipinstruct", 4},
                              {"l_shipmode", 7},
                              {"l_comment", 4580667}}));
    return cat;
}

Catalog Catalog::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::exec, "cannot open catalog file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str());
}

Catalog Catalog::parse_text(const std::string& text) {
    Catalog cat;
    // Attributes may reference tables declared later, so collect first.
    std::vector<TableStats> tables;
    std::unordered_map<std::string, size_t> where;
    struct PendingAttr {
        std::string name, table;
        double distinct;
        int line;
    };
    std::vector<PendingAttr> attrs;

    int lineno = 0;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;

        std::istringstream ls(line);
        std::string kind;
        ls >> kind;
        auto want_number = [&](const std::string& what) {
            std::string tok;
            if (!(ls >> tok))
                fail(ErrorKind::lex, "catalog line " + std::to_string(lineno) + ": missing " + what);
            try {
                size_t pos = 0;
                double v = std::stod(tok, &pos);
                if (pos != tok.size()) throw std::invalid_argument(tok);
                return v;
            } catch (...) {
                fail(ErrorKind::lex, "catalog line " + std::to_string(lineno) + ": bad " + what +
                                         " '" + tok + "'");
            }
        };

        if (kind == "table") {
            std::string name;
            if (!(ls >> name))
                fail(ErrorKind::lex,
                     "catalog line " + std::to_string(lineno) + ": missing table name");
            double card = want_number("cardinality");
            if (where.count(name))
                fail(ErrorKind::semantic,
                     "catalog line " + std::to_string(lineno) + ": duplicate table '" + name + "'");
            where[name] = tables.size();
            tables.push_back({name, card, {}});
        } else if (kind == "attr") {
            std::string name, table;
            if (!(ls >> name >> table))
                fail(ErrorKind::lex,
                     "catalog line " + std::to_string(lineno) + ": malformed attr declaration");
            double distinct = want_number("distinct count");
            attrs.push_back({name, table, distinct, lineno});
        } else {
            fail(ErrorKind::lex, "catalog line " + std::to_string(lineno) +
                                     ": unknown declaration '" + kind + "'");
        }
    }

    for (const auto& a : attrs) {
        auto it = where.find(a.table);
        if (it == where.end())
            fail(ErrorKind::semantic, "catalog line " + std::to_string(a.line) +
                                          ": attr '" + a.name + "' references unknown table '" +
                                          a.table + "'");
        tables[it->second].attributes.push_back({a.name, a.distinct});
    }
    for (auto& t : tables) cat.add_table(std::move(t));
    return cat;
}

TableStats Catalog::ingest_tbl(const std::string& path, const std::string& table,
                               const std::vector<std::string>& attrs) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::exec, "cannot open data file '" + path + "'");

    TableStats stats;
    stats.name = table;
    std::vector<std::set<std::string>> seen(attrs.size());

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split(line, '|');
        // A trailing delimiter yields one empty final field; drop it.
        if (!fields.empty() && fields.back().empty()) fields.pop_back();
        if (fields.size() < attrs.size())
            fail(ErrorKind::exec, path + ":" + std::to_string(lineno) + ": expected at least " +
                                      std::to_string(attrs.size()) + " columns, found " +
                                      std::to_string(fields.size()));
        stats.cardinality += 1;
        for (size_t i = 0; i < attrs.size(); ++i) seen[i].insert(fields[i]);
    }
    for (size_t i = 0; i < attrs.size(); ++i)
        stats.attributes.push_back({attrs[i], static_cast<double>(seen[i].size())});
    return stats;
}

void Catalog::check_invariants(const TableStats& stats) const {
    for (const auto& a : stats.attributes) {
        if (stats.cardinality > 0 && a.distinct > std::ceil(stats.cardinality))
            fail(ErrorKind::semantic, "attribute '" + a.name + "' of table '" + stats.name +
                                          "' declares more distinct values than rows");
        if (a.distinct < 0)
            fail(ErrorKind::semantic, "attribute '" + a.name + "' declares a negative distinct count");
    }
}

void Catalog::add_table(TableStats stats) {
    if (index_.count(stats.name))
        fail(ErrorKind::semantic, "duplicate table '" + stats.name + "'");
    check_invariants(stats);
    for (const auto& a : stats.attributes) {
        auto it = attr_owner_.find(a.name);
        if (it != attr_owner_.end())
            fail(ErrorKind::semantic, "attribute '" + a.name + "' already belongs to table '" +
                                          it->second + "'");
    }
    for (const auto& a : stats.attributes) attr_owner_[a.name] = stats.name;
    index_[stats.name] = tables_.size();
    tables_.push_back(std::move(stats));
}

std::string Catalog::to_text() const {
    std::string out;
    for (const auto& t : tables_)
        out += "table " + t.name + " " + format_exact(t.cardinality) + "\n";
    for (const auto& t : tables_)
        for (const auto& a : t.attributes)
            out += "attr " + a.name + " " + t.name + " " + format_exact(a.distinct) + "\n";
    return out;
}

void Catalog::save_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::exec, "cannot write catalog file '" + path + "'");
    out << to_text();
}

const TableStats& Catalog::table(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) fail(ErrorKind::semantic, "unknown table '" + name + "'");
    return tables_[it->second];
}

std::optional<std::string> Catalog::table_of(const std::string& attr) const {
    auto it = attr_owner_.find(attr);
    if (it == attr_owner_.end()) return std::nullopt;
    return it->second;
}

double Catalog::distinct_of(const std::string& table, const std::string& attr) const {
    const AttributeStats* a = this->table(table).find_attribute(attr);
    if (!a)
        fail(ErrorKind::semantic, "table '" + table + "' has no attribute '" + attr + "'");
    return a->distinct;
}

double Catalog::distinct_of_attr(const std::string& attr) const {
    auto owner = table_of(attr);
    if (!owner) fail(ErrorKind::semantic, "unknown attribute '" + attr + "'");
    return distinct_of(*owner, attr);
}

double Catalog::cardinality(const std::string& name) const { return table(name).cardinality; }

}  // namespace mqp
