#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ast.hpp"
#include "error.hpp"
#include "value.hpp"

namespace mqp {

using Schema = std::vector<std::string>;

// Byte IO for moving aggregate states between workers.  Every hop of the
// worker tree serializes on one side and deserializes on the other, so these
// are the wire format of the simulated network.
class ByteWriter {
public:
    void u8(uint8_t v);
    void u32(uint32_t v);
    void i64(int64_t v);
    void f64(double v);
    void str(const std::string& s);
    void value(const Value& v);
    void row(const Row& r);
    const std::string& bytes() const { return out_; }

private:
    std::string out_;
};

class ByteReader {
public:
    explicit ByteReader(const std::string& bytes) : in_(bytes) {}
    uint8_t u8();
    uint32_t u32();
    int64_t i64();
    double f64();
    std::string str();
    Value value();
    Row row();
    bool done() const { return pos_ == in_.size(); }
    void expect_done() const;

private:
    void need(size_t n) const;
    const std::string& in_;
    size_t pos_ = 0;
};

// Canonical identity encoding: an integral real collapses onto the integer
// spelling so hash keys and group keys match across representations.
std::string encode_value(const Value& v);
std::string encode_row(const Row& r);
std::string encode_key(const Row& row, const std::vector<int>& columns);

// Total order for deterministic result listings: numerics before text,
// numerics by value, text lexicographic; rows element-wise then by length.
int compare_total(const Value& a, const Value& b);
bool row_less(const Row& a, const Row& b);
void sort_rows(std::vector<Row>& rows);

int find_column(const Schema& schema, const std::string& attr);      // -1 when absent
int require_column(const Schema& schema, const std::string& attr);   // exec error when absent

// Exact order-independent summation: values live on a micro-unit grid (six
// decimal places), so merges associate and commute without float drift.
int64_t to_micro(const Value& v);
Value from_micro(int64_t micro, bool all_int);

// ---------------------------------------------------------------------------
// Aggregate states.  Each follows the same lifecycle: construct (init),
// accumulate one tuple at a time, merge sibling states, serialize/deserialize
// across tree hops, and terminate into final rows.  Merging is associative
// and commutative up to terminate() equality; deserialize(serialize(s)) is
// an identity.  Configuration travels inside the bytes so a deserialized
// state is self-contained.

// Filters rows by a predicate conjunction; terminate lists the survivors.
class SelectionState {
public:
    SelectionState() = default;
    SelectionState(Schema schema, std::vector<SelectionPredicate> filters);
    void accumulate(const Row& row);
    void merge(const SelectionState& other);
    std::vector<Row> terminate() const;
    std::string serialize() const;
    static SelectionState deserialize(const std::string& bytes);
    const Schema& schema() const { return schema_; }
    const std::vector<Row>& rows() const { return kept_; }  // worker-local view, arrival order

private:
    Schema schema_;
    std::vector<SelectionPredicate> filters_;
    std::vector<int> columns_;  // one per filter
    std::vector<Row> kept_;
};

// Hash table over the stream feeding a join's build side.  With key
// attributes the rows bucket by their encoded key; without (a join whose key
// is ambiguous or absent) everything lands in one bucket for nested probing.
class JoinBuildState {
public:
    JoinBuildState() = default;
    JoinBuildState(Schema schema, std::vector<std::string> key_attrs);
    void accumulate(const Row& row);
    void merge(const JoinBuildState& other);
    std::string key_of(const Row& probe_keyed) const;  // encodes this side's key columns
    const std::vector<Row>* lookup(const std::string& key) const;
    const std::map<std::string, std::vector<Row>>& buckets() const { return buckets_; }
    std::vector<Row> terminate() const;  // all rows
    std::string serialize() const;
    static JoinBuildState deserialize(const std::string& bytes);
    const Schema& schema() const { return schema_; }
    bool keyed() const { return !key_attrs_.empty(); }

private:
    Schema schema_;
    std::vector<std::string> key_attrs_;
    std::vector<int> key_columns_;
    std::map<std::string, std::vector<Row>> buckets_;
};

// Plain tuple collection (a query's result stream).
class CollectState {
public:
    void accumulate(Row row);
    void merge(const CollectState& other);
    std::vector<Row> terminate() const;
    std::string serialize() const;
    static CollectState deserialize(const std::string& bytes);

private:
    std::vector<Row> rows_;
};

// Set-semantics collection: duplicates removed by hashing the encoded tuple.
class DistinctState {
public:
    void accumulate(const Row& row);
    void merge(const DistinctState& other);
    std::vector<Row> terminate() const;
    std::string serialize() const;
    static DistinctState deserialize(const std::string& bytes);

private:
    std::map<std::string, Row> rows_;
};

// Single running total; empty input terminates to zero rows.
class SumState {
public:
    void accumulate(const Value& v);
    void merge(const SumState& other);
    std::vector<Row> terminate() const;
    std::string serialize() const;
    static SumState deserialize(const std::string& bytes);

private:
    int64_t micro_ = 0;
    int64_t count_ = 0;
    bool all_int_ = true;
};

// Per-group running totals keyed by the grouping value.
class GroupByState {
public:
    void accumulate(const Value& group, const Value& v);
    void merge(const GroupByState& other);
    std::vector<Row> terminate() const;  // one (group, total) row per group
    std::string serialize() const;
    static GroupByState deserialize(const std::string& bytes);

private:
    struct Slot {
        Value key;
        int64_t micro = 0;
        int64_t count = 0;
        bool all_int = true;
    };
    std::map<std::string, Slot> groups_;
};

// Folds per-worker states up a binary tree: each hop serializes both
// children, deserializes them at the parent, and merges — the byte path is
// exercised even for a single worker (its state still travels one hop to the
// coordinator).
template <typename State>
State tree_merge(std::vector<State> states) {
    if (states.empty()) fail(ErrorKind::exec, "tree_merge over zero states");
    while (states.size() > 1) {
        std::vector<State> next;
        for (size_t i = 0; i + 1 < states.size(); i += 2) {
            State a = State::deserialize(states[i].serialize());
            const State b = State::deserialize(states[i + 1].serialize());
            a.merge(b);
            next.push_back(std::move(a));
        }
        if (states.size() % 2 == 1)
            next.push_back(State::deserialize(states.back().serialize()));
        states = std::move(next);
    }
    return State::deserialize(states.front().serialize());
}

}  // namespace mqp
