#include "gla.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>

namespace mqp {

namespace {

// Largest magnitude the micro-unit grid represents without overflowing.
constexpr double kMicroLimit = 9.0e12;

int64_t add_micro(int64_t a, int64_t b) {
    int64_t out = 0;
    if (__builtin_add_overflow(a, b, &out))
        fail(ErrorKind::exec, "aggregate overflow: running total exceeds exact range");
    return out;
}

std::string real_text(double d) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", d);
    return buf;
}

}  // namespace

void ByteWriter::u8(uint8_t v) { out_.push_back(static_cast<char>(v)); }

void ByteWriter::u32(uint32_t v) {
    for (int shift = 0; shift < 32; shift += 8)
        out_.push_back(static_cast<char>((v >> shift) & 0xff));
}

void ByteWriter::i64(int64_t v) {
    auto u = static_cast<uint64_t>(v);
    for (int shift = 0; shift < 64; shift += 8)
        out_.push_back(static_cast<char>((u >> shift) & 0xff));
}

void ByteWriter::f64(double v) { i64(static_cast<int64_t>(std::bit_cast<uint64_t>(v))); }

void ByteWriter::str(const std::string& s) {
    u32(static_cast<uint32_t>(s.size()));
    out_.append(s);
}

void ByteWriter::value(const Value& v) {
    if (v.is_int()) {
        u8(0);
        i64(v.as_int());
    } else if (v.is_real()) {
        u8(1);
        f64(v.as_real());
    } else {
        u8(2);
        str(v.as_text());
    }
}

void ByteWriter::row(const Row& r) {
    u32(static_cast<uint32_t>(r.size()));
    for (const Value& v : r) value(v);
}

void ByteReader::need(size_t n) const {
    if (pos_ + n > in_.size()) fail(ErrorKind::exec, "state bytes truncated");
}

uint8_t ByteReader::u8() {
    need(1);
    return static_cast<uint8_t>(in_[pos_++]);
}

uint32_t ByteReader::u32() {
    need(4);
    uint32_t v = 0;
    for (int shift = 0; shift < 32; shift += 8)
        v |= static_cast<uint32_t>(static_cast<uint8_t>(in_[pos_++])) << shift;
    return v;
}

int64_t ByteReader::i64() {
    need(8);
    uint64_t v = 0;
    for (int shift = 0; shift < 64; shift += 8)
        v |= static_cast<uint64_t>(static_cast<uint8_t>(in_[pos_++])) << shift;
    return static_cast<int64_t>(v);
}

double ByteReader::f64() { return std::bit_cast<double>(static_cast<uint64_t>(i64())); }

std::string ByteReader::str() {
    uint32_t n = u32();
    need(n);
    std::string s = in_.substr(pos_, n);
    pos_ += n;
    return s;
}

Value ByteReader::value() {
    switch (u8()) {
        case 0: return Value(i64());
        case 1: return Value(f64());
        case 2: return Value(str());
        default: fail(ErrorKind::exec, "state bytes corrupted: unknown value tag");
    }
}

Row ByteReader::row() {
    uint32_t n = u32();
    Row r;
    r.reserve(n);
    for (uint32_t i = 0; i < n; ++i) r.push_back(value());
    return r;
}

void ByteReader::expect_done() const {
    if (!done()) fail(ErrorKind::exec, "state bytes have trailing data");
}

std::string encode_value(const Value& v) {
    if (v.is_text()) return "t" + v.as_text();
    if (v.is_int()) return "i" + std::to_string(v.as_int());
    double d = v.as_real();
    if (std::floor(d) == d && std::fabs(d) <= 9.0e15)
        return "i" + std::to_string(static_cast<int64_t>(d));
    return "r" + real_text(d);
}

std::string encode_row(const Row& r) {
    ByteWriter w;
    w.u32(static_cast<uint32_t>(r.size()));
    for (const Value& v : r) w.str(encode_value(v));
    return w.bytes();
}

int compare_total(const Value& a, const Value& b) {
    const bool an = a.is_numeric();
    const bool bn = b.is_numeric();
    if (an != bn) return an ? -1 : 1;
    if (!an) {
        const std::string& x = a.as_text();
        const std::string& y = b.as_text();
        return x < y ? -1 : (y < x ? 1 : 0);
    }
    if (a.is_int() && b.is_int()) {
        int64_t x = a.as_int();
        int64_t y = b.as_int();
        return x < y ? -1 : (y < x ? 1 : 0);
    }
    double x = a.numeric();
    double y = b.numeric();
    return x < y ? -1 : (y < x ? 1 : 0);
}

bool row_less(const Row& a, const Row& b) {
    size_t n = std::min(a.size(), b.size());
    for (size_t i = 0; i < n; ++i) {
        int c = compare_total(a[i], b[i]);
        if (c != 0) return c < 0;
    }
    return a.size() < b.size();
}

void sort_rows(std::vector<Row>& rows) { std::sort(rows.begin(), rows.end(), row_less); }

int find_column(const Schema& schema, const std::string& attr) {
    for (size_t i = 0; i < schema.size(); ++i)
        if (schema[i] == attr) return static_cast<int>(i);
    return -1;
}

int require_column(const Schema& schema, const std::string& attr) {
    int c = find_column(schema, attr);
    if (c < 0) fail(ErrorKind::exec, "attribute '" + attr + "' missing from stream schema");
    return c;
}

int64_t to_micro(const Value& v) {
    if (v.is_text())
        fail(ErrorKind::exec, "aggregate over non-numeric value '" + v.as_text() + "'");
    double d = v.numeric();
    if (std::fabs(d) > kMicroLimit)
        fail(ErrorKind::exec, "aggregate overflow: value '" + v.render() +
                                  "' exceeds exact range");
    if (v.is_int()) return v.as_int() * 1'000'000;
    return llround(d * 1e6);
}

Value from_micro(int64_t micro, bool all_int) {
    if (all_int) return Value(micro / 1'000'000);
    return Value(static_cast<double>(micro) / 1e6);
}

// --- SelectionState -------------------------------------------------------

SelectionState::SelectionState(Schema schema, std::vector<SelectionPredicate> filters)
    : schema_(std::move(schema)), filters_(std::move(filters)) {
    columns_.reserve(filters_.size());
    for (const auto& f : filters_) columns_.push_back(require_column(schema_, f.attribute));
}

void SelectionState::accumulate(const Row& row) {
    for (size_t i = 0; i < filters_.size(); ++i)
        if (!compare_values(row[columns_[i]], filters_[i].op, filters_[i].literal)) return;
    kept_.push_back(row);
}

void SelectionState::merge(const SelectionState& other) {
    if (schema_ != other.schema_ || filters_ != other.filters_)
        fail(ErrorKind::exec, "merging filter states with different configurations");
    kept_.insert(kept_.end(), other.kept_.begin(), other.kept_.end());
}

std::vector<Row> SelectionState::terminate() const {
    std::vector<Row> out = kept_;
    sort_rows(out);
    return out;
}

std::string SelectionState::serialize() const {
    ByteWriter w;
    w.u32(static_cast<uint32_t>(schema_.size()));
    for (const auto& a : schema_) w.str(a);
    w.u32(static_cast<uint32_t>(filters_.size()));
    for (const auto& f : filters_) {
        w.str(f.table);
        w.str(f.attribute);
        w.u8(static_cast<uint8_t>(f.op));
        w.value(f.literal);
        w.str(f.lexeme);
    }
    w.u32(static_cast<uint32_t>(kept_.size()));
    for (const Row& r : kept_) w.row(r);
    return w.bytes();
}

SelectionState SelectionState::deserialize(const std::string& bytes) {
    ByteReader r(bytes);
    Schema schema(r.u32());
    for (auto& a : schema) a = r.str();
    std::vector<SelectionPredicate> filters(r.u32());
    for (auto& f : filters) {
        f.table = r.str();
        f.attribute = r.str();
        f.op = static_cast<CompareOp>(r.u8());
        f.literal = r.value();
        f.lexeme = r.str();
    }
    SelectionState s(std::move(schema), std::move(filters));
    uint32_t n = r.u32();
    s.kept_.reserve(n);
    for (uint32_t i = 0; i < n; ++i) s.kept_.push_back(r.row());
    r.expect_done();
    return s;
}

// --- JoinBuildState -------------------------------------------------------

JoinBuildState::JoinBuildState(Schema schema, std::vector<std::string> key_attrs)
    : schema_(std::move(schema)), key_attrs_(std::move(key_attrs)) {
    key_columns_.reserve(key_attrs_.size());
    for (const auto& a : key_attrs_) key_columns_.push_back(require_column(schema_, a));
}

std::string encode_key(const Row& row, const std::vector<int>& columns) {
    ByteWriter w;
    for (int c : columns) w.str(encode_value(row[c]));
    return w.bytes();
}

void JoinBuildState::accumulate(const Row& row) {
    buckets_[keyed() ? encode_key(row, key_columns_) : std::string()].push_back(row);
}

void JoinBuildState::merge(const JoinBuildState& other) {
    if (schema_ != other.schema_ || key_attrs_ != other.key_attrs_)
        fail(ErrorKind::exec, "merging hash states with different configurations");
    for (const auto& [key, rows] : other.buckets_) {
        auto& mine = buckets_[key];
        mine.insert(mine.end(), rows.begin(), rows.end());
    }
}

std::string JoinBuildState::key_of(const Row& row) const {
    return encode_key(row, key_columns_);
}

const std::vector<Row>* JoinBuildState::lookup(const std::string& key) const {
    auto it = buckets_.find(key);
    return it == buckets_.end() ? nullptr : &it->second;
}

std::vector<Row> JoinBuildState::terminate() const {
    std::vector<Row> out;
    for (const auto& [key, rows] : buckets_) out.insert(out.end(), rows.begin(), rows.end());
    sort_rows(out);
    return out;
}

std::string JoinBuildState::serialize() const {
    ByteWriter w;
    w.u32(static_cast<uint32_t>(schema_.size()));
    for (const auto& a : schema_) w.str(a);
    w.u32(static_cast<uint32_t>(key_attrs_.size()));
    for (const auto& a : key_attrs_) w.str(a);
    w.u32(static_cast<uint32_t>(buckets_.size()));
    for (const auto& [key, rows] : buckets_) {
        w.str(key);
        w.u32(static_cast<uint32_t>(rows.size()));
        for (const Row& r : rows) w.row(r);
    }
    return w.bytes();
}

JoinBuildState JoinBuildState::deserialize(const std::string& bytes) {
    ByteReader r(bytes);
    Schema schema(r.u32());
    for (auto& a : schema) a = r.str();
    std::vector<std::string> keys(r.u32());
    for (auto& a : keys) a = r.str();
    JoinBuildState s(std::move(schema), std::move(keys));
    uint32_t buckets = r.u32();
    for (uint32_t i = 0; i < buckets; ++i) {
        std::string key = r.str();
        auto& rows = s.buckets_[key];
        uint32_t n = r.u32();
        rows.reserve(n);
        for (uint32_t j = 0; j < n; ++j) rows.push_back(r.row());
    }
    r.expect_done();
    return s;
}

// --- CollectState ---------------------------------------------------------

void CollectState::accumulate(Row row) { rows_.push_back(std::move(row)); }

void CollectState::merge(const CollectState& other) {
    rows_.insert(rows_.end(), other.rows_.begin(), other.rows_.end());
}

std::vector<Row> CollectState::terminate() const {
    std::vector<Row> out = rows_;
    sort_rows(out);
    return out;
}

std::string CollectState::serialize() const {
    ByteWriter w;
    w.u32(static_cast<uint32_t>(rows_.size()));
    for (const Row& r : rows_) w.row(r);
    return w.bytes();
}

CollectState CollectState::deserialize(const std::string& bytes) {
    ByteReader r(bytes);
    CollectState s;
    uint32_t n = r.u32();
    s.rows_.reserve(n);
    for (uint32_t i = 0; i < n; ++i) s.rows_.push_back(r.row());
    r.expect_done();
    return s;
}

// --- DistinctState --------------------------------------------------------

void DistinctState::accumulate(const Row& row) { rows_.emplace(encode_row(row), row); }

void DistinctState::merge(const DistinctState& other) {
    for (const auto& [key, row] : other.rows_) rows_.emplace(key, row);
}

std::vector<Row> DistinctState::terminate() const {
    std::vector<Row> out;
    out.reserve(rows_.size());
    for (const auto& [key, row] : rows_) out.push_back(row);
    sort_rows(out);
    return out;
}

std::string DistinctState::serialize() const {
    ByteWriter w;
    w.u32(static_cast<uint32_t>(rows_.size()));
    for (const auto& [key, row] : rows_) w.row(row);
    return w.bytes();
}

DistinctState DistinctState::deserialize(const std::string& bytes) {
    ByteReader r(bytes);
    DistinctState s;
    uint32_t n = r.u32();
    for (uint32_t i = 0; i < n; ++i) s.accumulate(r.row());
    r.expect_done();
    return s;
}

// --- SumState -------------------------------------------------------------

void SumState::accumulate(const Value& v) {
    micro_ = add_micro(micro_, to_micro(v));
    ++count_;
    all_int_ = all_int_ && v.is_int();
}

void SumState::merge(const SumState& other) {
    micro_ = add_micro(micro_, other.micro_);
    count_ += other.count_;
    all_int_ = all_int_ && other.all_int_;
}

std::vector<Row> SumState::terminate() const {
    if (count_ == 0) return {};
    return {Row{from_micro(micro_, all_int_)}};
}

std::string SumState::serialize() const {
    ByteWriter w;
    w.i64(micro_);
    w.i64(count_);
    w.u8(all_int_ ? 1 : 0);
    return w.bytes();
}

SumState SumState::deserialize(const std::string& bytes) {
    ByteReader r(bytes);
    SumState s;
    s.micro_ = r.i64();
    s.count_ = r.i64();
    s.all_int_ = r.u8() != 0;
    r.expect_done();
    return s;
}

// --- GroupByState ---------------------------------------------------------

void GroupByState::accumulate(const Value& group, const Value& v) {
    Slot& slot = groups_.try_emplace(encode_value(group), Slot{group, 0, 0, true}).first->second;
    slot.micro = add_micro(slot.micro, to_micro(v));
    ++slot.count;
    slot.all_int = slot.all_int && v.is_int();
}

void GroupByState::merge(const GroupByState& other) {
    for (const auto& [key, in] : other.groups_) {
        auto [it, fresh] = groups_.try_emplace(key, in);
        if (fresh) continue;
        Slot& slot = it->second;
        slot.micro = add_micro(slot.micro, in.micro);
        slot.count += in.count;
        slot.all_int = slot.all_int && in.all_int;
    }
}

std::vector<Row> GroupByState::terminate() const {
    std::vector<Row> out;
    out.reserve(groups_.size());
    for (const auto& [key, slot] : groups_)
        out.push_back(Row{slot.key, from_micro(slot.micro, slot.all_int)});
    sort_rows(out);
    return out;
}

std::string GroupByState::serialize() const {
    ByteWriter w;
    w.u32(static_cast<uint32_t>(groups_.size()));
    for (const auto& [key, slot] : groups_) {
        w.value(slot.key);
        w.i64(slot.micro);
        w.i64(slot.count);
        w.u8(slot.all_int ? 1 : 0);
    }
    return w.bytes();
}

GroupByState GroupByState::deserialize(const std::string& bytes) {
    ByteReader r(bytes);
    GroupByState s;
    uint32_t n = r.u32();
    for (uint32_t i = 0; i < n; ++i) {
        Slot slot;
        slot.key = r.value();
        slot.micro = r.i64();
        slot.count = r.i64();
        slot.all_int = r.u8() != 0;
        s.groups_.emplace(encode_value(slot.key), slot);
    }
    r.expect_done();
    return s;
}

}  // namespace mqp
