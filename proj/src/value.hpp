#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "error.hpp"

namespace mqp {

// A runtime cell: integer, real, or text.  Numeric comparisons promote to
// double; text compares lexicographically.  Identity (hashing, DISTINCT,
// group keys, result comparison) is strict on type + payload.
class Value {
public:
    Value() : v_(int64_t{0}) {}
    explicit Value(int64_t i) : v_(i) {}
    explicit Value(double d) : v_(d) {}
    explicit Value(std::string s) : v_(std::move(s)) {}

    bool is_int() const { return std::holds_alternative<int64_t>(v_); }
    bool is_real() const { return std::holds_alternative<double>(v_); }
    bool is_text() const { return std::holds_alternative<std::string>(v_); }
    bool is_numeric() const { return !is_text(); }

    int64_t as_int() const { return std::get<int64_t>(v_); }
    double as_real() const { return std::get<double>(v_); }
    const std::string& as_text() const { return std::get<std::string>(v_); }

    double numeric() const { return is_int() ? static_cast<double>(as_int()) : as_real(); }

    // Strict identity: type then payload.
    bool operator==(const Value& o) const { return v_ == o.v_; }
    bool operator!=(const Value& o) const { return v_ != o.v_; }
    bool operator<(const Value& o) const { return v_ < o.v_; }

    // Parses a data-file field: full integer, else full real, else text.
    static Value parse_field(const std::string& field) {
        if (!field.empty()) {
            size_t pos = 0;
            try {
                int64_t i = std::stoll(field, &pos);
                if (pos == field.size()) return Value(i);
            } catch (...) {
            }
            try {
                double d = std::stod(field, &pos);
                if (pos == field.size()) return Value(d);
            } catch (...) {
            }
        }
        return Value(field);
    }

    std::string render() const {
        if (is_int()) return std::to_string(as_int());
        if (is_text()) return as_text();
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%g", as_real());
        return buf;
    }

private:
    std::variant<int64_t, double, std::string> v_;
};

enum class CompareOp { eq, neq, lt, gt };

inline const char* op_text(CompareOp op) {
    switch (op) {
        case CompareOp::eq: return "=";
        case CompareOp::neq: return "<>";
        case CompareOp::lt: return "<";
        case CompareOp::gt: return ">";
    }
    return "?";
}

// Evaluates `a <op> b`.  Mixed numeric/text operands are a data error.
inline bool compare_values(const Value& a, CompareOp op, const Value& b) {
    if (a.is_numeric() != b.is_numeric())
        fail(ErrorKind::exec,
             "type error comparing values '" + a.render() + "' and '" + b.render() + "'");
    if (a.is_numeric()) {
        double x = a.numeric();
        double y = b.numeric();
        switch (op) {
            case CompareOp::eq: return x == y;
            case CompareOp::neq: return x != y;
            case CompareOp::lt: return x < y;
            case CompareOp::gt: return x > y;
        }
    } else {
        const std::string& x = a.as_text();
        const std::string& y = b.as_text();
        switch (op) {
            case CompareOp::eq: return x == y;
            case CompareOp::neq: return x != y;
            case CompareOp::lt: return x < y;
            case CompareOp::gt: return x > y;
        }
    }
    return false;
}

using Row = std::vector<Value>;

}  // namespace mqp
