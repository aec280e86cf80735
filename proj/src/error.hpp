#pragma once

#include <stdexcept>
#include <string>

namespace mqp {

// Error classes map 1:1 onto the CLI exit codes / C API status values.
enum class ErrorKind {
    lex = 1,        // tokenizer failure
    syntax = 1,     // grammar failure
    semantic = 2,   // unknown names, invalid combinations, boundary violations
    plan = 3,       // planning failures (e.g. arity cap)
    exec = 4,       // execution and data-file failures
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind) {}

    ErrorKind kind() const { return kind_; }
    int code() const { return static_cast<int>(kind_); }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

}  // namespace mqp
