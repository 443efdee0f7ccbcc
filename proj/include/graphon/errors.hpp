#pragma once

#include <stdexcept>
#include <string>

namespace graphon {

// Exit codes used by the CLI. Library code throws; the CLI maps to codes.
enum class ErrorKind {
    input = 2,    // malformed files, invalid parameters, domain violations
    runtime = 3,  // numeric failures, unattainable tolerances
};

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }
    int exit_code() const { return static_cast<int>(kind_); }

  private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail_input(const std::string& msg) { throw Error(ErrorKind::input, msg); }
[[noreturn]] inline void fail_runtime(const std::string& msg) { throw Error(ErrorKind::runtime, msg); }

inline void require_input(bool cond, const std::string& msg) {
    if (!cond) fail_input(msg);
}

}  // namespace graphon
