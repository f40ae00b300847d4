#pragma once

#include <stdexcept>
#include <string>

namespace rwos {

enum class Status : int {
    ok = 0,
    invalid_argument = 1,
    inconsistent = 2,
    not_converged = 3,
    io_error = 4,
    internal = 5,
};

const char* status_name(Status s) noexcept;

class Error : public std::runtime_error {
public:
    Error(Status code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    Status code() const noexcept { return code_; }

private:
    Status code_;
};

[[noreturn]] inline void fail(const std::string& what) {
    throw Error(Status::invalid_argument, what);
}

inline void require(bool cond, const std::string& what) {
    if (!cond) fail(what);
}

}  // namespace rwos
