#pragma once

#include <stdexcept>
#include <string>

namespace itw {

// Error with a stable machine-readable code (used by tests and the CLI exit
// logic) plus a human-readable message.
class LabError : public std::runtime_error {
public:
    LabError(std::string code, const std::string& msg)
        : std::runtime_error(code + ": " + msg), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

[[noreturn]] inline void fail(const std::string& code, const std::string& msg) {
    throw LabError(code, msg);
}

inline void require(bool ok, const std::string& code, const std::string& msg) {
    if (!ok) fail(code, msg);
}

} // namespace itw
