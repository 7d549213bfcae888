#pragma once

#include <stdexcept>
#include <string>

namespace fsvd {

// Precondition or invariant violated by caller-supplied values.
class DomainError : public std::invalid_argument {
public:
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

// Malformed file content (PGM headers, spots files, cloud CSV, configs).
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

// A frame plan that cannot fit its frame time under the device timing model.
class InfeasibleError : public std::runtime_error {
public:
    InfeasibleError(const std::string& bottleneck, const std::string& what)
        : std::runtime_error(what), bottleneck_(bottleneck) {}

    const std::string& bottleneck() const noexcept { return bottleneck_; }

private:
    std::string bottleneck_;
};

namespace detail {

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw DomainError(msg);
}

} // namespace detail
} // namespace fsvd
