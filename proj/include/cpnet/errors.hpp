#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cpnet {

// malformed input text (JSON syntax, unresolved ids, wrong field types)
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, std::size_t byte_pos = 0)
        : std::runtime_error(msg), byte_pos_(byte_pos) {}
    std::size_t byte_pos() const { return byte_pos_; }

private:
    std::size_t byte_pos_;
};

// a caller violated an operation's preconditions (bad scope, bad finding, ...)
class InvalidArgument : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// x/0 with x != 0: the propagation state is corrupted
class InconsistencyError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// query against a tree whose mass is zero (contradictory evidence)
class ExcludedCaseError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace cpnet
