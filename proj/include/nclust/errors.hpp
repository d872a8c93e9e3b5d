#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nclust {

struct ArityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidElementError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parse failures carry the 1-based line number of the offending record.
struct ParseError : std::runtime_error {
    std::size_t line = 0;
    ParseError(const std::string& msg, std::size_t line_no)
        : std::runtime_error(msg + " (line " + std::to_string(line_no) + ")"), line(line_no) {}
};

// Raised when an enumeration would exceed its configured size guard and no
// override was given.
struct SizeGuardError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace nclust
