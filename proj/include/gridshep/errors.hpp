#pragma once

#include <stdexcept>
#include <string>

namespace gridshep {

/// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvalidInput : Error {
    using Error::Error;
};

struct GridTooSmall : Error {
    using Error::Error;
};

struct IndexOutOfRange : Error {
    using Error::Error;
};

struct SingularSystem : Error {
    using Error::Error;
};

struct NodeCoincidence : Error {
    using Error::Error;
};

/// Malformed input file; carries the 1-based line number where parsing failed.
struct ParseError : Error {
    std::size_t line = 0;
    ParseError(const std::string& msg, std::size_t line_no)
        : Error(msg + " (line " + std::to_string(line_no) + ")"), line(line_no) {}
};

struct IoError : Error {
    using Error::Error;
};

struct EmptyResult : Error {
    using Error::Error;
};

struct NodataPresent : Error {
    using Error::Error;
};

struct GridMismatch : Error {
    using Error::Error;
};

struct EmptyLevels : Error {
    using Error::Error;
};

struct IncompatibleSize : Error {
    using Error::Error;
};

} // namespace gridshep
