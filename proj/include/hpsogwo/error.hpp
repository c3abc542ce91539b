#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hpsogwo {

/// Precondition or contract violation on caller-supplied data.
class InvalidInput : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// File could not be opened, read or written.
class IoError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Malformed record in an input file. `row()` is the 1-based data row
/// (header excluded); `line()` is the 1-based physical line.
class ParseError : public std::runtime_error
{
public:
    ParseError(std::size_t row, std::size_t line, const std::string &what)
        : std::runtime_error("row " + std::to_string(row) + " (line " +
                             std::to_string(line) + "): " + what),
          row_(row), line_(line)
    {
    }

    std::size_t row() const noexcept { return row_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t row_;
    std::size_t line_;
};

} // namespace hpsogwo
