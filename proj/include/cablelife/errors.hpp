#pragma once

#include <stdexcept>
#include <string>

namespace cablelife {

/// Numerical solver gave up (non-convergence, NaN, collapsed time step).
/// The message carries the diagnostic context (time, iteration, residual).
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input file. Carries 1-based line (and column when known).
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, std::size_t line, std::size_t column = 0)
        : std::runtime_error(format(msg, line, column)), line_(line), column_(column) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    static std::string format(const std::string& msg, std::size_t line, std::size_t column) {
        std::string s = msg + " (line " + std::to_string(line);
        if (column > 0) s += ", column " + std::to_string(column);
        s += ")";
        return s;
    }
    std::size_t line_;
    std::size_t column_;
};

} // namespace cablelife
