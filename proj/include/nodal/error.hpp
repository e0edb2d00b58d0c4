#pragma once

#include <stdexcept>
#include <string>

namespace nodal {

// Base of every exception thrown by the library. Domain errors (bad input,
// singular systems) derive from it; I/O failures use IoError so front ends
// can map them to a distinct exit status.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : Error(what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
          line_(line), column_(column) {}
    explicit ParseError(const std::string& what) : Error(what) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_ = 0;
    std::size_t column_ = 0;
};

class ReferenceError : public Error {
public:
    ReferenceError(const std::string& name, const std::string& context)
        : Error("unresolved reference '" + name + "' in " + context), name_(name) {}

    const std::string& name() const { return name_; }

private:
    std::string name_;
};

class DuplicateError : public Error {
public:
    explicit DuplicateError(const std::string& name)
        : Error("duplicate identifier '" + name + "'"), name_(name) {}

    const std::string& name() const { return name_; }

private:
    std::string name_;
};

class SolverError : public Error {
public:
    using Error::Error;
};

} // namespace nodal
