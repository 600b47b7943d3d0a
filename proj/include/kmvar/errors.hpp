#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace kmvar {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EmptyDataset : public Error {
public:
    EmptyDataset() : Error("no records") {}
};

/// A record failed validation. `index` is the zero-based record position; for
/// CSV input `line` carries the one-based source line (0 when not from a file).
class InvalidRecord : public Error {
public:
    InvalidRecord(std::size_t index, std::size_t line, const std::string& what)
        : Error(line != 0 ? "line " + std::to_string(line) + ": " + what
                          : "record " + std::to_string(index) + ": " + what),
          index_(index), line_(line) {}

    std::size_t index() const noexcept { return index_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t index_;
    std::size_t line_;
};

class IndexError : public Error {
public:
    using Error::Error;
};

class InvalidAlpha : public Error {
public:
    explicit InvalidAlpha(double alpha);
};

class InvalidVariance : public Error {
public:
    explicit InvalidVariance(double r);
};

/// Raised for an invalid simulation configuration; `field` names the culprit.
class InvalidConfig : public Error {
public:
    InvalidConfig(std::string field, const std::string& what)
        : Error(what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class DegenerateBin : public Error {
public:
    using Error::Error;
};

}  // namespace kmvar
