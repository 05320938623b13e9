#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "cdchase/model.hpp"

namespace cdchase {

struct ConjunctiveQuery;

/// Line-oriented text formats (`#` starts a comment):
///
///   schema        predicate employee/1
///   dependencies  key works_in {1}
///                 inclusion works_in[2] <= dept[1]
///   instance      works_in(m, d)
///   query         q(X) :- works_in(X, Y), dept(Y).
///
/// Constants are bare tokens (letters, digits, `_`, `'`) or double-quoted
/// strings with `\"` and `\\` escapes. In queries, bare tokens starting with an
/// upper-case letter are variables. `_f<k>` and `_frz<k>` are reserved.
enum class InputErrorKind {
    Syntax,
    UnknownPredicate,
    ArityMismatch,
    DuplicatePredicate,
    DuplicateKey,
    ReservedConstant,
    InvalidDependency,
    InvalidQuery,
    Io,
};

std::string_view to_string(InputErrorKind k) noexcept;

class InputError : public std::runtime_error {
public:
    InputError(InputErrorKind kind, std::size_t line, std::size_t column, const std::string& message);

    InputErrorKind kind() const noexcept { return kind_; }
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }
    const std::string& message() const noexcept { return message_; }

private:
    InputErrorKind kind_;
    std::size_t line_;
    std::size_t column_;
    std::string message_;
};

Schema parse_schema(std::string_view text);
DependencySet parse_dependencies(std::string_view text, const Schema& schema);
Database parse_instance(std::string_view text, const Schema& schema);
ConjunctiveQuery parse_query(std::string_view text, const Schema& schema);

/// Canonical forms: one statement per line, sorted by name, by dependency
/// encoding and by fact key respectively.
std::string serialize(const Schema& schema);
std::string serialize(const DependencySet& deps);
std::string serialize(const Database& db);

/// A domain constant as it would be written in an input file: bare when it
/// re-reads as the same constant, quoted otherwise. Fresh constants render as
/// `_f<k>`.
std::string constant_literal(const Constant& c);

/// Reads a whole file; throws InputError(Io) on failure.
std::string read_text_file(const std::filesystem::path& path);

}  // namespace cdchase
