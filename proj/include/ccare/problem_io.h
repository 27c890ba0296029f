#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ccare/model.h"

namespace ccare {

/// Problem files are JSON documents:
///
///   {
///     "n": 2,
///     "N": 2,
///     "modes": [ { "A": [[...]], "S": [[...]], "Q": [[...]] }, ... ],
///     "delta": [[...]]
///   }
///
/// Each mode carries exactly one of "S" (n x n) or "B" (n x m, with
/// S = B B^T). Only S is kept after parsing. Throws kParseError with the
/// offending line or field on malformed input.
CcareProblem parse_problem(std::string_view text);
CcareProblem load_problem(const std::filesystem::path& path);

/// Canonical serialization (always writes S). parse_problem followed by
/// serialize_problem reproduces canonical text byte for byte.
std::string serialize_problem(const CcareProblem& p);

/// Iterate files: either a bare JSON array of matrices or {"X": [...]}.
std::vector<SymMatrix> parse_iterates(std::string_view text);
std::vector<SymMatrix> load_iterates(const std::filesystem::path& path);

/// Names accepted by builtin_example.
std::vector<std::string> builtin_example_names();

/// Built-in problem data. "ivanov_example1" (alias "example1") is the
/// two-mode, two-state example with distinct minimal and maximal solutions.
/// Throws kUnknownExample for any other name.
CcareProblem builtin_example(std::string_view name);

/// Shortest decimal text that round-trips to the same double.
std::string format_number(double v);

}  // namespace ccare
