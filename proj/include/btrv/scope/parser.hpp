#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "btrv/scope/ast.hpp"

namespace btrv {
class TokenCursor;
}

namespace btrv::scope {

struct ParseOptions {
  /// Named time constants usable in place of a number after time_until.
  std::map<std::string, std::int64_t> params;
  /// When set, event endpoints must name one of these processes.
  std::optional<std::set<std::string>> processes;
};

/// Parses one SCOPE constraint.
///
/// Precedence, loosest first: implies (right), or, and, until (right), then
/// the prefix operators not / next / eventually / always. Keywords are
/// lowercase. Throws ParseError with line and column.
FormulaPtr parse(std::string_view text, const ParseOptions& options = {});

/// Parses a constraint starting at the cursor, leaving it after the formula.
FormulaPtr parse_formula(TokenCursor& cur, const ParseOptions& options = {});

/// Parses a message condition on its own, e.g. "m[1] = <ok> and m[2] > 3".
CondPtr parse_condition(std::string_view text);

}  // namespace btrv::scope
