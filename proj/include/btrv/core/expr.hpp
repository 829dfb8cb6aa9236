#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "btrv/core/value.hpp"

namespace btrv {

class TokenCursor;

enum class ExprKind {
  Literal,
  Var,
  Index,        // args[0][args[1]], 1-based
  MakeMessage,  // [args...]
  Not,
  Neg,
  And,
  Or,
  Implies,
  Add,
  Sub,
  Mul,
  Div,
  Mod,
  Compare,
  Len,
  Min,
  Max,
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Immutable expression node used for guards, assignments and send payloads.
///
/// Variables start unresolved (slot = -1); `bind_expr` produces a copy whose
/// variables carry store slots, which is what `eval` requires.
struct Expr {
  ExprKind kind = ExprKind::Literal;
  Value literal{false};
  std::string name;
  int slot = -1;
  RelOp op = RelOp::Eq;
  std::vector<ExprPtr> args;
};

namespace ex {
ExprPtr lit(Value v);
ExprPtr boolean(bool b);
ExprPtr integer(std::int64_t v);
ExprPtr symbol(std::string_view name);
ExprPtr var(std::string name);
ExprPtr index(ExprPtr message, std::int64_t i);
ExprPtr make_message(std::vector<ExprPtr> parts);
ExprPtr not_(ExprPtr a);
ExprPtr neg(ExprPtr a);
ExprPtr and_(ExprPtr a, ExprPtr b);
ExprPtr or_(ExprPtr a, ExprPtr b);
ExprPtr implies(ExprPtr a, ExprPtr b);
ExprPtr binary(ExprKind kind, ExprPtr a, ExprPtr b);
ExprPtr compare(RelOp op, ExprPtr a, ExprPtr b);
ExprPtr call(ExprKind kind, std::vector<ExprPtr> args);
}  // namespace ex

/// Resolves a variable name to a store slot, or returns -1 when unknown.
using SlotResolver = std::function<int(const std::string&)>;

/// Returns a copy of `e` with every variable bound; throws ModelError on an
/// unknown name.
ExprPtr bind_expr(const ExprPtr& e, const SlotResolver& resolve);

/// Evaluates a bound expression.
///
/// Indexing outside a message yields an absent result (nullopt). Absent
/// operands make every comparison false and propagate through arithmetic.
/// Type errors raise EvalError.
std::optional<Value> eval(const Expr& e, const std::vector<Value>& store);

/// Guard truthiness: only the boolean `true` holds; absent is false.
bool holds(const Expr& e, const std::vector<Value>& store);

/// Collects every variable name referenced by `e`.
void free_variables(const Expr& e, std::vector<std::string>& out);

std::string to_string(const Expr& e);

/// Parses one expression. Grammar (loosest first): implies (=>, right
/// associative), or, and, not, comparison, + -, * / %, unary minus,
/// postfix indexing, primary.
ExprPtr parse_expr(TokenCursor& cur);
ExprPtr parse_expr(std::string_view text);

/// Parses `[part, ...]` where every part is a literal scalar.
Message parse_message_literal(TokenCursor& cur);
Message parse_message_literal(std::string_view text);

/// Parses a literal scalar (integer, true/false, <symbol>) or message.
Value parse_value_literal(TokenCursor& cur);

/// Reads a relational operator token if present.
std::optional<RelOp> accept_relop(TokenCursor& cur);

}  // namespace btrv
