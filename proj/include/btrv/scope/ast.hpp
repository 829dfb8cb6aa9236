#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "btrv/core/expr.hpp"
#include "btrv/core/program_graph.hpp"
#include "btrv/core/value.hpp"

namespace btrv::scope {

// ---- message conditions ----

enum class CondKind { Compare, Not, And, Or };

struct Condition;
using CondPtr = std::shared_ptr<const Condition>;

/// Boolean combination of `m[index] relop constant` comparisons.
struct Condition {
  CondKind kind = CondKind::Compare;
  std::int64_t index = 1;
  RelOp op = RelOp::Eq;
  Scalar constant{std::int64_t{0}};
  CondPtr lhs;
  CondPtr rhs;
};

CondPtr cmp(std::int64_t index, RelOp op, Scalar constant);
CondPtr cnot(CondPtr a);
CondPtr cand(CondPtr a, CondPtr b);
CondPtr cor(CondPtr a, CondPtr b);
CondPtr cimplies(CondPtr a, CondPtr b);  // expands to cor(cnot(a), b)

/// Evaluates a condition on a message. An index outside the message makes
/// that comparison false and bumps the diagnostic counter.
bool condition_holds(const Condition& c, const Message& m);

/// Same, with out-of-range lookups left uncounted (used for empty channels).
bool condition_holds_quiet(const Condition& c, const Message& m);

std::uint64_t index_out_of_range_count();
void reset_diagnostics();

/// Translates the condition into a guard over the message variable `var`.
ExprPtr condition_to_expr(const Condition& c, const std::string& var);

bool equal(const Condition& a, const Condition& b);
std::string to_string(const Condition& c);

// ---- formulas ----

enum class FormulaKind { True, Event, TimeUntil, Not, And, Or, Next, Until };

struct Event {
  ChannelKey channel;
  CondPtr cond;
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

/// Core SCOPE syntax. false, implies, eventually and always are not nodes:
/// they are expanded while parsing and re-abbreviated when printing.
struct Formula {
  FormulaKind kind = FormulaKind::True;
  Event event;                 // Event, TimeUntil
  RelOp op = RelOp::Lt;        // TimeUntil
  std::int64_t bound = 0;      // TimeUntil, in ticks
  FormulaPtr lhs;
  FormulaPtr rhs;
};

FormulaPtr f_true();
FormulaPtr f_false();
FormulaPtr f_event(ChannelKey channel, CondPtr cond);
FormulaPtr f_time_until(ChannelKey channel, CondPtr cond, RelOp op, std::int64_t bound);
FormulaPtr f_not(FormulaPtr a);
FormulaPtr f_and(FormulaPtr a, FormulaPtr b);
FormulaPtr f_or(FormulaPtr a, FormulaPtr b);
FormulaPtr f_implies(FormulaPtr a, FormulaPtr b);
FormulaPtr f_next(FormulaPtr a);
FormulaPtr f_until(FormulaPtr a, FormulaPtr b);
FormulaPtr f_eventually(FormulaPtr a);
FormulaPtr f_always(FormulaPtr a);

/// Structural equality of ASTs.
bool equal(const Formula& a, const Formula& b);

/// Abbreviation recognizers, shared by the printer and monitor synthesis.
bool is_false(const Formula& f);
/// Returns the operand `a` if f = always a, i.e. not (true until not a).
FormulaPtr as_always(const Formula& f);
/// Returns the operand if f = eventually a, i.e. true until a.
FormulaPtr as_eventually(const Formula& f);
/// Returns (a, b) if f = a implies b, i.e. (not a) or b.
std::optional<std::pair<FormulaPtr, FormulaPtr>> as_implies(const Formula& f);

/// Prints with abbreviations and minimal parentheses; parse(to_string(f))
/// is structurally equal to f.
std::string to_string(const Formula& f);

/// Channels mentioned by events in `f`, in first-occurrence order.
std::vector<ChannelKey> channels_of(const Formula& f);

std::size_t depth(const Formula& f);

}  // namespace btrv::scope
