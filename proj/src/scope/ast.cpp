#include "btrv/scope/ast.hpp"

#include <algorithm>
#include <atomic>

namespace btrv::scope {

namespace {
std::atomic<std::uint64_t> g_out_of_range{0};

CondPtr cnode(CondKind kind, CondPtr a, CondPtr b) {
  auto c = std::make_shared<Condition>();
  c->kind = kind;
  c->lhs = std::move(a);
  c->rhs = std::move(b);
  return c;
}

FormulaPtr fnode(FormulaKind kind, FormulaPtr a, FormulaPtr b) {
  auto f = std::make_shared<Formula>();
  f->kind = kind;
  f->lhs = std::move(a);
  f->rhs = std::move(b);
  return f;
}

bool eval_cond(const Condition& c, const Message& m, bool count) {
  switch (c.kind) {
    case CondKind::Compare: {
      auto part = m.at(c.index);
      if (!part) {
        if (count) g_out_of_range.fetch_add(1, std::memory_order_relaxed);
        return false;
      }
      return compare_scalars(c.op, *part, c.constant);
    }
    case CondKind::Not: return !eval_cond(*c.lhs, m, count);
    case CondKind::And: return eval_cond(*c.lhs, m, count) && eval_cond(*c.rhs, m, count);
    case CondKind::Or: return eval_cond(*c.lhs, m, count) || eval_cond(*c.rhs, m, count);
  }
  return false;
}

}  // namespace

CondPtr cmp(std::int64_t index, RelOp op, Scalar constant) {
  auto c = std::make_shared<Condition>();
  c->kind = CondKind::Compare;
  c->index = index;
  c->op = op;
  c->constant = constant;
  return c;
}
CondPtr cnot(CondPtr a) { return cnode(CondKind::Not, std::move(a), nullptr); }
CondPtr cand(CondPtr a, CondPtr b) { return cnode(CondKind::And, std::move(a), std::move(b)); }
CondPtr cor(CondPtr a, CondPtr b) { return cnode(CondKind::Or, std::move(a), std::move(b)); }
CondPtr cimplies(CondPtr a, CondPtr b) { return cor(cnot(std::move(a)), std::move(b)); }

bool condition_holds(const Condition& c, const Message& m) { return eval_cond(c, m, true); }
bool condition_holds_quiet(const Condition& c, const Message& m) { return eval_cond(c, m, false); }

std::uint64_t index_out_of_range_count() { return g_out_of_range.load(std::memory_order_relaxed); }
void reset_diagnostics() { g_out_of_range.store(0, std::memory_order_relaxed); }

ExprPtr condition_to_expr(const Condition& c, const std::string& var) {
  switch (c.kind) {
    case CondKind::Compare:
      return ex::compare(c.op, ex::index(ex::var(var), c.index), ex::lit(to_value(c.constant)));
    case CondKind::Not: return ex::not_(condition_to_expr(*c.lhs, var));
    case CondKind::And: return ex::and_(condition_to_expr(*c.lhs, var), condition_to_expr(*c.rhs, var));
    case CondKind::Or: return ex::or_(condition_to_expr(*c.lhs, var), condition_to_expr(*c.rhs, var));
  }
  return ex::boolean(false);
}

bool equal(const Condition& a, const Condition& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case CondKind::Compare: return a.index == b.index && a.op == b.op && a.constant == b.constant;
    case CondKind::Not: return equal(*a.lhs, *b.lhs);
    default: return equal(*a.lhs, *b.lhs) && equal(*a.rhs, *b.rhs);
  }
}

namespace {

// Condition precedence: implies 1, or 2, and 3, not 4, atom 5.
int cprec(const Condition& c) {
  switch (c.kind) {
    case CondKind::Or: return c.lhs->kind == CondKind::Not ? 1 : 2;
    case CondKind::And: return 3;
    case CondKind::Not: return 4;
    case CondKind::Compare: return 5;
  }
  return 5;
}

void print_cond(const Condition& c, std::string& out);

void print_cond_at(const Condition& c, int min_prec, std::string& out) {
  bool parens = cprec(c) < min_prec;
  if (parens) out += "(";
  print_cond(c, out);
  if (parens) out += ")";
}

void print_cond(const Condition& c, std::string& out) {
  int p = cprec(c);
  switch (c.kind) {
    case CondKind::Compare:
      out += "m[" + std::to_string(c.index) + "] " + std::string(btrv::to_string(c.op)) + " " + format_scalar(c.constant);
      return;
    case CondKind::Not:
      out += "not ";
      print_cond_at(*c.lhs, p, out);
      return;
    case CondKind::And:
      print_cond_at(*c.lhs, p, out);
      out += " and ";
      print_cond_at(*c.rhs, p + 1, out);
      return;
    case CondKind::Or:
      if (p == 1) {
        print_cond_at(*c.lhs->lhs, 2, out);
        out += " implies ";
        print_cond_at(*c.rhs, 1, out);
      } else {
        print_cond_at(*c.lhs, p, out);
        out += " or ";
        print_cond_at(*c.rhs, p + 1, out);
      }
      return;
  }
}

}  // namespace

std::string to_string(const Condition& c) {
  std::string out;
  print_cond(c, out);
  return out;
}

FormulaPtr f_true() { return fnode(FormulaKind::True, nullptr, nullptr); }
FormulaPtr f_false() { return f_not(f_true()); }

FormulaPtr f_event(ChannelKey channel, CondPtr cond) {
  auto f = std::make_shared<Formula>();
  f->kind = FormulaKind::Event;
  f->event = Event{std::move(channel), std::move(cond)};
  return f;
}

FormulaPtr f_time_until(ChannelKey channel, CondPtr cond, RelOp op, std::int64_t bound) {
  auto f = std::make_shared<Formula>();
  f->kind = FormulaKind::TimeUntil;
  f->event = Event{std::move(channel), std::move(cond)};
  f->op = op;
  f->bound = bound;
  return f;
}

FormulaPtr f_not(FormulaPtr a) { return fnode(FormulaKind::Not, std::move(a), nullptr); }
FormulaPtr f_and(FormulaPtr a, FormulaPtr b) { return fnode(FormulaKind::And, std::move(a), std::move(b)); }
FormulaPtr f_or(FormulaPtr a, FormulaPtr b) { return fnode(FormulaKind::Or, std::move(a), std::move(b)); }
FormulaPtr f_implies(FormulaPtr a, FormulaPtr b) { return f_or(f_not(std::move(a)), std::move(b)); }
FormulaPtr f_next(FormulaPtr a) { return fnode(FormulaKind::Next, std::move(a), nullptr); }
FormulaPtr f_until(FormulaPtr a, FormulaPtr b) { return fnode(FormulaKind::Until, std::move(a), std::move(b)); }
FormulaPtr f_eventually(FormulaPtr a) { return f_until(f_true(), std::move(a)); }
FormulaPtr f_always(FormulaPtr a) { return f_not(f_eventually(f_not(std::move(a)))); }

bool equal(const Formula& a, const Formula& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case FormulaKind::True: return true;
    case FormulaKind::Event: return a.event.channel == b.event.channel && equal(*a.event.cond, *b.event.cond);
    case FormulaKind::TimeUntil:
      return a.event.channel == b.event.channel && equal(*a.event.cond, *b.event.cond) && a.op == b.op &&
             a.bound == b.bound;
    case FormulaKind::Not:
    case FormulaKind::Next: return equal(*a.lhs, *b.lhs);
    default: return equal(*a.lhs, *b.lhs) && equal(*a.rhs, *b.rhs);
  }
}

bool is_false(const Formula& f) { return f.kind == FormulaKind::Not && f.lhs->kind == FormulaKind::True; }

FormulaPtr as_eventually(const Formula& f) {
  if (f.kind == FormulaKind::Until && f.lhs->kind == FormulaKind::True) return f.rhs;
  return nullptr;
}

FormulaPtr as_always(const Formula& f) {
  if (f.kind != FormulaKind::Not) return nullptr;
  auto inner = as_eventually(*f.lhs);
  if (!inner || inner->kind != FormulaKind::Not) return nullptr;
  return inner->lhs;
}

std::optional<std::pair<FormulaPtr, FormulaPtr>> as_implies(const Formula& f) {
  if (f.kind == FormulaKind::Or && f.lhs->kind == FormulaKind::Not) return std::make_pair(f.lhs->lhs, f.rhs);
  return std::nullopt;
}

namespace {

// Formula precedence: implies 1 (right), or 2, and 3, until 4 (right),
// unary 5 (not, next, eventually, always), primary 6.
int fprec(const Formula& f) {
  switch (f.kind) {
    case FormulaKind::Or: return as_implies(f) ? 1 : 2;
    case FormulaKind::And: return 3;
    case FormulaKind::Until: return as_eventually(f) ? 5 : 4;
    case FormulaKind::Not: return is_false(f) ? 6 : 5;
    case FormulaKind::Next: return 5;
    default: return 6;
  }
}

void print_formula(const Formula& f, std::string& out);

void print_at(const Formula& f, int min_prec, std::string& out) {
  bool parens = fprec(f) < min_prec;
  if (parens) out += "(";
  print_formula(f, out);
  if (parens) out += ")";
}

void print_event(const Event& e, std::string& out) {
  out += "(" + e.channel.source + ", " + e.channel.dest + ", " + to_string(*e.cond) + ")";
}

void print_formula(const Formula& f, std::string& out) {
  switch (f.kind) {
    case FormulaKind::True:
      out += "true";
      return;
    case FormulaKind::Event:
      print_event(f.event, out);
      return;
    case FormulaKind::TimeUntil:
      out += "time_until ";
      print_event(f.event, out);
      out += " " + std::string(btrv::to_string(f.op)) + " " + std::to_string(f.bound);
      return;
    case FormulaKind::Not:
      if (is_false(f)) {
        out += "false";
        return;
      }
      if (auto a = as_always(f)) {
        out += "always ";
        print_at(*a, 5, out);
        return;
      }
      out += "not ";
      print_at(*f.lhs, 5, out);
      return;
    case FormulaKind::Next:
      out += "next ";
      print_at(*f.lhs, 5, out);
      return;
    case FormulaKind::Until:
      if (auto a = as_eventually(f)) {
        out += "eventually ";
        print_at(*a, 5, out);
        return;
      }
      print_at(*f.lhs, 5, out);
      out += " until ";
      print_at(*f.rhs, 4, out);
      return;
    case FormulaKind::And:
      print_at(*f.lhs, 3, out);
      out += " and ";
      print_at(*f.rhs, 4, out);
      return;
    case FormulaKind::Or:
      if (auto imp = as_implies(f)) {
        print_at(*imp->first, 2, out);
        out += " implies ";
        print_at(*imp->second, 1, out);
        return;
      }
      print_at(*f.lhs, 2, out);
      out += " or ";
      print_at(*f.rhs, 3, out);
      return;
  }
}

void collect_channels(const Formula& f, std::vector<ChannelKey>& out) {
  if (f.kind == FormulaKind::Event || f.kind == FormulaKind::TimeUntil) {
    if (std::find(out.begin(), out.end(), f.event.channel) == out.end()) out.push_back(f.event.channel);
    return;
  }
  if (f.lhs) collect_channels(*f.lhs, out);
  if (f.rhs) collect_channels(*f.rhs, out);
}

}  // namespace

std::string to_string(const Formula& f) {
  std::string out;
  print_formula(f, out);
  return out;
}

std::vector<ChannelKey> channels_of(const Formula& f) {
  std::vector<ChannelKey> out;
  collect_channels(f, out);
  return out;
}

std::size_t depth(const Formula& f) {
  std::size_t d = 0;
  if (f.lhs) d = std::max(d, depth(*f.lhs));
  if (f.rhs) d = std::max(d, depth(*f.rhs));
  return d + 1;
}

}  // namespace btrv::scope
