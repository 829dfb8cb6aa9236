#include "btrv/scope/parser.hpp"

#include "btrv/core/errors.hpp"
#include "btrv/core/lexer.hpp"

namespace btrv::scope {

namespace {

class Parser {
 public:
  Parser(TokenCursor& cur, const ParseOptions& opts) : cur_(cur), opts_(opts) {}

  FormulaPtr implies() {
    auto f = disjunction();
    if (cur_.accept_keyword("implies")) return f_implies(f, implies());
    return f;
  }

  CondPtr cond_implies() {
    auto c = cond_or();
    if (cur_.accept_keyword("implies")) return cimplies(c, cond_implies());
    return c;
  }

 private:
  FormulaPtr disjunction() {
    auto f = conjunction();
    while (cur_.accept_keyword("or")) f = f_or(f, conjunction());
    return f;
  }

  FormulaPtr conjunction() {
    auto f = until();
    while (cur_.accept_keyword("and")) f = f_and(f, until());
    return f;
  }

  FormulaPtr until() {
    auto f = unary();
    if (cur_.accept_keyword("until")) return f_until(f, until());
    return f;
  }

  FormulaPtr unary() {
    if (cur_.accept_keyword("not")) return f_not(unary());
    if (cur_.accept_keyword("next")) return f_next(unary());
    if (cur_.accept_keyword("eventually")) return f_eventually(unary());
    if (cur_.accept_keyword("always")) return f_always(unary());
    return primary();
  }

  FormulaPtr primary() {
    if (cur_.accept_keyword("true")) return f_true();
    if (cur_.accept_keyword("false")) return f_false();
    if (cur_.accept_keyword("time_until")) {
      Event e = event();
      const Token at = cur_.peek();
      auto op = accept_relop(cur_);
      if (!op) cur_.fail("expected a relational operator after time_until event but found " + describe(at));
      return f_time_until(e.channel, e.cond, *op, time_constant());
    }
    if (cur_.is_punct("(")) {
      if (cur_.peek(1).kind == Token::Kind::Ident && cur_.is_punct(",", 2)) {
        Event e = event();
        return f_event(e.channel, e.cond);
      }
      cur_.next();
      auto f = implies();
      cur_.expect_punct(")");
      return f;
    }
    cur_.fail("expected a constraint but found " + describe(cur_.peek()));
  }

  Event event() {
    cur_.expect_punct("(");
    Event e;
    e.channel.source = process_name("a source process");
    cur_.expect_punct(",");
    e.channel.dest = process_name("a destination process");
    cur_.expect_punct(",");
    e.cond = cond_implies();
    cur_.expect_punct(")");
    return e;
  }

  std::string process_name(std::string_view what) {
    const Token at = cur_.peek();
    std::string name = cur_.expect_ident(what);
    if (opts_.processes && !opts_.processes->count(name)) cur_.fail_at(at, "unknown process '" + name + "'");
    return name;
  }

  std::int64_t time_constant() {
    const Token at = cur_.peek();
    if (cur_.is_punct("-")) cur_.fail_at(at, "time constants must be nonnegative");
    if (at.kind == Token::Kind::Int) return cur_.next().ival;
    if (at.kind == Token::Kind::Ident) {
      cur_.next();
      auto it = opts_.params.find(at.text);
      if (it == opts_.params.end()) cur_.fail_at(at, "unbound parameter '" + at.text + "'");
      if (it->second < 0) cur_.fail_at(at, "parameter '" + at.text + "' is negative");
      return it->second;
    }
    cur_.fail("expected a time constant but found " + describe(at));
  }

  CondPtr cond_or() {
    auto c = cond_and();
    while (cur_.accept_keyword("or")) c = cor(c, cond_and());
    return c;
  }

  CondPtr cond_and() {
    auto c = cond_not();
    while (cur_.accept_keyword("and")) c = cand(c, cond_not());
    return c;
  }

  CondPtr cond_not() {
    if (cur_.accept_keyword("not")) return cnot(cond_not());
    return cond_atom();
  }

  CondPtr cond_atom() {
    if (cur_.accept_punct("(")) {
      auto c = cond_implies();
      cur_.expect_punct(")");
      return c;
    }
    const Token at = cur_.peek();
    if (!cur_.accept_keyword("m")) cur_.fail("expected 'm[<index>]' but found " + describe(at));
    cur_.expect_punct("[");
    const Token idx = cur_.peek();
    std::int64_t index = cur_.expect_int("a message index");
    if (index < 1) cur_.fail_at(idx, "message indices start at 1");
    cur_.expect_punct("]");
    const Token opt = cur_.peek();
    auto op = accept_relop(cur_);
    if (!op) cur_.fail("expected a relational operator but found " + describe(opt));
    const Token ct = cur_.peek();
    Value v = parse_value_literal(cur_);
    auto s = to_scalar(v);
    if (!s) cur_.fail_at(ct, "message conditions compare against scalar constants");
    return cmp(index, *op, *s);
  }

  TokenCursor& cur_;
  const ParseOptions& opts_;
};

}  // namespace

FormulaPtr parse_formula(TokenCursor& cur, const ParseOptions& options) {
  Parser p(cur, options);
  return p.implies();
}

FormulaPtr parse(std::string_view text, const ParseOptions& options) {
  TokenCursor cur(tokenize(text));
  auto f = parse_formula(cur, options);
  cur.accept_punct(";");
  if (!cur.at_end()) cur.fail("unexpected " + describe(cur.peek()) + " after constraint");
  return f;
}

CondPtr parse_condition(std::string_view text) {
  TokenCursor cur(tokenize(text));
  ParseOptions none;
  Parser p(cur, none);
  auto c = p.cond_implies();
  if (!cur.at_end()) cur.fail("unexpected " + describe(cur.peek()) + " after condition");
  return c;
}

}  // namespace btrv::scope
