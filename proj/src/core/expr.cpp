#include "btrv/core/expr.hpp"

#include <algorithm>

#include "btrv/core/errors.hpp"
#include "btrv/core/lexer.hpp"

namespace btrv {

namespace ex {

namespace {
ExprPtr node(ExprKind kind, std::vector<ExprPtr> args) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  e->args = std::move(args);
  return e;
}
}  // namespace

ExprPtr lit(Value v) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Literal;
  e->literal = std::move(v);
  return e;
}
ExprPtr boolean(bool b) { return lit(Value(b)); }
ExprPtr integer(std::int64_t v) { return lit(Value(v)); }
ExprPtr symbol(std::string_view name) { return lit(Value(Symbol(name))); }

ExprPtr var(std::string name) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Var;
  e->name = std::move(name);
  return e;
}

ExprPtr index(ExprPtr message, std::int64_t i) { return node(ExprKind::Index, {std::move(message), integer(i)}); }

ExprPtr make_message(std::vector<ExprPtr> parts) {
  bool constant = std::all_of(parts.begin(), parts.end(), [](const ExprPtr& p) {
    return p->kind == ExprKind::Literal && !std::holds_alternative<Message>(p->literal);
  });
  if (constant) {
    Message m;
    for (const auto& p : parts) m.parts.push_back(*to_scalar(p->literal));
    return lit(Value(std::move(m)));
  }
  return node(ExprKind::MakeMessage, std::move(parts));
}

ExprPtr not_(ExprPtr a) { return node(ExprKind::Not, {std::move(a)}); }
ExprPtr neg(ExprPtr a) { return node(ExprKind::Neg, {std::move(a)}); }
ExprPtr and_(ExprPtr a, ExprPtr b) { return node(ExprKind::And, {std::move(a), std::move(b)}); }
ExprPtr or_(ExprPtr a, ExprPtr b) { return node(ExprKind::Or, {std::move(a), std::move(b)}); }
ExprPtr implies(ExprPtr a, ExprPtr b) { return node(ExprKind::Implies, {std::move(a), std::move(b)}); }
ExprPtr binary(ExprKind kind, ExprPtr a, ExprPtr b) { return node(kind, {std::move(a), std::move(b)}); }

ExprPtr compare(RelOp op, ExprPtr a, ExprPtr b) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Compare;
  e->op = op;
  e->args = {std::move(a), std::move(b)};
  return e;
}

ExprPtr call(ExprKind kind, std::vector<ExprPtr> args) { return node(kind, std::move(args)); }

}  // namespace ex

ExprPtr bind_expr(const ExprPtr& e, const SlotResolver& resolve) {
  if (e->kind == ExprKind::Literal) return e;
  auto copy = std::make_shared<Expr>(*e);
  if (e->kind == ExprKind::Var) {
    copy->slot = resolve(e->name);
    if (copy->slot < 0) throw ModelError("unknown variable '" + e->name + "'");
    return copy;
  }
  for (auto& a : copy->args) a = bind_expr(a, resolve);
  return copy;
}

namespace {

std::string_view kind_name(ExprKind k) {
  switch (k) {
    case ExprKind::Add: return "+";
    case ExprKind::Sub: return "-";
    case ExprKind::Mul: return "*";
    case ExprKind::Div: return "/";
    case ExprKind::Mod: return "%";
    case ExprKind::Len: return "len";
    case ExprKind::Min: return "min";
    case ExprKind::Max: return "max";
    default: return "?";
  }
}

bool truth(const std::optional<Value>& v, const Expr& where) {
  if (!v) return false;
  if (const auto* b = std::get_if<bool>(&*v)) return *b;
  throw EvalError("expected a boolean in '" + to_string(where) + "', got " + format_value(*v));
}

std::int64_t as_int(const Value& v, const Expr& where) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
  throw EvalError("expected an integer in '" + to_string(where) + "', got " + format_value(v));
}

}  // namespace

std::optional<Value> eval(const Expr& e, const std::vector<Value>& store) {
  switch (e.kind) {
    case ExprKind::Literal:
      return e.literal;
    case ExprKind::Var:
      if (e.slot < 0 || static_cast<std::size_t>(e.slot) >= store.size())
        throw EvalError("unbound variable '" + e.name + "'");
      return store[static_cast<std::size_t>(e.slot)];
    case ExprKind::Index: {
      auto base = eval(*e.args[0], store);
      auto idx = eval(*e.args[1], store);
      if (!base || !idx) return std::nullopt;
      const auto* m = std::get_if<Message>(&*base);
      if (m == nullptr) throw EvalError("indexing a non-message value in '" + to_string(e) + "'");
      auto part = m->at(as_int(*idx, e));
      if (!part) return std::nullopt;
      return to_value(*part);
    }
    case ExprKind::MakeMessage: {
      Message m;
      for (const auto& a : e.args) {
        auto v = eval(*a, store);
        if (!v) return std::nullopt;
        auto s = to_scalar(*v);
        if (!s) throw EvalError("message parts must be scalars in '" + to_string(e) + "'");
        m.parts.push_back(*s);
      }
      return Value(std::move(m));
    }
    case ExprKind::Not:
      return Value(!truth(eval(*e.args[0], store), e));
    case ExprKind::And:
      return Value(truth(eval(*e.args[0], store), e) && truth(eval(*e.args[1], store), e));
    case ExprKind::Or:
      return Value(truth(eval(*e.args[0], store), e) || truth(eval(*e.args[1], store), e));
    case ExprKind::Implies:
      return Value(!truth(eval(*e.args[0], store), e) || truth(eval(*e.args[1], store), e));
    case ExprKind::Compare: {
      auto a = eval(*e.args[0], store);
      auto b = eval(*e.args[1], store);
      if (!a || !b) return Value(false);
      return Value(compare_values(e.op, *a, *b));
    }
    case ExprKind::Neg: {
      auto a = eval(*e.args[0], store);
      if (!a) return std::nullopt;
      std::int64_t r = 0;
      if (__builtin_sub_overflow(std::int64_t{0}, as_int(*a, e), &r)) throw EvalError("integer overflow");
      return Value(r);
    }
    case ExprKind::Add:
    case ExprKind::Sub:
    case ExprKind::Mul:
    case ExprKind::Div:
    case ExprKind::Mod:
    case ExprKind::Min:
    case ExprKind::Max: {
      auto a = eval(*e.args[0], store);
      auto b = eval(*e.args[1], store);
      if (!a || !b) return std::nullopt;
      std::int64_t x = as_int(*a, e);
      std::int64_t y = as_int(*b, e);
      std::int64_t r = 0;
      bool overflow = false;
      switch (e.kind) {
        case ExprKind::Add: overflow = __builtin_add_overflow(x, y, &r); break;
        case ExprKind::Sub: overflow = __builtin_sub_overflow(x, y, &r); break;
        case ExprKind::Mul: overflow = __builtin_mul_overflow(x, y, &r); break;
        case ExprKind::Div:
        case ExprKind::Mod:
          if (y == 0) throw EvalError("division by zero in '" + to_string(e) + "'");
          if (x == INT64_MIN && y == -1) {
            overflow = true;
            break;
          }
          r = e.kind == ExprKind::Div ? x / y : x % y;
          break;
        case ExprKind::Min: r = std::min(x, y); break;
        case ExprKind::Max: r = std::max(x, y); break;
        default: break;
      }
      if (overflow) throw EvalError("integer overflow in '" + to_string(e) + "'");
      return Value(r);
    }
    case ExprKind::Len: {
      auto a = eval(*e.args[0], store);
      if (!a) return std::nullopt;
      const auto* m = std::get_if<Message>(&*a);
      if (m == nullptr) throw EvalError("len of a non-message value");
      return Value(static_cast<std::int64_t>(m->size()));
    }
  }
  return std::nullopt;
}

bool holds(const Expr& e, const std::vector<Value>& store) { return truth(eval(e, store), e); }

void free_variables(const Expr& e, std::vector<std::string>& out) {
  if (e.kind == ExprKind::Var) {
    if (std::find(out.begin(), out.end(), e.name) == out.end()) out.push_back(e.name);
    return;
  }
  for (const auto& a : e.args) free_variables(*a, out);
}

namespace {

int precedence(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Implies: return 1;
    case ExprKind::Or: return 2;
    case ExprKind::And: return 3;
    case ExprKind::Not: return 4;
    case ExprKind::Compare: return 5;
    case ExprKind::Add:
    case ExprKind::Sub: return 6;
    case ExprKind::Mul:
    case ExprKind::Div:
    case ExprKind::Mod: return 7;
    case ExprKind::Neg: return 8;
    case ExprKind::Index: return 9;
    case ExprKind::Literal:
      if (const auto* i = std::get_if<std::int64_t>(&e.literal); i != nullptr && *i < 0) return 8;
      return 10;
    default: return 10;
  }
}

void print(const Expr& e, int min_prec, std::string& out);

void print_child(const Expr& e, int min_prec, std::string& out) {
  bool parens = precedence(e) < min_prec;
  if (parens) out += "(";
  print(e, parens ? 0 : min_prec, out);
  if (parens) out += ")";
}

void print(const Expr& e, int, std::string& out) {
  int p = precedence(e);
  switch (e.kind) {
    case ExprKind::Literal:
      out += format_value(e.literal);
      return;
    case ExprKind::Var:
      out += e.name;
      return;
    case ExprKind::Index:
      print_child(*e.args[0], 9, out);
      out += "[";
      print(*e.args[1], 0, out);
      out += "]";
      return;
    case ExprKind::MakeMessage:
      out += "[";
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i > 0) out += ", ";
        print(*e.args[i], 0, out);
      }
      out += "]";
      return;
    case ExprKind::Not:
      out += "not ";
      print_child(*e.args[0], p, out);
      return;
    case ExprKind::Neg:
      out += "-";
      print_child(*e.args[0], p + 1, out);
      return;
    case ExprKind::Implies:
      print_child(*e.args[0], p + 1, out);
      out += " => ";
      print_child(*e.args[1], p, out);
      return;
    case ExprKind::Compare:
      print_child(*e.args[0], p + 1, out);
      out += " ";
      out += to_string(e.op);
      out += " ";
      print_child(*e.args[1], p + 1, out);
      return;
    case ExprKind::And:
    case ExprKind::Or:
    case ExprKind::Add:
    case ExprKind::Sub:
    case ExprKind::Mul:
    case ExprKind::Div:
    case ExprKind::Mod: {
      print_child(*e.args[0], p, out);
      if (e.kind == ExprKind::And)
        out += " and ";
      else if (e.kind == ExprKind::Or)
        out += " or ";
      else
        out += " " + std::string(kind_name(e.kind)) + " ";
      print_child(*e.args[1], p + 1, out);
      return;
    }
    case ExprKind::Len:
    case ExprKind::Min:
    case ExprKind::Max:
      out += kind_name(e.kind);
      out += "(";
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i > 0) out += ", ";
        print(*e.args[i], 0, out);
      }
      out += ")";
      return;
  }
}

// ---- parser ----

ExprPtr parse_implies(TokenCursor& cur);

ExprPtr parse_primary(TokenCursor& cur) {
  const Token& t = cur.peek();
  if (t.kind == Token::Kind::Int) {
    cur.next();
    return ex::integer(t.ival);
  }
  if (t.kind == Token::Kind::Symbol) {
    cur.next();
    return ex::symbol(t.text);
  }
  if (cur.accept_punct("(")) {
    auto e = parse_implies(cur);
    cur.expect_punct(")");
    return e;
  }
  if (cur.accept_punct("[")) {
    std::vector<ExprPtr> parts;
    if (!cur.accept_punct("]")) {
      do {
        parts.push_back(parse_implies(cur));
      } while (cur.accept_punct(","));
      cur.expect_punct("]");
    }
    return ex::make_message(std::move(parts));
  }
  if (t.kind == Token::Kind::Ident) {
    if (t.text == "true" || t.text == "false") {
      cur.next();
      return ex::boolean(t.text == "true");
    }
    if ((t.text == "len" || t.text == "min" || t.text == "max") && cur.is_punct("(", 1)) {
      Token name = cur.next();
      cur.expect_punct("(");
      std::vector<ExprPtr> args;
      do {
        args.push_back(parse_implies(cur));
      } while (cur.accept_punct(","));
      cur.expect_punct(")");
      ExprKind kind = name.text == "len" ? ExprKind::Len : name.text == "min" ? ExprKind::Min : ExprKind::Max;
      std::size_t arity = kind == ExprKind::Len ? 1 : 2;
      if (args.size() != arity) cur.fail_at(name, name.text + " takes " + std::to_string(arity) + " argument(s)");
      return ex::call(kind, std::move(args));
    }
    cur.next();
    return ex::var(t.text);
  }
  cur.fail("expected an expression but found " + describe(t));
}

ExprPtr parse_postfix(TokenCursor& cur) {
  auto e = parse_primary(cur);
  while (cur.accept_punct("[")) {
    auto idx = parse_implies(cur);
    cur.expect_punct("]");
    e = ex::binary(ExprKind::Index, e, idx);
  }
  return e;
}

ExprPtr parse_unary(TokenCursor& cur) {
  if (cur.accept_punct("-")) {
    auto operand = parse_unary(cur);
    if (operand->kind == ExprKind::Literal) {
      if (const auto* i = std::get_if<std::int64_t>(&operand->literal); i != nullptr && *i >= 0)
        return ex::integer(-*i);
    }
    return ex::neg(operand);
  }
  return parse_postfix(cur);
}

ExprPtr parse_mul(TokenCursor& cur) {
  auto e = parse_unary(cur);
  for (;;) {
    if (cur.accept_punct("*"))
      e = ex::binary(ExprKind::Mul, e, parse_unary(cur));
    else if (cur.accept_punct("/"))
      e = ex::binary(ExprKind::Div, e, parse_unary(cur));
    else if (cur.accept_punct("%"))
      e = ex::binary(ExprKind::Mod, e, parse_unary(cur));
    else
      return e;
  }
}

ExprPtr parse_add(TokenCursor& cur) {
  auto e = parse_mul(cur);
  for (;;) {
    if (cur.accept_punct("+"))
      e = ex::binary(ExprKind::Add, e, parse_mul(cur));
    else if (cur.accept_punct("-"))
      e = ex::binary(ExprKind::Sub, e, parse_mul(cur));
    else
      return e;
  }
}

ExprPtr parse_compare(TokenCursor& cur) {
  auto e = parse_add(cur);
  if (auto op = accept_relop(cur)) e = ex::compare(*op, e, parse_add(cur));
  return e;
}

ExprPtr parse_not(TokenCursor& cur) {
  if (cur.accept_keyword("not")) return ex::not_(parse_not(cur));
  return parse_compare(cur);
}

ExprPtr parse_and(TokenCursor& cur) {
  auto e = parse_not(cur);
  while (cur.accept_keyword("and") || cur.accept_punct("&&")) e = ex::and_(e, parse_not(cur));
  return e;
}

ExprPtr parse_or(TokenCursor& cur) {
  auto e = parse_and(cur);
  while (cur.accept_keyword("or") || cur.accept_punct("||")) e = ex::or_(e, parse_and(cur));
  return e;
}

ExprPtr parse_implies(TokenCursor& cur) {
  auto e = parse_or(cur);
  if (cur.accept_punct("=>") || cur.accept_keyword("implies")) return ex::implies(e, parse_implies(cur));
  return e;
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  print(e, 0, out);
  return out;
}

std::optional<RelOp> accept_relop(TokenCursor& cur) {
  const Token& t = cur.peek();
  if (t.kind != Token::Kind::Punct) return std::nullopt;
  std::optional<RelOp> op;
  if (t.text == "<") op = RelOp::Lt;
  else if (t.text == ">") op = RelOp::Gt;
  else if (t.text == "<=") op = RelOp::Le;
  else if (t.text == ">=") op = RelOp::Ge;
  else if (t.text == "=" || t.text == "==") op = RelOp::Eq;
  else if (t.text == "!=") op = RelOp::Ne;
  if (op) cur.next();
  return op;
}

ExprPtr parse_expr(TokenCursor& cur) { return parse_implies(cur); }

ExprPtr parse_expr(std::string_view text) {
  TokenCursor cur(tokenize(text));
  auto e = parse_expr(cur);
  if (!cur.at_end()) cur.fail("unexpected " + describe(cur.peek()) + " after expression");
  return e;
}

Value parse_value_literal(TokenCursor& cur) {
  const Token& t = cur.peek();
  if (t.kind == Token::Kind::Int || cur.is_punct("-")) return Value(cur.expect_int("an integer"));
  if (t.kind == Token::Kind::Symbol) {
    cur.next();
    return Value(Symbol(t.text));
  }
  if (cur.is_keyword("true") || cur.is_keyword("false")) {
    bool b = cur.next().text == "true";
    return Value(b);
  }
  if (cur.is_punct("[")) return Value(parse_message_literal(cur));
  cur.fail("expected a literal value but found " + describe(t));
}

Message parse_message_literal(TokenCursor& cur) {
  cur.expect_punct("[");
  Message m;
  if (cur.accept_punct("]")) return m;
  do {
    const Token& at = cur.peek();
    Value v = parse_value_literal(cur);
    auto s = to_scalar(v);
    if (!s) cur.fail_at(at, "nested messages are not allowed");
    m.parts.push_back(*s);
  } while (cur.accept_punct(","));
  cur.expect_punct("]");
  return m;
}

Message parse_message_literal(std::string_view text) {
  TokenCursor cur(tokenize(text));
  Message m = parse_message_literal(cur);
  if (!cur.at_end()) cur.fail("unexpected " + describe(cur.peek()) + " after message");
  return m;
}

}  // namespace btrv
