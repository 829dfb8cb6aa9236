#include "btrv/core/value.hpp"

#include <deque>
#include <mutex>
#include <ostream>
#include <shared_mutex>
#include <unordered_map>

#include "btrv/core/errors.hpp"

namespace btrv {

namespace {

struct SymbolTable {
  std::shared_mutex mutex;
  std::deque<std::string> names{std::string()};
  std::unordered_map<std::string, std::uint32_t> ids{{std::string(), 0}};

  static SymbolTable& instance() {
    static SymbolTable table;
    return table;
  }
};

}  // namespace

Symbol::Symbol(std::string_view name) {
  auto& table = SymbolTable::instance();
  std::string key(name);
  {
    std::shared_lock lock(table.mutex);
    auto it = table.ids.find(key);
    if (it != table.ids.end()) {
      id_ = it->second;
      return;
    }
  }
  std::unique_lock lock(table.mutex);
  auto [it, inserted] = table.ids.try_emplace(key, static_cast<std::uint32_t>(table.names.size()));
  if (inserted) table.names.push_back(key);
  id_ = it->second;
}

const std::string& Symbol::name() const {
  auto& table = SymbolTable::instance();
  std::shared_lock lock(table.mutex);
  return table.names[id_];
}

std::string_view to_string(RelOp op) {
  switch (op) {
    case RelOp::Lt: return "<";
    case RelOp::Gt: return ">";
    case RelOp::Le: return "<=";
    case RelOp::Ge: return ">=";
    case RelOp::Eq: return "=";
    case RelOp::Ne: return "!=";
  }
  return "?";
}

bool compare_ints(RelOp op, std::int64_t a, std::int64_t b) {
  switch (op) {
    case RelOp::Lt: return a < b;
    case RelOp::Gt: return a > b;
    case RelOp::Le: return a <= b;
    case RelOp::Ge: return a >= b;
    case RelOp::Eq: return a == b;
    case RelOp::Ne: return a != b;
  }
  return false;
}

bool compare_scalars(RelOp op, const Scalar& a, const Scalar& b) {
  if (op == RelOp::Eq) return a == b;
  if (op == RelOp::Ne) return !(a == b);
  const auto* ia = std::get_if<std::int64_t>(&a);
  const auto* ib = std::get_if<std::int64_t>(&b);
  if (ia == nullptr || ib == nullptr) return false;
  return compare_ints(op, *ia, *ib);
}

bool compare_values(RelOp op, const Value& a, const Value& b) {
  if (op == RelOp::Eq) return a == b;
  if (op == RelOp::Ne) return !(a == b);
  const auto* ia = std::get_if<std::int64_t>(&a);
  const auto* ib = std::get_if<std::int64_t>(&b);
  if (ia == nullptr || ib == nullptr) return false;
  return compare_ints(op, *ia, *ib);
}

Value to_value(const Scalar& s) {
  return std::visit([](const auto& x) -> Value { return x; }, s);
}

std::optional<Scalar> to_scalar(const Value& v) {
  if (const auto* b = std::get_if<bool>(&v)) return Scalar(*b);
  if (const auto* i = std::get_if<std::int64_t>(&v)) return Scalar(*i);
  if (const auto* s = std::get_if<Symbol>(&v)) return Scalar(*s);
  return std::nullopt;
}

std::string format_scalar(const Scalar& s) {
  if (const auto* b = std::get_if<bool>(&s)) return *b ? "true" : "false";
  if (const auto* i = std::get_if<std::int64_t>(&s)) return std::to_string(*i);
  return "<" + std::get<Symbol>(s).name() + ">";
}

std::string format_message(const Message& m) {
  std::string out = "[";
  for (std::size_t i = 0; i < m.parts.size(); ++i) {
    if (i > 0) out += ",";
    out += format_scalar(m.parts[i]);
  }
  out += "]";
  return out;
}

std::string format_value(const Value& v) {
  if (const auto* m = std::get_if<Message>(&v)) return format_message(*m);
  return format_scalar(*to_scalar(v));
}

std::ostream& operator<<(std::ostream& os, const Message& m) { return os << format_message(m); }
std::ostream& operator<<(std::ostream& os, const Value& v) { return os << format_value(v); }

Domain Domain::integer() {
  Domain d;
  d.kind_ = Kind::Int;
  return d;
}

Domain Domain::integer(std::int64_t lo, std::int64_t hi) {
  if (lo > hi) throw ModelError("empty integer domain [" + std::to_string(lo) + ".." + std::to_string(hi) + "]");
  Domain d;
  d.kind_ = Kind::Int;
  d.lo_ = lo;
  d.hi_ = hi;
  d.bounded_ = true;
  return d;
}

Domain Domain::boolean() {
  Domain d;
  d.kind_ = Kind::Bool;
  return d;
}

Domain Domain::symbols(std::vector<Symbol> members) {
  if (members.empty()) throw ModelError("empty symbol domain");
  Domain d;
  d.kind_ = Kind::Symbols;
  d.members_ = std::move(members);
  return d;
}

Domain Domain::message() {
  Domain d;
  d.kind_ = Kind::Message;
  return d;
}

bool Domain::contains(const Value& v) const {
  switch (kind_) {
    case Kind::Int: {
      const auto* i = std::get_if<std::int64_t>(&v);
      return i != nullptr && (!bounded_ || (*i >= lo_ && *i <= hi_));
    }
    case Kind::Bool:
      return std::holds_alternative<bool>(v);
    case Kind::Symbols: {
      const auto* s = std::get_if<Symbol>(&v);
      if (s == nullptr) return false;
      for (const auto& m : members_)
        if (m == *s) return true;
      return false;
    }
    case Kind::Message:
      return std::holds_alternative<Message>(v);
  }
  return false;
}

std::string Domain::to_string() const {
  switch (kind_) {
    case Kind::Int:
      return bounded_ ? "int[" + std::to_string(lo_) + ".." + std::to_string(hi_) + "]" : "int";
    case Kind::Bool:
      return "bool";
    case Kind::Symbols: {
      std::string out = "sym{";
      for (std::size_t i = 0; i < members_.size(); ++i) {
        if (i > 0) out += ",";
        out += members_[i].name();
      }
      return out + "}";
    }
    case Kind::Message:
      return "msg";
  }
  return "?";
}

}  // namespace btrv
