#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace btrv {

/// Interned symbolic tag such as <ok> or <running>.
///
/// Symbols compare by identity; the interning table is process-wide and
/// guarded, so symbols may be created from any thread. Ordering between two
/// symbols is deliberately not provided: relational operators other than
/// (in)equality are undefined on tags.
class Symbol {
 public:
  Symbol() = default;
  explicit Symbol(std::string_view name);

  const std::string& name() const;
  std::uint32_t id() const { return id_; }

  friend bool operator==(Symbol a, Symbol b) { return a.id_ == b.id_; }

 private:
  std::uint32_t id_ = 0;
};

using Scalar = std::variant<bool, std::int64_t, Symbol>;

/// An ordered list of scalar parts, indexed from 1 in property text.
struct Message {
  std::vector<Scalar> parts;

  Message() = default;
  Message(std::initializer_list<Scalar> init) : parts(init) {}
  explicit Message(std::vector<Scalar> p) : parts(std::move(p)) {}

  bool empty() const { return parts.empty(); }
  std::size_t size() const { return parts.size(); }

  /// 1-based access; nullopt when the index is outside the message.
  std::optional<Scalar> at(std::int64_t index) const {
    if (index < 1 || static_cast<std::size_t>(index) > parts.size()) return std::nullopt;
    return parts[static_cast<std::size_t>(index - 1)];
  }

  friend bool operator==(const Message&, const Message&) = default;
};

/// Contents of a program-graph variable.
using Value = std::variant<bool, std::int64_t, Symbol, Message>;

inline Scalar sym(std::string_view name) { return Symbol(name); }
inline Message msg(std::initializer_list<Scalar> parts) { return Message(parts); }

enum class RelOp { Lt, Gt, Le, Ge, Eq, Ne };

std::string_view to_string(RelOp op);

/// Applies `op` to two scalars. Equality is structural across types
/// (different types are unequal); ordering is defined on integers only and
/// is false otherwise.
bool compare_scalars(RelOp op, const Scalar& a, const Scalar& b);

/// Same rules lifted to values; messages support (in)equality only.
bool compare_values(RelOp op, const Value& a, const Value& b);

/// Applies `op` to two integers.
bool compare_ints(RelOp op, std::int64_t a, std::int64_t b);

Value to_value(const Scalar& s);
std::optional<Scalar> to_scalar(const Value& v);

std::string format_scalar(const Scalar& s);
/// Messages print as `[<ok>,10]` without spaces so they stay a single token.
std::string format_message(const Message& m);
std::string format_value(const Value& v);

std::ostream& operator<<(std::ostream& os, const Message& m);
std::ostream& operator<<(std::ostream& os, const Value& v);

/// Declared domain dom(x) of a variable.
class Domain {
 public:
  enum class Kind { Int, Bool, Symbols, Message };

  static Domain integer();  // full 64-bit range
  static Domain integer(std::int64_t lo, std::int64_t hi);
  static Domain boolean();
  static Domain symbols(std::vector<Symbol> members);
  static Domain message();

  Kind kind() const { return kind_; }
  std::int64_t lo() const { return lo_; }
  std::int64_t hi() const { return hi_; }
  const std::vector<Symbol>& members() const { return members_; }
  bool bounded() const { return bounded_; }

  bool contains(const Value& v) const;
  std::string to_string() const;

  friend bool operator==(const Domain&, const Domain&) = default;

 private:
  Kind kind_ = Kind::Int;
  std::int64_t lo_ = 0;
  std::int64_t hi_ = 0;
  bool bounded_ = false;
  std::vector<Symbol> members_;
};

}  // namespace btrv
