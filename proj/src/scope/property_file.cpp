#include "btrv/scope/property_file.hpp"

#include <fstream>
#include <sstream>

#include "btrv/core/errors.hpp"
#include "btrv/core/lexer.hpp"

namespace btrv::scope {

PropertySet parse_property_file(std::string_view text, const std::map<std::string, std::int64_t>& overrides,
                                const ParseOptions& base) {
  TokenCursor cur(tokenize(text));
  PropertySet out;
  ParseOptions opts = base;
  for (const auto& [k, v] : overrides) opts.params[k] = v;
  for (;;) {
    while (cur.accept_punct(";")) {
    }
    if (cur.at_end()) break;
    const Token at = cur.peek();
    if (cur.accept_keyword("param")) {
      std::string name = cur.expect_ident("a parameter name");
      cur.expect_punct("=");
      const Token vt = cur.peek();
      std::int64_t v = cur.expect_int("an integer value");
      if (v < 0) cur.fail_at(vt, "parameters must be nonnegative");
      if (!overrides.count(name)) opts.params[name] = v;
      continue;
    }
    if (cur.accept_keyword("property")) {
      Property p;
      p.line = at.line;
      p.name = cur.expect_ident("a property name");
      for (const auto& q : out.properties)
        if (q.name == p.name) cur.fail_at(at, "duplicate property '" + p.name + "'");
      cur.expect_punct("=");
      p.formula = parse_formula(cur, opts);
      if (!cur.is_punct(";") && !cur.at_end() && !cur.is_keyword("property") && !cur.is_keyword("param"))
        cur.fail("unexpected " + describe(cur.peek()) + " after property '" + p.name + "'");
      out.properties.push_back(std::move(p));
      continue;
    }
    cur.fail("expected 'property' or 'param' but found " + describe(at));
  }
  out.params = opts.params;
  return out;
}

PropertySet load_property_file(const std::string& path, const std::map<std::string, std::int64_t>& overrides,
                               const ParseOptions& base) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open property file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_property_file(ss.str(), overrides, base);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.message(), e.line(), e.column());
  }
}

}  // namespace btrv::scope
