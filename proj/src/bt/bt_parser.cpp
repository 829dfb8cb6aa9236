#include <fstream>
#include <sstream>

#include "btrv/bt/bt.hpp"
#include "btrv/core/errors.hpp"
#include "btrv/core/expr.hpp"
#include "btrv/core/lexer.hpp"

namespace btrv::bt {

namespace {

NodeDef parse_node(TokenCursor& cur) {
  const Token at = cur.peek();
  NodeDef n;
  if (cur.accept_keyword("sequence"))
    n.kind = NodeKind::Sequence;
  else if (cur.accept_keyword("fallback"))
    n.kind = NodeKind::Fallback;
  else if (cur.accept_keyword("condition"))
    n.kind = NodeKind::Condition;
  else if (cur.accept_keyword("action"))
    n.kind = NodeKind::Action;
  else
    cur.fail("expected a node kind (sequence, fallback, condition, action) but found " + describe(at));
  n.name = cur.expect_ident("a node name");

  if (!n.is_leaf()) {
    cur.expect_punct("{");
    while (!cur.accept_punct("}")) {
      if (cur.at_end()) cur.fail_at(at, "unterminated " + std::string(to_string(n.kind)) + " '" + n.name + "'");
      n.children.push_back(parse_node(cur));
    }
    return n;
  }

  cur.expect_punct("->");
  SkillBinding b;
  b.skill = cur.expect_ident("a skill name");
  for (;;) {
    if (cur.accept_keyword("request")) {
      b.request = parse_message_literal(cur);
    } else if (cur.accept_keyword("halt")) {
      if (n.kind == NodeKind::Condition) cur.fail("condition '" + n.name + "' cannot have a halt request");
      b.halt_request = parse_message_literal(cur);
    } else if (cur.accept_keyword("on")) {
      ReplyRule r;
      r.reply = parse_message_literal(cur);
      const Token st = cur.peek();
      auto s = parse_status(cur.expect_ident("a status"));
      if (!s) cur.fail_at(st, "expected success, failure or running");
      r.status = *s;
      b.replies.push_back(std::move(r));
    } else {
      break;
    }
  }
  n.skill = std::move(b);
  return n;
}

}  // namespace

BehaviorTreeDef parse_tree(std::string_view text) {
  TokenCursor cur(tokenize(text));
  BehaviorTreeDef def;
  if (cur.accept_keyword("tree")) def.name = cur.expect_ident("a tree name");
  def.root = parse_node(cur);
  if (!cur.at_end()) cur.fail("unexpected " + describe(cur.peek()) + " after the root node");
  validate(def);
  return def;
}

BehaviorTreeDef load_tree(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open tree file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_tree(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.message(), e.line(), e.column());
  }
}

}  // namespace btrv::bt
