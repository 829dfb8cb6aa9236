#include "btrv/core/text_format.hpp"

#include "btrv/core/errors.hpp"
#include "btrv/core/lexer.hpp"

namespace btrv {

namespace {

Domain parse_domain(TokenCursor& cur) {
  const Token at = cur.peek();
  std::string kind = cur.expect_ident("a domain");
  if (kind == "int") {
    if (cur.accept_punct("[")) {
      std::int64_t lo = cur.expect_int("a lower bound");
      cur.expect_punct("..");
      std::int64_t hi = cur.expect_int("an upper bound");
      cur.expect_punct("]");
      if (lo > hi) cur.fail_at(at, "empty integer range");
      return Domain::integer(lo, hi);
    }
    return Domain::integer();
  }
  if (kind == "bool") return Domain::boolean();
  if (kind == "msg") return Domain::message();
  if (kind == "sym") {
    cur.expect_punct("{");
    std::vector<Symbol> members;
    do {
      members.emplace_back(cur.expect_ident("a symbol name"));
    } while (cur.accept_punct(","));
    cur.expect_punct("}");
    return Domain::symbols(std::move(members));
  }
  cur.fail_at(at, "unknown domain '" + kind + "'");
}

Value default_value(const Domain& d) {
  switch (d.kind()) {
    case Domain::Kind::Int: return Value(d.bounded() ? d.lo() : std::int64_t{0});
    case Domain::Kind::Bool: return Value(false);
    case Domain::Kind::Symbols: return Value(d.members().front());
    case Domain::Kind::Message: return Value(Message{});
  }
  return Value(false);
}

void skip_separators(TokenCursor& cur) {
  while (cur.accept_punct(";")) {
  }
}

ChannelKey parse_channel_ref(TokenCursor& cur) {
  ChannelKey key;
  key.source = cur.expect_ident("a source process");
  cur.expect_punct(",");
  key.dest = cur.expect_ident("a destination process");
  cur.expect_punct(",");
  return key;
}

bool starts_action(const TokenCursor& cur) {
  return cur.is_punct("!") || cur.is_punct("?") || cur.is_keyword("skip") || cur.is_keyword("call") ||
         (cur.peek().kind == Token::Kind::Ident && cur.is_punct(":=", 1));
}

std::variant<Action, CommAction> parse_action(TokenCursor& cur, const NativeRegistry& natives) {
  if (cur.accept_punct("!")) {
    cur.expect_punct("(");
    CommAction c;
    c.kind = CommKind::Send;
    c.channel = parse_channel_ref(cur);
    c.payload = parse_expr(cur);
    cur.expect_punct(")");
    return c;
  }
  if (cur.accept_punct("?")) {
    cur.expect_punct("(");
    CommAction c;
    c.kind = CommKind::Receive;
    c.channel = parse_channel_ref(cur);
    if (cur.is_punct("["))
      c.literal = parse_message_literal(cur);
    else
      c.var = cur.expect_ident("a variable or message literal");
    cur.expect_punct(")");
    return c;
  }
  Action a;
  if (cur.accept_keyword("skip")) return a;
  do {
    if (cur.is_keyword("call")) {
      const Token at = cur.next();
      std::string name = cur.expect_ident("a native effect name");
      if (a.native) cur.fail_at(at, "at most one native call per action");
      auto eff = natives ? natives(name) : nullptr;
      if (!eff) cur.fail_at(at, "unknown native effect '" + name + "'");
      a.native = std::move(eff);
      continue;
    }
    Assignment as;
    as.var = cur.expect_ident("an assignment target");
    cur.expect_punct(":=");
    as.value = parse_expr(cur);
    a.assignments.push_back(std::move(as));
  } while (cur.accept_punct(","));
  return a;
}

ProcessDef parse_process_block(TokenCursor& cur, const NativeRegistry& natives) {
  ProcessDef pd;
  const Token head = cur.next();
  pd.observer = head.text == "monitor";
  pd.name = cur.expect_ident("a process name");
  cur.expect_punct("{");
  ProgramGraph& g = pd.graph;
  bool has_initial = false;
  std::string first_location;
  for (;;) {
    skip_separators(cur);
    if (cur.accept_punct("}")) break;
    const Token at = cur.peek();
    if (at.kind == Token::Kind::End) cur.fail("unterminated block for '" + pd.name + "'");
    if (cur.accept_keyword("var")) {
      VarDecl v;
      v.name = cur.expect_ident("a variable name");
      cur.expect_punct(":");
      v.domain = parse_domain(cur);
      v.initial = default_value(v.domain);
      if (cur.accept_punct("=")) {
        const Token vt = cur.peek();
        v.initial = parse_value_literal(cur);
        if (!v.domain.contains(v.initial))
          cur.fail_at(vt, "initial value " + format_value(v.initial) + " is outside " + v.domain.to_string());
      }
      if (g.find_var(v.name) != nullptr) cur.fail_at(at, "duplicate variable '" + v.name + "'");
      g.add_var(std::move(v));
      continue;
    }
    if (cur.accept_keyword("initial")) {
      do {
        g.add_initial(cur.expect_ident("a location"));
      } while (cur.accept_punct(","));
      has_initial = true;
      continue;
    }
    if (cur.accept_keyword("initially")) {
      g.set_initial_condition(parse_expr(cur));
      continue;
    }
    if (cur.accept_keyword("location")) {
      do {
        g.add_location(cur.expect_ident("a location"));
      } while (cur.accept_punct(","));
      continue;
    }
    if (cur.accept_keyword("error")) {
      if (!pd.observer) cur.fail_at(at, "'error' is only allowed in monitor blocks");
      pd.error_location = cur.expect_ident("a location");
      g.add_location(pd.error_location);
      continue;
    }
    // Transition.
    Transition t;
    t.from = cur.expect_ident("a declaration or transition");
    cur.expect_punct("--");
    cur.expect_punct("[");
    Action skip;
    t.label = skip;
    if (cur.accept_punct(":")) {
      t.label = parse_action(cur, natives);
    } else if (starts_action(cur)) {
      t.label = parse_action(cur, natives);
    } else if (!cur.is_punct("]")) {
      t.guard = parse_expr(cur);
      if (cur.accept_punct(":")) t.label = parse_action(cur, natives);
    }
    cur.expect_punct("]");
    cur.expect_punct("-->");
    t.to = cur.expect_ident("a target location");
    if (first_location.empty()) first_location = t.from;
    g.add_transition(std::move(t));
  }
  if (!has_initial) {
    if (!first_location.empty())
      g.add_initial(first_location);
    else if (!g.locations().empty())
      g.add_initial(g.locations().front());
    else
      cur.fail_at(head, "process '" + pd.name + "' declares no locations");
  }
  if (pd.observer && pd.error_location.empty()) cur.fail_at(head, "monitor '" + pd.name + "' needs an 'error' location");
  return pd;
}

void write_process(const ProcessDef& pd, std::string& out) {
  const auto& g = pd.graph;
  out += (pd.observer ? "monitor " : "process ") + pd.name + " {\n";
  for (const auto& v : g.vars())
    out += "  var " + v.name + " : " + v.domain.to_string() + " = " + format_value(v.initial) + "\n";
  out += "  initial ";
  for (std::size_t i = 0; i < g.initial_locations().size(); ++i) {
    if (i > 0) out += ", ";
    out += g.initial_locations()[i];
  }
  out += "\n";
  if (pd.observer) out += "  error " + pd.error_location + "\n";
  out += "  location ";
  for (std::size_t i = 0; i < g.locations().size(); ++i) {
    if (i > 0) out += ", ";
    out += g.locations()[i];
  }
  out += "\n";
  if (g.initial_condition()) out += "  initially " + to_string(*g.initial_condition()) + "\n";
  for (const auto& t : g.transitions()) {
    out += "  " + t.from + " --[";
    if (t.guard) out += to_string(*t.guard);
    bool skip = !t.is_comm() && t.action().is_skip();
    if (!skip) out += (t.guard ? " : " : ": ") + label_to_string(t);
    out += "]--> " + t.to + "\n";
  }
  out += "}\n";
}

}  // namespace

Domain parse_domain_text(std::string_view text) {
  TokenCursor cur(tokenize(text));
  Domain d = parse_domain(cur);
  if (!cur.at_end()) cur.fail("unexpected " + describe(cur.peek()));
  return d;
}

SystemDef parse_system(std::string_view text, const NativeRegistry& natives) {
  TokenCursor cur(tokenize(text));
  SystemDef def;
  skip_separators(cur);
  if (cur.accept_keyword("system")) def.name = cur.expect_ident("a system name");
  for (;;) {
    skip_separators(cur);
    if (cur.at_end()) break;
    const Token at = cur.peek();
    if (cur.accept_keyword("channel")) {
      ChannelDecl c;
      c.key.source = cur.expect_ident("a source process");
      cur.expect_punct("->");
      c.key.dest = cur.expect_ident("a destination process");
      if (cur.accept_keyword("capacity")) {
        const Token ct = cur.peek();
        c.capacity = static_cast<int>(cur.expect_int("a capacity"));
        if (c.capacity != 0 && c.capacity != 1) cur.fail_at(ct, "capacity must be 0 or 1");
      }
      def.channels.push_back(std::move(c));
    } else if (cur.accept_keyword("shared")) {
      VarDecl v;
      v.name = cur.expect_ident("a variable name");
      cur.expect_punct(":");
      v.domain = parse_domain(cur);
      v.initial = default_value(v.domain);
      if (cur.accept_punct("=")) v.initial = parse_value_literal(cur);
      if (!v.domain.contains(v.initial)) cur.fail_at(at, "initial value of '" + v.name + "' outside its domain");
      def.shared.push_back(std::move(v));
    } else if (cur.is_keyword("process") || cur.is_keyword("monitor")) {
      def.processes.push_back(parse_process_block(cur, natives));
    } else {
      cur.fail("expected 'channel', 'shared', 'process' or 'monitor' but found " + describe(at));
    }
  }
  return def;
}

std::vector<ProcessDef> parse_processes(std::string_view text, const NativeRegistry& natives) {
  SystemDef def = parse_system(text, natives);
  if (!def.channels.empty() || !def.shared.empty()) throw Error("expected only process or monitor blocks");
  return def.processes;
}

std::string to_text(const ProcessDef& process) {
  std::string out;
  write_process(process, out);
  return out;
}

std::string to_text(const SystemDef& def) {
  std::string out = "system " + def.name + "\n\n";
  for (const auto& c : def.channels)
    out += "channel " + c.key.source + " -> " + c.key.dest + " capacity " + std::to_string(c.capacity) + "\n";
  for (const auto& v : def.shared)
    out += "shared " + v.name + " : " + v.domain.to_string() + " = " + format_value(v.initial) + "\n";
  for (const auto& p : def.processes) {
    out += "\n";
    write_process(p, out);
  }
  return out;
}

}  // namespace btrv
