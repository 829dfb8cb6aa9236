#include "btrv/core/trace_io.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "btrv/core/errors.hpp"

namespace btrv {

void write_trace(std::ostream& out, const TimedStateSequence& tss, const std::vector<ViolationRecord>& violations) {
  out << "btrv-trace " << kTraceFormatVersion << ' ' << (tss.open_ended ? "open" : "closed") << '\n';
  for (std::size_t i = 0; i < tss.channels.size(); ++i)
    out << "channel " << i << ' ' << tss.channels[i].source << ' ' << tss.channels[i].dest << '\n';
  std::vector<std::optional<Message>> prev(tss.channels.size());
  for (const auto& e : tss.entries) {
    out << "E " << e.tick;
    for (std::size_t c = 0; c < e.state.size(); ++c) {
      if (e.state[c] == prev[c]) continue;
      out << ' ' << c << '=';
      if (e.state[c])
        out << format_message(*e.state[c]);
      else
        out << '-';
    }
    out << '\n';
    prev = e.state;
  }
  for (const auto& v : violations) {
    int idx = tss.channel_index(v.channel);
    out << "V " << v.monitor << ' ' << v.tick << ' ' << v.position << ' ' << idx << ' ' << format_message(v.message)
        << '\n';
  }
}

std::string trace_to_string(const TimedStateSequence& tss, const std::vector<ViolationRecord>& violations) {
  std::ostringstream out;
  write_trace(out, tss, violations);
  return out.str();
}

namespace {

[[noreturn]] void bad(std::size_t line, const std::string& what) {
  throw Error("line " + std::to_string(line) + ": " + what);
}

std::uint64_t parse_u64(std::string_view s, std::size_t line, const char* what) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) bad(line, std::string("malformed ") + what + " '" + std::string(s) + "'");
  return v;
}

Message parse_msg(std::string_view s, std::size_t line) {
  try {
    return parse_message_literal(s);
  } catch (const ParseError& e) {
    bad(line, "malformed message '" + std::string(s) + "': " + e.message());
  }
}

}  // namespace

TraceFile read_trace(std::istream& in) {
  TraceFile tf;
  std::string raw;
  std::size_t line_no = 0;
  bool header = false;
  bool entries_started = false;
  std::vector<std::optional<Message>> current;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.empty() || raw[0] == '#') continue;
    std::istringstream ls(raw);
    std::string tag;
    ls >> tag;
    if (!header) {
      int version = 0;
      std::string mode;
      if (tag != "btrv-trace" || !(ls >> version >> mode)) bad(line_no, "missing 'btrv-trace' header");
      if (version != kTraceFormatVersion) bad(line_no, "unsupported trace version " + std::to_string(version));
      if (mode != "open" && mode != "closed") bad(line_no, "trace mode must be 'open' or 'closed'");
      tf.tss.open_ended = mode == "open";
      header = true;
      continue;
    }
    if (tag == "channel") {
      if (entries_started) bad(line_no, "channel declared after entries");
      std::string idx, src, dst, extra;
      if (!(ls >> idx >> src >> dst) || (ls >> extra)) bad(line_no, "expected 'channel <index> <source> <dest>'");
      if (parse_u64(idx, line_no, "channel index") != tf.tss.channels.size()) bad(line_no, "channel indices must be consecutive from 0");
      tf.tss.channels.push_back(ChannelKey{src, dst});
      continue;
    }
    if (tag == "E") {
      if (!entries_started) {
        current.assign(tf.tss.channels.size(), std::nullopt);
        entries_started = true;
      }
      std::string tick;
      if (!(ls >> tick)) bad(line_no, "entry without tick");
      TssEntry e;
      e.tick = parse_u64(tick, line_no, "tick");
      std::string item;
      while (ls >> item) {
        auto eq = item.find('=');
        if (eq == std::string::npos) bad(line_no, "expected '<index>=<message>' but found '" + item + "'");
        std::uint64_t c = parse_u64(std::string_view(item).substr(0, eq), line_no, "channel index");
        if (c >= current.size()) bad(line_no, "unknown channel index " + std::to_string(c));
        std::string_view val = std::string_view(item).substr(eq + 1);
        if (val == "-")
          current[c].reset();
        else
          current[c] = parse_msg(val, line_no);
      }
      if (!tf.tss.entries.empty() && e.tick < tf.tss.entries.back().tick) bad(line_no, "tick identifiers decrease");
      if (tf.tss.entries.empty() && e.tick != 0) bad(line_no, "first entry must have tick 0");
      e.state = current;
      tf.tss.entries.push_back(std::move(e));
      continue;
    }
    if (tag == "V") {
      std::string monitor, tick, pos, idx, m, extra;
      if (!(ls >> monitor >> tick >> pos >> idx >> m) || (ls >> extra))
        bad(line_no, "expected 'V <monitor> <tick> <position> <index> <message>'");
      ViolationRecord v;
      v.monitor = monitor;
      v.tick = parse_u64(tick, line_no, "tick");
      v.position = parse_u64(pos, line_no, "position");
      std::uint64_t c = parse_u64(idx, line_no, "channel index");
      if (c >= tf.tss.channels.size()) bad(line_no, "unknown channel index " + std::to_string(c));
      v.channel = tf.tss.channels[c];
      v.message = parse_msg(m, line_no);
      tf.violations.push_back(std::move(v));
      continue;
    }
    bad(line_no, "unknown record '" + tag + "'");
  }
  if (!header) bad(line_no + 1, "empty trace file");
  return tf;
}

TraceFile read_trace_string(const std::string& text) {
  std::istringstream in(text);
  return read_trace(in);
}

}  // namespace btrv
