#include "btrv/scope/evaluator.hpp"

#include <algorithm>

#include "btrv/core/errors.hpp"

namespace btrv::scope {

namespace {

using V = Verdict;

V vnot(V a) { return static_cast<V>(2 - static_cast<int>(a)); }
V vand(V a, V b) { return static_cast<V>(std::min(static_cast<int>(a), static_cast<int>(b))); }
V vor(V a, V b) { return static_cast<V>(std::max(static_cast<int>(a), static_cast<int>(b))); }
V vbool(bool b) { return b ? V::True : V::False; }

// relop(d, theta) for every d >= d_min, including "never" (infinity):
// definite only when all those comparisons agree.
V open_ended_time_until(RelOp op, std::int64_t d_min, std::int64_t theta) {
  switch (op) {
    case RelOp::Lt: return d_min >= theta ? V::False : V::Inconclusive;
    case RelOp::Le: return d_min > theta ? V::False : V::Inconclusive;
    case RelOp::Eq: return d_min > theta ? V::False : V::Inconclusive;
    case RelOp::Gt: return d_min > theta ? V::True : V::Inconclusive;
    case RelOp::Ge: return d_min >= theta ? V::True : V::Inconclusive;
    case RelOp::Ne: return d_min > theta ? V::True : V::Inconclusive;
  }
  return V::Inconclusive;
}

// The event never happens: time_until is infinite.
V never_time_until(RelOp op) {
  switch (op) {
    case RelOp::Lt:
    case RelOp::Le:
    case RelOp::Eq: return V::False;
    default: return V::True;
  }
}

class Evaluator {
 public:
  Evaluator(const TimedStateSequence& rho, std::size_t n, bool open_ended)
      : rho_(rho), n_(n), open_(open_ended) {}

  // Returns verdicts for positions 0..n, where index n is the verdict just
  // beyond the last entry.
  std::vector<V> eval(const Formula& f) {
    std::vector<V> out(n_ + 1);
    switch (f.kind) {
      case FormulaKind::True:
        std::fill(out.begin(), out.end(), V::True);
        break;
      case FormulaKind::Event: {
        int c = channel(f.event.channel);
        for (std::size_t i = 0; i < n_; ++i) out[i] = vbool(event_holds(f.event, rho_.entries[i].state[c]));
        out[n_] = open_ ? V::Inconclusive : V::False;
        break;
      }
      case FormulaKind::TimeUntil: {
        int c = channel(f.event.channel);
        std::size_t next = n_;  // least j >= i where the event holds
        out[n_] = open_ ? V::Inconclusive : never_time_until(f.op);
        for (std::size_t k = n_; k-- > 0;) {
          if (event_holds(f.event, rho_.entries[k].state[c])) next = k;
          std::int64_t ti = static_cast<std::int64_t>(rho_.entries[k].tick);
          if (next < n_) {
            std::int64_t d = static_cast<std::int64_t>(rho_.entries[next].tick) - ti;
            out[k] = vbool(compare_ints(f.op, d, f.bound));
          } else if (open_) {
            std::int64_t d_min = static_cast<std::int64_t>(rho_.entries[n_ - 1].tick) - ti;
            out[k] = open_ended_time_until(f.op, d_min, f.bound);
          } else {
            out[k] = never_time_until(f.op);
          }
        }
        break;
      }
      case FormulaKind::Not: {
        auto a = eval(*f.lhs);
        for (std::size_t i = 0; i <= n_; ++i) out[i] = vnot(a[i]);
        break;
      }
      case FormulaKind::And:
      case FormulaKind::Or: {
        auto a = eval(*f.lhs);
        auto b = eval(*f.rhs);
        for (std::size_t i = 0; i <= n_; ++i) out[i] = f.kind == FormulaKind::And ? vand(a[i], b[i]) : vor(a[i], b[i]);
        break;
      }
      case FormulaKind::Next: {
        auto a = eval(*f.lhs);
        for (std::size_t i = 0; i < n_; ++i) out[i] = a[i + 1];
        // Beyond the end, next looks further into the unknown suffix.
        out[n_] = open_ ? a[n_] : V::False;
        if (n_ > 0 && !open_) out[n_ - 1] = V::False;
        break;
      }
      case FormulaKind::Until: {
        auto a = eval(*f.lhs);
        auto b = eval(*f.rhs);
        // Beyond the end of an open sequence: b may hold, or a may hold and
        // the obligation moves further; nothing else is known.
        out[n_] = open_ ? vor(b[n_], vand(a[n_], V::Inconclusive)) : V::False;
        for (std::size_t k = n_; k-- > 0;) out[k] = vor(b[k], vand(a[k], out[k + 1]));
        break;
      }
    }
    return out;
  }

 private:
  int channel(const ChannelKey& key) const {
    int c = rho_.channel_index(key);
    if (c < 0) throw EvalError("trace does not record channel " + btrv::to_string(key));
    return c;
  }

  const TimedStateSequence& rho_;
  std::size_t n_;
  bool open_;
};

}  // namespace

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::True: return "true";
    case Verdict::False: return "false";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

bool event_holds(const Event& e, const std::optional<Message>& state) {
  if (!state) return condition_holds_quiet(*e.cond, Message{});
  return condition_holds(*e.cond, *state);
}

std::vector<Verdict> evaluate_all(const Formula& phi, const TimedStateSequence& rho) {
  Evaluator ev(rho, rho.size(), rho.open_ended);
  auto all = ev.eval(phi);
  all.pop_back();
  return all;
}

Verdict evaluate(const Formula& phi, const TimedStateSequence& rho, std::size_t i) {
  if (i > rho.size()) throw ContractError("position " + std::to_string(i) + " is beyond the sequence");
  Evaluator ev(rho, rho.size(), rho.open_ended);
  return ev.eval(phi)[i];
}

std::optional<std::size_t> earliest_violation(const Formula& phi, const TimedStateSequence& rho) {
  if (rho.empty() || evaluate(phi, rho, 0) != Verdict::False) return std::nullopt;
  auto false_on_prefix = [&](std::size_t len) {
    Evaluator ev(rho, len, true);
    return ev.eval(phi)[0] == Verdict::False;
  };
  // A closed sequence can be false only because nothing follows it.
  if (!false_on_prefix(rho.size())) return rho.size() - 1;
  // Open-prefix verdicts are monotone in the length, so bisect.
  std::size_t lo = 1;
  std::size_t hi = rho.size();
  while (lo < hi) {
    std::size_t mid = lo + (hi - lo) / 2;
    if (false_on_prefix(mid))
      hi = mid;
    else
      lo = mid + 1;
  }
  return lo - 1;
}

}  // namespace btrv::scope
