#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "btrv/core/tss.hpp"
#include "btrv/scope/ast.hpp"

namespace btrv::scope {

enum class Verdict { False = 0, Inconclusive = 1, True = 2 };
std::string_view to_string(Verdict v);

/// True iff the condition holds on the channel's value. An empty channel is
/// judged as the zero-length message, on which every comparison is false.
bool event_holds(const Event& e, const std::optional<Message>& state);

/// Three-valued verdicts of `phi` at every position of `rho`.
///
/// For an open-ended sequence, obligations that a longer prefix could still
/// settle are inconclusive; a closed sequence is judged as complete (next at
/// the end is false, pending time_until resolves as if the event never
/// happens). time_until bounds are tick differences tau_j - tau_i. Throws
/// EvalError if phi mentions a channel the sequence does not carry.
std::vector<Verdict> evaluate_all(const Formula& phi, const TimedStateSequence& rho);

/// Verdict at position i (0 <= i < size). For i = size the verdict beyond
/// the last entry is returned, which is what an empty sequence yields at 0.
Verdict evaluate(const Formula& phi, const TimedStateSequence& rho, std::size_t i = 0);

/// Smallest k such that phi is false at position 0 on the prefix of length
/// k + 1, i.e. the entry at which a violation becomes definite.
std::optional<std::size_t> earliest_violation(const Formula& phi, const TimedStateSequence& rho);

}  // namespace btrv::scope
