#pragma once

#include <string>
#include <variant>
#include <vector>

#include "timechain/patterns.hpp"
#include "timechain/ta.hpp"

namespace timechain::jitter {

/// Bounded delay contribution in ticks.
struct JitterInterval {
    ta::Ticks min = 0;
    ta::Ticks max = 0;

    void validate() const; // throws InvalidBounds unless 0 <= min <= max
};

/// Per-component timing imperfection: constant hardware jitter, deterministic
/// software execution-time bounds, and bounded time-varying communication
/// jitter.
struct JitterSpec {
    JitterInterval hardware;      // min == max
    JitterInterval software;
    JitterInterval communication;

    void validate() const;
};

/// Component-wise interval sum J_T = J_H + J_S + J_C.
/// Throws OverflowError if the sum is not representable.
JitterInterval total_jitter(const JitterSpec& spec);

struct EventActivation {
    std::string in_chan;
    std::string out_chan;
};

struct PeriodicActivation {
    patterns::PeriodSpec period;
    std::string out_chan;
};

struct ChainComponent {
    std::string name;
    JitterSpec spec;
    std::variant<EventActivation, PeriodicActivation> activation;
};

/// Ordered signal path from stimulus to response. Adjacent components connect
/// out_i = in_{i+1}; at most the first component is periodic.
struct TimeChain {
    std::vector<ChainComponent> components;
    std::string stimulus_label;
    std::string response_label;

    void validate() const; // throws InvalidConfig / ChannelMismatch
};

/// Chain realized as a network of pattern automata, plus the location atoms
/// the response-time query is anchored to.
struct BuiltChain {
    ta::Network network;
    std::pair<std::string, std::string> stimulus_atom;  // (automaton, location)
    std::pair<std::string, std::string> response_atom;
    std::vector<std::string> warnings;
};

/// Each event-triggered component becomes an atomic action over its total
/// jitter (with a silent recycle edge so periodic heads can re-activate it);
/// a periodic head becomes a time-wrapped atomic action. A closing
/// environment automaton receives the final channel, and an opening emitter
/// drives the first in-channel when the head is event-triggered.
BuiltChain build_time_chain(const TimeChain& chain);

} // namespace timechain::jitter
