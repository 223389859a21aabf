#include "timechain/jitter.hpp"

#include <limits>
#include <unordered_set>

#include "timechain/errors.hpp"

namespace timechain::jitter {

using ta::Ticks;

void JitterInterval::validate() const {
    if (min < 0 || min > max) {
        throw InvalidBounds("jitter interval [" + std::to_string(min) + ", " +
                            std::to_string(max) + "] must satisfy 0 <= min <= max");
    }
}

void JitterSpec::validate() const {
    hardware.validate();
    software.validate();
    communication.validate();
    if (hardware.min != hardware.max) {
        throw InvalidBounds("hardware jitter must be constant (min == max)");
    }
}

namespace {

Ticks checked_add(Ticks a, Ticks b) {
    if (b > 0 && a > std::numeric_limits<Ticks>::max() - b) {
        throw OverflowError("jitter sum exceeds the tick representation");
    }
    return a + b;
}

} // namespace

JitterInterval total_jitter(const JitterSpec& spec) {
    spec.validate();
    return {checked_add(checked_add(spec.hardware.min, spec.software.min), spec.communication.min),
            checked_add(checked_add(spec.hardware.max, spec.software.max), spec.communication.max)};
}

void TimeChain::validate() const {
    if (components.empty()) throw InvalidConfig("time chain must have at least one component");
    std::unordered_set<std::string> names;
    for (const auto& c : components) {
        if (c.name.empty()) throw InvalidConfig("every chain component needs a name");
        if (!names.insert(c.name).second) {
            throw InvalidConfig("duplicate component name '" + c.name + "'");
        }
        c.spec.validate();
    }
    for (std::size_t i = 0; i < components.size(); ++i) {
        const bool periodic = std::holds_alternative<PeriodicActivation>(components[i].activation);
        if (periodic && i != 0) {
            throw InvalidConfig("only the first component may be periodic ('" +
                                components[i].name + "')");
        }
    }
    auto out_of = [](const ChainComponent& c) -> const std::string& {
        if (const auto* ev = std::get_if<EventActivation>(&c.activation)) return ev->out_chan;
        return std::get<PeriodicActivation>(c.activation).out_chan;
    };
    for (std::size_t i = 0; i + 1 < components.size(); ++i) {
        const auto* next = std::get_if<EventActivation>(&components[i + 1].activation);
        if (!next || out_of(components[i]) != next->in_chan) {
            throw ChannelMismatch("component '" + components[i].name + "' output channel '" +
                                  out_of(components[i]) + "' does not feed '" +
                                  components[i + 1].name + "'");
        }
    }
}

BuiltChain build_time_chain(const TimeChain& chain) {
    chain.validate();
    BuiltChain built;
    std::vector<ta::TimedAutomaton> members;

    std::string first_in;
    for (std::size_t i = 0; i < chain.components.size(); ++i) {
        const auto& comp = chain.components[i];
        const JitterInterval jt = total_jitter(comp.spec);
        const patterns::DelayBounds bounds{jt.min, jt.max};

        if (const auto* ev = std::get_if<EventActivation>(&comp.activation)) {
            auto a = patterns::atomic_action(bounds, ev->in_chan, ev->out_chan, comp.name);
            // Recycle so the next stimulus finds the component ready again.
            ta::Edge recycle;
            recycle.source = a.location_index(patterns::kPostId);
            recycle.target = a.location_index(patterns::kPreId);
            a.edges.push_back(recycle);
            if (i == 0) first_in = ev->in_chan;
            members.push_back(std::move(a));
        } else {
            const auto& p = std::get<PeriodicActivation>(comp.activation);
            auto body = patterns::atomic_action(bounds, std::nullopt, p.out_chan, comp.name);
            auto wrapped = patterns::wrap_periodic(body, p.period, &built.warnings);
            wrapped.name = comp.name;
            members.push_back(std::move(wrapped));
        }
    }

    const auto& last = chain.components.back();
    const std::string& last_out = std::holds_alternative<EventActivation>(last.activation)
            ? std::get<EventActivation>(last.activation).out_chan
            : std::get<PeriodicActivation>(last.activation).out_chan;

    // Closing environment: always ready to accept the chain's response.
    {
        ta::TimedAutomaton sink;
        sink.name = "env_sink";
        sink.locations.push_back({"Wait", ta::LocationKind::Internal, {}});
        ta::Edge consume;
        consume.source = 0;
        consume.target = 0;
        consume.sync = ta::Sync{last_out, ta::SyncDirection::Receive};
        sink.edges.push_back(consume);
        members.push_back(std::move(sink));
    }

    // Opening environment: a one-shot emitter at a nondeterministic time,
    // needed only when the head waits for an external event.
    if (!first_in.empty()) {
        ta::TimedAutomaton src;
        src.name = "env_source";
        src.locations.push_back({"Start", ta::LocationKind::Internal, {}});
        src.locations.push_back({"Done", ta::LocationKind::Internal, {}});
        ta::Edge fire;
        fire.source = 0;
        fire.target = 1;
        fire.sync = ta::Sync{first_in, ta::SyncDirection::Emit};
        src.edges.push_back(fire);
        members.push_back(std::move(src));
    }

    built.network = patterns::par_compose(std::move(members));
    built.stimulus_atom = {chain.components.front().name, patterns::kActId};
    built.response_atom = {chain.components.back().name, patterns::kPostId};
    return built;
}

} // namespace timechain::jitter
