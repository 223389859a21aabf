#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "timechain/ta.hpp"

namespace timechain::verify {

/// Positive boolean combination (and/or) of location-occupancy atoms
/// "automaton A is in location L". Evaluable on a location vector alone.
class StateFormula {
public:
    enum class Kind { Atom, And, Or };

    /// Placeholder atom with empty names; resolve it before use.
    StateFormula() = default;

    static StateFormula atom(std::string automaton, std::string location);
    static StateFormula conjunction(std::vector<StateFormula> children);
    static StateFormula disjunction(std::vector<StateFormula> children);

    /// Grammar: atom = name "." name; formula = atom | "(" formula ")"
    ///          | formula "&&" formula | formula "||" formula.
    /// "&&" binds tighter than "||". Throws ParseError.
    static StateFormula parse(std::string_view text);

    Kind kind() const { return kind_; }
    const std::string& automaton() const { return automaton_; } // Atom only
    const std::string& location() const { return location_; }   // Atom only
    const std::vector<StateFormula>& children() const { return children_; }

    std::string to_string() const;
    bool operator==(const StateFormula& other) const;

private:
    Kind kind_ = Kind::Atom;
    std::string automaton_;
    std::string location_;
    std::vector<StateFormula> children_;
};

/// Standard boolean evaluation over occupancy atoms.
/// Throws UnknownName if the formula references unknown automata/locations.
bool evaluate(const StateFormula& f, const ta::Network& net,
              const std::vector<std::size_t>& locations);

/// Formula with atoms resolved to (automaton index, location index) for
/// repeated evaluation during exploration.
class CompiledFormula {
public:
    CompiledFormula() = default;
    CompiledFormula(const StateFormula& f, const ta::Network& net); // throws UnknownName

    bool eval(const std::vector<std::size_t>& locations) const;

private:
    struct Node {
        StateFormula::Kind kind;
        std::size_t automaton = 0;
        std::size_t location = 0;
        std::vector<Node> children;
    };
    Node root_;

    static Node compile(const StateFormula& f, const ta::Network& net);
    static bool eval_node(const Node& n, const std::vector<std::size_t>& locations);
};

} // namespace timechain::verify
