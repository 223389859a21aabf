#include "timechain/formula.hpp"

#include <cctype>

#include "timechain/errors.hpp"

namespace timechain::verify {

StateFormula StateFormula::atom(std::string automaton, std::string location) {
    StateFormula f;
    f.kind_ = Kind::Atom;
    f.automaton_ = std::move(automaton);
    f.location_ = std::move(location);
    return f;
}

StateFormula StateFormula::conjunction(std::vector<StateFormula> children) {
    if (children.size() == 1) return std::move(children.front());
    StateFormula f;
    f.kind_ = Kind::And;
    f.children_ = std::move(children);
    return f;
}

StateFormula StateFormula::disjunction(std::vector<StateFormula> children) {
    if (children.size() == 1) return std::move(children.front());
    StateFormula f;
    f.kind_ = Kind::Or;
    f.children_ = std::move(children);
    return f;
}

namespace {

struct Parser {
    std::string_view text;
    std::size_t pos = 0;

    [[noreturn]] void fail(const std::string& message) const {
        throw ParseError(1, static_cast<int>(pos) + 1, message);
    }

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool eat(std::string_view token) {
        skip_ws();
        if (text.substr(pos, token.size()) == token) {
            pos += token.size();
            return true;
        }
        return false;
    }

    std::string identifier() {
        skip_ws();
        const std::size_t start = pos;
        while (pos < text.size()) {
            const char c = text[pos];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') ++pos;
            else break;
        }
        if (pos == start) fail("expected identifier");
        return std::string(text.substr(start, pos - start));
    }

    StateFormula parse_or() {
        std::vector<StateFormula> terms{parse_and()};
        while (eat("||")) terms.push_back(parse_and());
        return StateFormula::disjunction(std::move(terms));
    }

    StateFormula parse_and() {
        std::vector<StateFormula> terms{parse_primary()};
        while (eat("&&")) terms.push_back(parse_primary());
        return StateFormula::conjunction(std::move(terms));
    }

    StateFormula parse_primary() {
        if (eat("(")) {
            StateFormula f = parse_or();
            if (!eat(")")) fail("expected ')'");
            return f;
        }
        std::string automaton = identifier();
        if (!eat(".")) fail("expected '.' after automaton name");
        // Location ids produced by composition may carry "prefix." segments.
        std::string location = identifier();
        while (eat(".")) location += "." + identifier();
        return StateFormula::atom(std::move(automaton), std::move(location));
    }
};

} // namespace

StateFormula StateFormula::parse(std::string_view text) {
    Parser p{text};
    StateFormula f = p.parse_or();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("trailing input after formula");
    return f;
}

std::string StateFormula::to_string() const {
    switch (kind_) {
        case Kind::Atom:
            return automaton_ + "." + location_;
        case Kind::And:
        case Kind::Or: {
            std::string sep = kind_ == Kind::And ? " && " : " || ";
            std::string out;
            for (std::size_t i = 0; i < children_.size(); ++i) {
                if (i) out += sep;
                const bool paren = children_[i].kind_ != Kind::Atom;
                if (paren) out += "(";
                out += children_[i].to_string();
                if (paren) out += ")";
            }
            return out;
        }
    }
    return {};
}

bool StateFormula::operator==(const StateFormula& other) const {
    if (kind_ != other.kind_) return false;
    if (kind_ == Kind::Atom) {
        return automaton_ == other.automaton_ && location_ == other.location_;
    }
    return children_ == other.children_;
}

bool evaluate(const StateFormula& f, const ta::Network& net,
              const std::vector<std::size_t>& locations) {
    return CompiledFormula(f, net).eval(locations);
}

CompiledFormula::CompiledFormula(const StateFormula& f, const ta::Network& net)
    : root_(compile(f, net)) {}

CompiledFormula::Node CompiledFormula::compile(const StateFormula& f, const ta::Network& net) {
    Node n;
    n.kind = f.kind();
    if (f.kind() == StateFormula::Kind::Atom) {
        n.automaton = net.automaton_index(f.automaton());
        n.location = net.automata[n.automaton].location_index(f.location());
        return n;
    }
    for (const auto& child : f.children()) n.children.push_back(compile(child, net));
    return n;
}

bool CompiledFormula::eval_node(const Node& n, const std::vector<std::size_t>& locations) {
    switch (n.kind) {
        case StateFormula::Kind::Atom:
            return locations[n.automaton] == n.location;
        case StateFormula::Kind::And:
            for (const auto& c : n.children) {
                if (!eval_node(c, locations)) return false;
            }
            return true;
        case StateFormula::Kind::Or:
            for (const auto& c : n.children) {
                if (eval_node(c, locations)) return true;
            }
            return false;
    }
    return false;
}

bool CompiledFormula::eval(const std::vector<std::size_t>& locations) const {
    return eval_node(root_, locations);
}

} // namespace timechain::verify
