#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "heraklit/net.hpp"

namespace heraklit {

// Declarable marking invariants, evaluated at every explored marking.
//
// Three shapes cover the desk-scale conservation arguments:
//   - place sums: linear counts of tokens (optionally matching an atom at a
//     tuple component) compared against a constant or a carrier-set size;
//   - enabledness implications: a condition that must hold for every
//     enabled binding of one transition, over terms extended with the
//     token set of a place;
//   - typing: every token inhabits its place's sort.

struct CountTerm {
    std::string place;
    std::optional<std::size_t> component;  // 1-based tuple component to match
    bool match_atom = false;               // false: count all tokens

    std::string str() const {
        std::string out = "count(" + place;
        if (component) out += "." + std::to_string(*component);
        if (match_atom) out += ", x";
        return out + ")";
    }

    friend bool operator==(const CountTerm& a, const CountTerm& b) {
        return a.place == b.place && a.component == b.component && a.match_atom == b.match_atom;
    }
};

struct PlaceSumInvariant {
    std::string name;
    std::optional<std::string> quantified_constant;  // forall x in <set constant>
    std::vector<CountTerm> terms;
    std::optional<std::size_t> expected_count;  // rhs literal
    std::optional<std::string> expected_size_of;  // rhs size(<set constant>)

    friend bool operator==(const PlaceSumInvariant& a, const PlaceSumInvariant& b) {
        return a.name == b.name && a.quantified_constant == b.quantified_constant &&
               a.terms == b.terms && a.expected_count == b.expected_count &&
               a.expected_size_of == b.expected_size_of;
    }
};

// When <transition> is enabled with binding b: condition(b, marking) holds.
// The condition is either disjointness of two set expressions or a plain
// boolean term; each set expression is a term or the token set of a place.
struct EnabledImplicationInvariant {
    struct SetExpr {
        bool tokens_of_place = false;
        std::string place;        // when tokens_of_place
        Term term = Term::truth();  // otherwise

        std::string str() const { return tokens_of_place ? "tokens(" + place + ")" : term.str(); }

        friend bool operator==(const SetExpr& a, const SetExpr& b) {
            return a.tokens_of_place == b.tokens_of_place && a.place == b.place && a.term == b.term;
        }
    };

    std::string name;
    std::string transition;
    bool is_disjoint = false;  // disjoint(lhs, rhs) vs a boolean guard term
    SetExpr lhs, rhs;
    Term guard_term = Term::truth();

    friend bool operator==(const EnabledImplicationInvariant& a, const EnabledImplicationInvariant& b) {
        return a.name == b.name && a.transition == b.transition && a.is_disjoint == b.is_disjoint &&
               a.lhs == b.lhs && a.rhs == b.rhs && a.guard_term == b.guard_term;
    }
};

struct TypingInvariant {
    std::string name;

    friend bool operator==(const TypingInvariant& a, const TypingInvariant& b) {
        return a.name == b.name;
    }
};

using Invariant = std::variant<PlaceSumInvariant, EnabledImplicationInvariant, TypingInvariant>;

inline const std::string& invariant_name(const Invariant& inv) {
    return std::visit([](const auto& i) -> const std::string& { return i.name; }, inv);
}

namespace detail {

inline std::size_t count_tokens(const Marking& m, const CountTerm& term, const Value* atom) {
    const Multiset<Value>& tokens = m.at(term.place);
    if (!term.match_atom) return tokens.size();
    std::size_t total = 0;
    for (const auto& [token, n] : tokens.counts()) {
        if (term.component) {
            if (!token.is_tuple()) continue;
            const auto& cs = token.components();
            if (*term.component == 0 || *term.component > cs.size()) continue;
            if (cs[*term.component - 1] == *atom) total += n;
        } else if (token == *atom) {
            total += n;
        }
    }
    return total;
}

inline Value eval_set_expr(const EnabledImplicationInvariant::SetExpr& e, const Net& net,
                           const Marking& m, const Binding& binding) {
    if (!e.tokens_of_place) return eval_term(e.term, net.structure, binding);
    std::vector<Value> elems;
    for (const auto& [token, n] : m.at(e.place).counts()) elems.push_back(token);
    return Value::set(std::move(elems));
}

}  // namespace detail

// Evaluates one invariant at one marking; returns a violation description
// or nothing.
inline std::optional<std::string> check_invariant(const Invariant& inv, const Net& net,
                                                  const Marking& m) {
    if (const auto* sum = std::get_if<PlaceSumInvariant>(&inv)) {
        std::vector<const Value*> atoms;
        std::vector<Value> pool;
        if (sum->quantified_constant) {
            auto it = net.structure.constant_values.find(*sum->quantified_constant);
            if (it == net.structure.constant_values.end() || !it->second.is_set())
                return "quantifier constant " + *sum->quantified_constant + " is not a set";
            pool = it->second.elements();
            for (const auto& v : pool) atoms.push_back(&v);
        } else {
            atoms.push_back(nullptr);
        }
        std::size_t expected = 0;
        if (sum->expected_count) {
            expected = *sum->expected_count;
        } else {
            auto it = net.structure.constant_values.find(*sum->expected_size_of);
            if (it == net.structure.constant_values.end() || !it->second.is_set())
                return "size constant " + *sum->expected_size_of + " is not a set";
            expected = it->second.elements().size();
        }
        for (const Value* atom : atoms) {
            std::size_t total = 0;
            for (const auto& term : sum->terms) total += detail::count_tokens(m, term, atom);
            if (total != expected)
                return (atom ? "at " + atom->str() + ": " : std::string()) + "sum is " +
                       std::to_string(total) + ", expected " + std::to_string(expected);
        }
        return std::nullopt;
    }
    if (const auto* imp = std::get_if<EnabledImplicationInvariant>(&inv)) {
        const Transition* t = net.schema.find_transition(imp->transition);
        if (!t) return "unknown transition " + imp->transition;
        for (const auto& binding : enabled_bindings(net, m, *t)) {
            if (imp->is_disjoint) {
                Value lhs = detail::eval_set_expr(imp->lhs, net, m, binding);
                Value rhs = detail::eval_set_expr(imp->rhs, net, m, binding);
                if (!lhs.is_set() || !rhs.is_set())
                    return "disjoint() applied to non-sets";
                for (const auto& e : lhs.elements())
                    if (rhs.set_contains(e))
                        return "enabled binding " + binding_str(binding) + ": " + imp->lhs.str() +
                               " and " + imp->rhs.str() + " share " + e.str();
            } else if (!eval_guard(imp->guard_term, net.structure, binding)) {
                return "enabled binding " + binding_str(binding) + " violates " + imp->guard_term.str();
            }
        }
        return std::nullopt;
    }
    const auto& typing = std::get<TypingInvariant>(inv);
    (void)typing;
    if (!marking_well_typed(net, m)) return "marking holds an ill-typed token";
    return std::nullopt;
}

}  // namespace heraklit
