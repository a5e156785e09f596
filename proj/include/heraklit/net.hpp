#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "heraklit/error.hpp"
#include "heraklit/multiset.hpp"
#include "heraklit/report.hpp"
#include "heraklit/structure.hpp"

namespace heraklit {

struct Place {
    std::string name;
    Sort token_sort;

    friend bool operator==(const Place& a, const Place& b) {
        return a.name == b.name && a.token_sort == b.token_sort;
    }
};

// One item of an arc or initial-marking inscription. A Term item yields one
// token; a Spread item (written elm(.)) yields one token per element of the
// evaluated set. On arcs, a set-sorted term flowing into a basic-sorted
// place spreads implicitly; initial markings require explicit elm.
struct InscriptionItem {
    enum class Mode { Term, Spread };
    Mode mode = Mode::Term;
    Term term = Term::truth();

    static InscriptionItem plain(Term t) { return {Mode::Term, std::move(t)}; }
    static InscriptionItem spread(Term t) { return {Mode::Spread, std::move(t)}; }

    std::string str() const {
        return mode == Mode::Spread ? "elm(" + term.str() + ")" : term.str();
    }

    friend bool operator==(const InscriptionItem& a, const InscriptionItem& b) {
        return a.mode == b.mode && a.term == b.term;
    }
};

using ArcInscription = std::vector<InscriptionItem>;

inline std::string inscription_str(const ArcInscription& arc) {
    std::string out;
    for (std::size_t i = 0; i < arc.size(); ++i) {
        if (i) out += ", ";
        out += arc[i].str();
    }
    return out;
}

struct Transition {
    std::string name;
    Term guard = Term::truth();
    std::map<std::string, ArcInscription> input_arcs;   // place name -> inscription
    std::map<std::string, ArcInscription> output_arcs;

    std::set<std::string> free_variables() const {
        std::set<std::string> vars = guard.free_variables();
        for (const auto& [place, arc] : input_arcs)
            for (const auto& item : arc) item.term.collect_variables(vars);
        for (const auto& [place, arc] : output_arcs)
            for (const auto& item : arc) item.term.collect_variables(vars);
        return vars;
    }

    bool spontaneous() const { return input_arcs.empty(); }

    friend bool operator==(const Transition& a, const Transition& b) {
        return a.name == b.name && a.guard == b.guard && a.input_arcs == b.input_arcs &&
               a.output_arcs == b.output_arcs;
    }
};

// A high-level Petri net schema: places and transitions inscribed with
// terms over a signature, plus variable-free initial-marking expressions.
struct NetSchema {
    std::string name;
    Signature signature;
    std::vector<Place> places;
    std::vector<Transition> transitions;
    std::map<std::string, ArcInscription> initial_marking;  // place name -> items

    const Place* find_place(const std::string& name) const {
        for (const auto& p : places)
            if (p.name == name) return &p;
        return nullptr;
    }

    const Transition* find_transition(const std::string& name) const {
        for (const auto& t : transitions)
            if (t.name == name) return &t;
        return nullptr;
    }

    friend bool operator==(const NetSchema& a, const NetSchema& b) {
        return a.name == b.name && a.signature == b.signature && a.places == b.places &&
               a.transitions == b.transitions && a.initial_marking == b.initial_marking;
    }
};

struct Marking {
    std::map<std::string, Multiset<Value>> places;

    const Multiset<Value>& at(const std::string& place) const {
        static const Multiset<Value> empty;
        auto it = places.find(place);
        return it == places.end() ? empty : it->second;
    }

    void add(const std::string& place, const Multiset<Value>& tokens) {
        if (tokens.empty()) return;
        places[place].add(tokens);
    }

    void subtract(const std::string& place, const Multiset<Value>& tokens) {
        if (tokens.empty()) return;
        auto it = places.find(place);
        it->second.subtract(tokens);
        if (it->second.empty()) places.erase(it);
    }

    // Empty entries are dropped on mutation, so map equality is marking
    // equality once normalized.
    Marking normalized() const {
        Marking out;
        for (const auto& [place, tokens] : places)
            if (!tokens.empty()) out.places.emplace(place, tokens);
        return out;
    }

    friend bool operator==(const Marking& a, const Marking& b) {
        return a.normalized().places == b.normalized().places;
    }
    friend bool operator!=(const Marking& a, const Marking& b) { return !(a == b); }
    friend bool operator<(const Marking& a, const Marking& b) {
        return a.normalized().places < b.normalized().places;
    }
};

namespace detail {

// Static sort of an inscription item against its place. Handles the
// implicit-spread reading of set-sorted terms on basic-sorted places.
inline std::optional<std::string> check_item_sort(const Signature& sig, const InscriptionItem& item,
                                                  const Sort& place_sort, bool allow_implicit_spread) {
    auto sort = sig.sort_of(item.term);
    if (!sort) return sort.error();
    if (item.mode == InscriptionItem::Mode::Spread) {
        if (!sort->is_powerset())
            return "elm applies to set-sorted terms, got " + sort->str();
        if (!place_sort.is_basic() || place_sort.name() != sort->name())
            return "elm(" + item.term.str() + ") spreads tokens of sort " + sort->name() +
                   " into a place of sort " + place_sort.str();
        return std::nullopt;
    }
    if (*sort == place_sort) return std::nullopt;
    if (allow_implicit_spread && sort->is_powerset() && place_sort.is_basic() &&
        sort->name() == place_sort.name())
        return std::nullopt;
    return "term " + item.term.str() + " has sort " + sort->str() + ", place holds " + place_sort.str();
}

}  // namespace detail

// Sorting invariants of a schema: declared sorts, unique names, arcs to
// known places, boolean guards with declared variables, inscription items
// matching their place's token sort, variable-free initial marking.
inline ValidationReport check_well_formed(const NetSchema& schema) {
    ValidationReport report = schema.signature.validate();

    std::set<std::string> place_names;
    for (const auto& p : schema.places) {
        if (!place_names.insert(p.name).second)
            report.add(p.name, "duplicate place name");
        if (!schema.signature.sort_valid(p.token_sort))
            report.add(p.name, "place sort " + p.token_sort.str() + " references undeclared sorts");
        if (p.token_sort.is_boolean())
            report.add(p.name, "places do not hold boolean tokens");
    }

    std::set<std::string> transition_names;
    for (const auto& t : schema.transitions) {
        if (!transition_names.insert(t.name).second)
            report.add(t.name, "duplicate transition name");

        for (const auto& var : t.free_variables())
            if (schema.signature.variables.find(var) == schema.signature.variables.end())
                report.add(t.name, "unknown variable " + var);

        auto guard_sort = schema.signature.sort_of(t.guard);
        if (!guard_sort)
            report.add(t.name, "guard: " + guard_sort.error());
        else if (!guard_sort->is_boolean())
            report.add(t.name, "guard " + t.guard.str() + " is not boolean");

        auto check_arcs = [&](const std::map<std::string, ArcInscription>& arcs, const char* dir) {
            for (const auto& [place_name, arc] : arcs) {
                const Place* place = schema.find_place(place_name);
                if (!place) {
                    report.add(t.name, std::string(dir) + " arc to unknown place " + place_name);
                    continue;
                }
                for (const auto& item : arc) {
                    // Skip items whose variables are undeclared; already reported.
                    bool vars_ok = true;
                    for (const auto& var : item.term.free_variables())
                        if (schema.signature.variables.find(var) == schema.signature.variables.end())
                            vars_ok = false;
                    if (!vars_ok) continue;
                    auto err = detail::check_item_sort(schema.signature, item, place->token_sort, true);
                    if (err)
                        report.add(t.name, std::string(dir) + " arc to " + place_name + ": " + *err);
                }
            }
        };
        check_arcs(t.input_arcs, "input");
        check_arcs(t.output_arcs, "output");
    }

    for (const auto& [place_name, items] : schema.initial_marking) {
        const Place* place = schema.find_place(place_name);
        if (!place) {
            report.add(place_name, "initial marking for unknown place");
            continue;
        }
        for (const auto& item : items) {
            if (!item.term.free_variables().empty()) {
                report.add(place_name, "initial marking item " + item.str() + " is not variable-free");
                continue;
            }
            auto err = detail::check_item_sort(schema.signature, item, place->token_sort, false);
            if (err) report.add(place_name, "initial marking: " + *err);
        }
    }
    return report;
}

// A schema together with a validated instantiation and the concrete
// initial marking it induces.
struct Net {
    NetSchema schema;
    Structure structure;
    Marking initial_marking;
};

namespace detail {

// Evaluate one arc inscription to the token multiset it moves. Spread items
// and set-valued terms over basic-sorted places contribute element-wise.
inline Multiset<Value> eval_inscription(const ArcInscription& arc, const Sort& place_sort,
                                        const Structure& st, const Binding& binding) {
    Multiset<Value> tokens;
    for (const auto& item : arc) {
        Value v = eval_term(item.term, st, binding);
        bool spread = item.mode == InscriptionItem::Mode::Spread ||
                      (v.is_set() && place_sort.is_basic());
        if (spread) {
            if (!v.is_set())
                throw EvalError("elm(" + item.term.str() + ") evaluated to non-set " + v.str());
            for (const auto& e : v.elements()) tokens.add(e);
        } else {
            tokens.add(v);
        }
    }
    return tokens;
}

}  // namespace detail

// Instantiates a schema: validates the structure and the schema, then
// evaluates each initial-marking item.
inline Net instantiate(const NetSchema& schema, const Structure& st) {
    ValidationReport wf = check_well_formed(schema);
    if (!wf.ok()) throw ModelError("schema " + schema.name + " ill-formed:\n" + wf.str());
    ValidationReport sv = validate_structure(schema.signature, st);
    if (!sv.ok()) throw ModelError("structure invalid:\n" + sv.str());

    Net net{schema, st, {}};
    for (const auto& [place_name, items] : schema.initial_marking) {
        const Place* place = schema.find_place(place_name);
        Multiset<Value> tokens = detail::eval_inscription(items, place->token_sort, st, {});
        net.initial_marking.add(place_name, tokens);
    }
    return net;
}

inline bool marking_well_typed(const Net& net, const Marking& m) {
    for (const auto& [place_name, tokens] : m.places) {
        const Place* place = net.schema.find_place(place_name);
        if (!place) return false;
        for (const auto& [token, n] : tokens.counts())
            if (!net.structure.inhabits(token, place->token_sort)) return false;
    }
    return true;
}

namespace detail {

struct ArcCheck {
    const std::string* place;
    const ArcInscription* arc;
    const Sort* sort;
    std::size_t ready_at;  // index into the variable order after which all vars are bound
};

}  // namespace detail

// All bindings of the variables occurring in `t` that enable it at `m`:
// guard true and every input inscription contained in the marking.
// Enumeration is a backtracking search in lexicographic (variable, value)
// order, pruning on guard conjuncts and input arcs as soon as their
// variables are bound; results are lexicographically ordered.
inline std::vector<Binding> enabled_bindings(const Net& net, const Marking& m, const Transition& t) {
    const Structure& st = net.structure;

    std::vector<std::string> vars;
    for (const auto& v : t.free_variables()) vars.push_back(v);
    std::sort(vars.begin(), vars.end());

    std::vector<std::vector<Value>> pools;
    for (const auto& v : vars) {
        auto it = st.signature.variables.find(v);
        if (it == st.signature.variables.end())
            throw EvalError("transition " + t.name + " uses undeclared variable " + v);
        pools.push_back(st.enumerate(it->second));
    }

    auto bound_at = [&](const std::set<std::string>& needed) {
        std::size_t depth = 0;
        for (std::size_t i = 0; i < vars.size(); ++i)
            if (needed.count(vars[i])) depth = i + 1;
        return depth;
    };

    // Guard conjuncts become checkable as soon as their variables are bound.
    std::vector<std::pair<const Term*, std::size_t>> conjuncts;
    std::vector<Term> guard_parts;
    if (t.guard.kind() == Term::Kind::Conjunction)
        guard_parts = t.guard.args();
    else
        guard_parts.push_back(t.guard);
    for (const auto& g : guard_parts) conjuncts.push_back({&g, 0});
    for (auto& [term, depth] : conjuncts) depth = bound_at(term->free_variables());

    std::vector<detail::ArcCheck> arcs;
    for (const auto& [place_name, arc] : t.input_arcs) {
        const Place* place = net.schema.find_place(place_name);
        if (!place) throw EvalError("transition " + t.name + " reads unknown place " + place_name);
        std::set<std::string> needed;
        for (const auto& item : arc) item.term.collect_variables(needed);
        arcs.push_back({&place_name, &arc, &place->token_sort, bound_at(needed)});
    }

    std::vector<Binding> out;
    Binding binding;

    auto checks_pass = [&](std::size_t depth) {
        for (const auto& [term, at] : conjuncts)
            if (at == depth && !eval_guard(*term, st, binding)) return false;
        for (const auto& arc : arcs) {
            if (arc.ready_at != depth) continue;
            Multiset<Value> need = detail::eval_inscription(*arc.arc, *arc.sort, st, binding);
            if (!m.at(*arc.place).contains(need)) return false;
        }
        return true;
    };

    std::function<void(std::size_t)> descend = [&](std::size_t depth) {
        if (depth == vars.size()) {
            out.push_back(binding);
            return;
        }
        for (const auto& candidate : pools[depth]) {
            binding[vars[depth]] = candidate;
            if (checks_pass(depth + 1)) descend(depth + 1);
        }
        binding.erase(vars[depth]);
    };

    if (checks_pass(0)) descend(0);
    return out;
}

// True iff `b` enables `t` at `m`; cheaper than materializing the full
// binding set.
inline bool binding_enabled(const Net& net, const Marking& m, const Transition& t, const Binding& b) {
    const Structure& st = net.structure;
    for (const auto& var : t.free_variables()) {
        auto sort = st.signature.variables.find(var);
        if (sort == st.signature.variables.end()) return false;
        auto it = b.find(var);
        if (it == b.end() || !st.inhabits(it->second, sort->second)) return false;
    }
    if (!eval_guard(t.guard, st, b)) return false;
    for (const auto& [place_name, arc] : t.input_arcs) {
        const Place* place = net.schema.find_place(place_name);
        if (!place) return false;
        Multiset<Value> need = detail::eval_inscription(arc, place->token_sort, st, b);
        if (!m.at(place_name).contains(need)) return false;
    }
    return true;
}

// The token game: subtract evaluated inputs, add evaluated outputs.
// Firing a non-enabled binding is a hard error.
inline Marking fire(const Net& net, const Marking& m, const Transition& t, const Binding& b) {
    if (!binding_enabled(net, m, t, b))
        throw FiringError("transition " + t.name + " is not enabled under " + binding_str(b));
    Marking out = m;
    for (const auto& [place_name, arc] : t.input_arcs) {
        const Place* place = net.schema.find_place(place_name);
        out.subtract(place_name, detail::eval_inscription(arc, place->token_sort, net.structure, b));
    }
    for (const auto& [place_name, arc] : t.output_arcs) {
        const Place* place = net.schema.find_place(place_name);
        if (!place) throw FiringError("transition " + t.name + " writes unknown place " + place_name);
        Multiset<Value> produced = detail::eval_inscription(arc, place->token_sort, net.structure, b);
        for (const auto& [token, n] : produced.counts())
            if (!net.structure.inhabits(token, place->token_sort))
                throw FiringError("transition " + t.name + " produced ill-typed token " + token.str() +
                                  " for place " + place_name);
        out.add(place_name, produced);
    }
    return out;
}

}  // namespace heraklit
