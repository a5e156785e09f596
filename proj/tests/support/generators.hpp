#pragma once

// Seeded random generators for the property suites: small one-sorted
// structures, random net schemas, random surfaces over a shared label
// alphabet, and the adapter construction helper.

#include <random>
#include <string>
#include <vector>

#include "heraklit/composition.hpp"
#include "heraklit/net.hpp"

namespace generators {

using namespace heraklit;

struct Rng {
    std::mt19937_64 engine;
    explicit Rng(std::uint64_t seed) : engine(seed) {}

    std::size_t below(std::size_t n) { return n == 0 ? 0 : engine() % n; }
    bool chance(double p) { return static_cast<double>(engine() % 1000) < p * 1000.0; }
};

// One basic sort X with a small carrier, one set constant K, one unary
// function g : X -> set(X), variables x and y.
inline Signature small_signature() {
    Signature sig;
    sig.sorts = {"X"};
    sig.constants["K"] = Sort::powerset("X");
    sig.functions["g"] = {{Sort::basic("X")}, Sort::powerset("X")};
    sig.variables["x"] = Sort::basic("X");
    sig.variables["y"] = Sort::basic("X");
    return sig;
}

inline Structure small_structure(Rng& rng, std::size_t carrier_size) {
    Structure st;
    st.signature = small_signature();
    std::vector<std::string> atoms;
    for (std::size_t i = 0; i < carrier_size; ++i) atoms.push_back("x" + std::to_string(i + 1));
    st.set_carrier("X", atoms);

    auto random_subset = [&]() {
        std::vector<Value> elems;
        for (const auto& atom : st.carrier("X"))
            if (rng.chance(0.5)) elems.push_back(atom);
        return Value::set(std::move(elems));
    };
    st.constant_values["K"] = random_subset();
    FunctionTable table;
    for (const auto& atom : st.carrier("X")) table.entries[{atom}] = random_subset();
    st.function_tables["g"] = table;
    return st;
}

// Random guard over x, y, K and g: a conjunction of zero to two literals.
inline Term random_guard(Rng& rng) {
    auto literal = [&]() -> Term {
        switch (rng.below(4)) {
            case 0: return Term::membership(Term::variable("x"), Term::constant("K"));
            case 1: return Term::membership(Term::variable("y"), Term::apply("g", {Term::variable("x")}));
            case 2: return Term::equality(Term::variable("x"), Term::variable("y"));
            default:
                return Term::subset_of(Term::apply("g", {Term::variable("x")}), Term::constant("K"));
        }
    };
    switch (rng.below(3)) {
        case 0: return Term::truth();
        case 1: return literal();
        default: return Term::conjunction({literal(), literal()});
    }
}

inline InscriptionItem random_item(Rng& rng, const Sort& place_sort) {
    if (place_sort.is_tuple())
        return InscriptionItem::plain(Term::tuple({Term::variable("x"), Term::variable("y")}));
    switch (rng.below(5)) {
        case 0: return InscriptionItem::plain(Term::variable("y"));
        case 1: return InscriptionItem::plain(Term::apply("g", {Term::variable("x")}));  // implicit spread
        case 2: return InscriptionItem::spread(Term::constant("K"));
        default: return InscriptionItem::plain(Term::variable("x"));
    }
}

// A small schema over small_signature: every place of sort X or (X, X),
// every transition wired to a few random places.
inline NetSchema random_schema(Rng& rng, const std::string& name, std::size_t max_places,
                               std::size_t max_transitions) {
    NetSchema schema;
    schema.name = name;
    schema.signature = small_signature();
    std::size_t places = 1 + rng.below(max_places);
    for (std::size_t i = 0; i < places; ++i) {
        Sort sort = rng.chance(0.3) ? Sort::tuple({Sort::basic("X"), Sort::basic("X")})
                                    : Sort::basic("X");
        schema.places.push_back({name + "p" + std::to_string(i), sort});
    }
    std::size_t transitions = 1 + rng.below(max_transitions);
    for (std::size_t i = 0; i < transitions; ++i) {
        Transition t;
        t.name = name + "t" + std::to_string(i);
        t.guard = random_guard(rng);
        std::size_t inputs = rng.below(3);
        for (std::size_t k = 0; k < inputs; ++k) {
            const Place& p = schema.places[rng.below(schema.places.size())];
            t.input_arcs[p.name].push_back(random_item(rng, p.token_sort));
        }
        std::size_t outputs = rng.below(3);
        for (std::size_t k = 0; k < outputs; ++k) {
            const Place& p = schema.places[rng.below(schema.places.size())];
            t.output_arcs[p.name].push_back(random_item(rng, p.token_sort));
        }
        schema.transitions.push_back(std::move(t));
    }
    for (const auto& p : schema.places)
        if (rng.chance(0.4)) {
            if (p.token_sort.is_basic())
                schema.initial_marking[p.name] = {InscriptionItem::spread(Term::constant("K"))};
        }
    return schema;
}

inline Marking random_marking(Rng& rng, const NetSchema& schema, const Structure& st) {
    Marking m;
    for (const auto& p : schema.places) {
        std::size_t tokens = rng.below(4);
        auto pool = st.enumerate(p.token_sort);
        if (pool.empty()) continue;
        for (std::size_t i = 0; i < tokens; ++i) m.places[p.name].add(pool[rng.below(pool.size())]);
    }
    return m.normalized();
}

// Gate kinds are fixed per label across a whole generation run, so that
// kind mismatches never abort the associativity suite.
struct LabelAlphabet {
    std::vector<std::string> labels;
    std::vector<GateKind> kinds;

    static LabelAlphabet make(Rng& rng, std::size_t size) {
        LabelAlphabet a;
        for (std::size_t i = 0; i < size; ++i) {
            a.labels.push_back("L" + std::to_string(i));
            a.kinds.push_back(rng.chance(0.5) ? GateKind::Place : GateKind::Transition);
        }
        return a;
    }
};

// A random net module: random schema plus random surfaces of up to
// max_gates per side, each gate bound to a random element of its kind.
// Returns nothing when the schema lacks an element of a drawn kind.
inline Module random_module(Rng& rng, const std::string& name, const LabelAlphabet& alphabet,
                            std::size_t max_gates, std::size_t max_places,
                            std::size_t max_transitions) {
    NetSchema schema = random_schema(rng, name, max_places, max_transitions);
    std::vector<std::string> basic_places;
    for (const auto& p : schema.places)
        if (p.token_sort.is_basic()) basic_places.push_back(p.name);

    Surface surface;
    auto fill_side = [&](std::vector<Gate>& side) {
        std::size_t gates = rng.below(max_gates + 1);
        std::vector<std::size_t> order;
        for (std::size_t i = 0; i < alphabet.labels.size(); ++i) order.push_back(i);
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
        for (std::size_t g = 0; g < gates && g < order.size(); ++g) {
            std::size_t pick = order[g];
            Gate gate;
            gate.label = alphabet.labels[pick];
            gate.kind = alphabet.kinds[pick];
            if (gate.kind == GateKind::Place) {
                // All gated places share sort X so fused sorts agree.
                if (basic_places.empty()) continue;
                gate.bound_element = basic_places[rng.below(basic_places.size())];
            } else {
                gate.bound_element = schema.transitions[rng.below(schema.transitions.size())].name;
            }
            side.push_back(std::move(gate));
        }
    };
    fill_side(surface.left);
    fill_side(surface.right);
    return Module::net(name, std::move(schema), std::move(surface));
}

// Adapter between r and s: for each (right label of r, left label of s)
// pair, one pass-through element carrying both labels. Place gates reuse
// the token sort of r's gate.
inline Module make_adapter(const std::string& name, const Module& r, const Module& s,
                           const std::vector<std::pair<std::string, std::string>>& pairs) {
    NetSchema schema;
    schema.name = name;
    Surface surface;
    ResolvedModule rr = resolve(r);

    std::size_t i = 0;
    for (const auto& [left_label, right_label] : pairs) {
        const ResolvedGate* from = nullptr;
        for (const auto& g : rr.right)
            if (g.label == left_label) from = &g;
        if (!from) throw CompositionError("adapter: " + left_label + " is not on r's right interface");

        std::string element = "adapt" + std::to_string(i++);
        if (from->kind == GateKind::Place) {
            Sort sort = from->token_sort ? *from->token_sort : Sort::basic("X");
            schema.signature.sorts.insert(sort.is_basic() ? sort.name() : "X");
            if (sort.is_tuple())
                for (const auto& c : sort.components())
                    if (c.is_basic()) schema.signature.sorts.insert(c.name());
            schema.places.push_back({element, sort});
        } else {
            schema.transitions.push_back({element, Term::truth(), {}, {}});
        }
        surface.left.push_back({left_label, from->kind, element});
        surface.right.push_back({right_label, from->kind, element});
    }
    return Module::net(name, std::move(schema), std::move(surface));
}

}  // namespace generators
