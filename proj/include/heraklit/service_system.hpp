#pragma once

#include <string>
#include <vector>

#include "heraklit/composition.hpp"
#include "heraklit/invariants.hpp"
#include "heraklit/net.hpp"

namespace heraklit::service_system {

// Executable fixture of a consultation service system: clients request a
// service at a help desk; admins match them with an expert and a room, or
// turn them away when every expert for the service is engaged; experts and
// rooms are scarce resources tracked by digital-twin tokens.
//
// Sorts: C clients, E experts, R rooms, A admins, S services.
// Constants: EX the experts, RO the rooms, AD the admins; f maps each
// service to the set of experts offering it.

struct ServiceSystemFixture {
    Signature signature;
    Module clients;
    Module experts;
    Module admin;
    Module rooms;
    Module composed;  // clients . admin . rooms . experts
    Structure default_structure;
    std::vector<Invariant> invariants;
};

inline Signature make_signature() {
    Signature sig;
    sig.sorts = {"C", "E", "R", "A", "S"};
    sig.constants["EX"] = Sort::powerset("E");
    sig.constants["RO"] = Sort::powerset("R");
    sig.constants["AD"] = Sort::powerset("A");
    sig.functions["f"] = {{Sort::basic("S")}, Sort::powerset("E")};
    sig.variables["c"] = Sort::basic("C");
    sig.variables["e"] = Sort::basic("E");
    sig.variables["r"] = Sort::basic("R");
    sig.variables["a"] = Sort::basic("A");
    sig.variables["s"] = Sort::basic("S");
    return sig;
}

namespace detail {

inline Term var(const char* name) { return Term::variable(name); }

inline ArcInscription one(Term t) { return {InscriptionItem::plain(std::move(t))}; }

inline Term cs() { return Term::tuple({var("c"), var("s")}); }
inline Term cr() { return Term::tuple({var("c"), var("r")}); }
inline Term er() { return Term::tuple({var("e"), var("r")}); }
inline Term acs() { return Term::tuple({var("a"), var("c"), var("s")}); }
inline Term cer() { return Term::tuple({var("c"), var("e"), var("r")}); }
inline Term f_of_s() { return Term::apply("f", {var("s")}); }

}  // namespace detail

// Client behaviour: enter with a wish (a), register at the help desk (b),
// then either leave turned-away (c) or walk to the assigned room (d) and
// leave served after the consultation (e).
inline Module make_clients(const Signature& sig) {
    using namespace detail;
    NetSchema schema;
    schema.name = "clients";
    schema.signature = sig;
    Sort C = Sort::basic("C"), S = Sort::basic("S"), R = Sort::basic("R");
    schema.places = {
        {"A", Sort::tuple({C, S})},  {"B", Sort::tuple({C, S})}, {"C", C},
        {"D", Sort::tuple({C, R})},  {"E", Sort::tuple({C, R})}, {"F", Sort::tuple({C, R})},
        {"Exited", C},
    };

    Transition a;
    a.name = "a";
    a.output_arcs["A"] = one(cs());

    Transition b;
    b.name = "b";
    b.input_arcs["A"] = one(cs());
    b.output_arcs["B"] = one(cs());

    Transition c;
    c.name = "c";
    c.input_arcs["B"] = one(cs());
    c.input_arcs["C"] = one(var("c"));
    c.output_arcs["Exited"] = one(var("c"));

    Transition d;
    d.name = "d";
    d.input_arcs["B"] = one(cs());
    d.input_arcs["D"] = one(cr());
    d.output_arcs["E"] = one(cr());

    Transition e;
    e.name = "e";
    e.input_arcs["F"] = one(cr());
    e.output_arcs["Exited"] = one(var("c"));

    schema.transitions = {a, b, c, d, e};

    Surface surface;
    surface.right = {
        {"b", GateKind::Transition, "b"},
        {"C", GateKind::Place, "C"},
        {"D", GateKind::Place, "D"},
        {"E", GateKind::Place, "E"},
        {"F", GateKind::Place, "F"},
    };
    return Module::net("clients", std::move(schema), std::move(surface));
}

// Admin bookkeeping: engage a client at the desk (b), assign an available
// expert and room (j, guarded by e in f(s)), or reject when every expert
// for the service is engaged — tested by the loop between k and T. Place R
// holds the digital twin of each unengaged expert, T of each engaged one;
// S holds a twin of each empty room, released again at g.
inline Module make_admin(const Signature& sig) {
    using namespace detail;
    NetSchema schema;
    schema.name = "admin";
    schema.signature = sig;
    Sort C = Sort::basic("C"), E = Sort::basic("E"), R = Sort::basic("R"), A = Sort::basic("A"),
         S = Sort::basic("S");
    schema.places = {
        {"P", A},
        {"Q", Sort::tuple({A, C, S})},
        {"R", E},
        {"S", R},
        {"T", E},
        {"C", C},
        {"D", Sort::tuple({C, R})},
        {"H", Sort::tuple({E, R})},
    };
    schema.initial_marking["P"] = {InscriptionItem::spread(Term::constant("AD"))};
    schema.initial_marking["R"] = {InscriptionItem::spread(Term::constant("EX"))};
    schema.initial_marking["S"] = {InscriptionItem::spread(Term::constant("RO"))};

    Transition b;
    b.name = "b";
    b.input_arcs["P"] = one(var("a"));
    b.output_arcs["Q"] = one(acs());

    Transition j;
    j.name = "j";
    j.guard = Term::membership(var("e"), f_of_s());
    j.input_arcs["Q"] = one(acs());
    j.input_arcs["R"] = one(var("e"));
    j.input_arcs["S"] = one(var("r"));
    j.output_arcs["P"] = one(var("a"));
    j.output_arcs["D"] = one(cr());
    j.output_arcs["H"] = one(er());
    j.output_arcs["T"] = one(var("e"));

    Transition k;
    k.name = "k";
    k.input_arcs["Q"] = one(acs());
    k.input_arcs["T"] = one(f_of_s());  // spreads: T holds single experts
    k.output_arcs["P"] = one(var("a"));
    k.output_arcs["C"] = one(var("c"));
    k.output_arcs["T"] = one(f_of_s());  // loop: the twins stay put

    Transition g;
    g.name = "g";
    g.input_arcs["T"] = one(var("e"));
    g.output_arcs["R"] = one(var("e"));
    g.output_arcs["S"] = one(var("r"));

    schema.transitions = {b, j, k, g};

    Surface surface;
    surface.left = {
        {"b", GateKind::Transition, "b"},
        {"C", GateKind::Place, "C"},
        {"D", GateKind::Place, "D"},
    };
    surface.right = {
        {"H", GateKind::Place, "H"},
        {"g", GateKind::Transition, "g"},
    };
    return Module::net("admin", std::move(schema), std::move(surface));
}

// Consulting rooms: client and expert meet (h), consult, and part (i).
inline Module make_rooms(const Signature& sig) {
    using namespace detail;
    NetSchema schema;
    schema.name = "rooms";
    schema.signature = sig;
    Sort C = Sort::basic("C"), E = Sort::basic("E"), R = Sort::basic("R");
    schema.places = {
        {"E", Sort::tuple({C, R})},
        {"F", Sort::tuple({C, R})},
        {"I", Sort::tuple({E, R})},
        {"J", Sort::tuple({E, R})},
        {"InConsult", Sort::tuple({C, E, R})},
    };

    Transition h;
    h.name = "h";
    h.input_arcs["E"] = one(cr());
    h.input_arcs["I"] = one(er());
    h.output_arcs["InConsult"] = one(cer());

    Transition i;
    i.name = "i";
    i.input_arcs["InConsult"] = one(cer());
    i.output_arcs["F"] = one(cr());
    i.output_arcs["J"] = one(er());

    schema.transitions = {h, i};

    Surface surface;
    surface.left = {
        {"E", GateKind::Place, "E"},
        {"F", GateKind::Place, "F"},
    };
    surface.right = {
        {"I", GateKind::Place, "I"},
        {"J", GateKind::Place, "J"},
    };
    return Module::net("rooms", std::move(schema), std::move(surface));
}

// Experts: unengaged at G, walk to the assigned room on the message at H
// (f), and return unengaged when the consultation ends (the experts' side
// of gate transition g).
inline Module make_experts(const Signature& sig) {
    using namespace detail;
    NetSchema schema;
    schema.name = "experts";
    schema.signature = sig;
    Sort E = Sort::basic("E"), R = Sort::basic("R");
    schema.places = {
        {"G", E},
        {"H", Sort::tuple({E, R})},
        {"I", Sort::tuple({E, R})},
        {"J", Sort::tuple({E, R})},
    };
    schema.initial_marking["G"] = {InscriptionItem::spread(Term::constant("EX"))};

    Transition f;
    f.name = "f";
    f.input_arcs["G"] = one(var("e"));
    f.input_arcs["H"] = one(er());
    f.output_arcs["I"] = one(er());

    Transition g;
    g.name = "g";
    g.input_arcs["J"] = one(er());
    g.output_arcs["G"] = one(var("e"));

    schema.transitions = {f, g};

    Surface surface;
    surface.left = {
        {"H", GateKind::Place, "H"},
        {"I", GateKind::Place, "I"},
        {"J", GateKind::Place, "J"},
        {"g", GateKind::Transition, "g"},
    };
    return Module::net("experts", std::move(schema), std::move(surface));
}

// Default instantiation: three clients, two experts, one room, one admin,
// two services; f(s1) = {e1}, f(s2) = {e1, e2}.
inline Structure default_instantiation() {
    Structure st;
    st.signature = make_signature();
    st.set_carrier("C", {"c1", "c2", "c3"});
    st.set_carrier("E", {"e1", "e2"});
    st.set_carrier("R", {"r1"});
    st.set_carrier("A", {"a1"});
    st.set_carrier("S", {"s1", "s2"});
    auto e_atom = [](const char* id) { return Value::atom(id, "E"); };
    st.constant_values["EX"] = Value::set({e_atom("e1"), e_atom("e2")});
    st.constant_values["RO"] = Value::set({Value::atom("r1", "R")});
    st.constant_values["AD"] = Value::set({Value::atom("a1", "A")});
    FunctionTable f;
    f.entries[{Value::atom("s1", "S")}] = Value::set({e_atom("e1")});
    f.entries[{Value::atom("s2", "S")}] = Value::set({e_atom("e1"), e_atom("e2")});
    st.function_tables["f"] = f;
    return st;
}

// The five declared invariants, phrased over the flattened net.
//
// Expert conservation counts the places where the expert itself rests
// (G, I, J, InConsult); H carries the admin's message while the expert is
// still at G, so counting it would double. Room discipline follows the
// expert-held chain H -> I -> InConsult -> J, which is the token path that
// ends where g releases the room back to S.
inline std::vector<Invariant> declared_invariants() {
    std::vector<Invariant> out;

    PlaceSumInvariant twin;
    twin.name = "twin_discipline";
    twin.quantified_constant = "EX";
    twin.terms = {{"R", std::nullopt, true}, {"T", std::nullopt, true}};
    twin.expected_count = 1;
    out.push_back(twin);

    PlaceSumInvariant conservation;
    conservation.name = "expert_conservation";
    conservation.terms = {{"G", std::nullopt, false},
                          {"I", std::nullopt, false},
                          {"J", std::nullopt, false},
                          {"InConsult", std::nullopt, false}};
    conservation.expected_size_of = "EX";
    out.push_back(conservation);

    PlaceSumInvariant room;
    room.name = "room_discipline";
    room.quantified_constant = "RO";
    room.terms = {{"S", std::nullopt, true},
                  {"H", 2, true},
                  {"I", 2, true},
                  {"InConsult", 3, true},
                  {"J", 2, true}};
    room.expected_count = 1;
    out.push_back(room);

    EnabledImplicationInvariant rejection;
    rejection.name = "rejection_soundness";
    rejection.transition = "k";
    rejection.is_disjoint = true;
    rejection.lhs.term = detail::f_of_s();
    rejection.rhs.tokens_of_place = true;
    rejection.rhs.place = "R";
    out.push_back(rejection);

    out.push_back(TypingInvariant{"typing"});
    return out;
}

// Constructs the four modules and their composition
// clients . admin . rooms . experts.
inline ServiceSystemFixture build_system() {
    Signature sig = make_signature();
    ServiceSystemFixture fixture{
        sig,
        make_clients(sig),
        make_experts(sig),
        make_admin(sig),
        make_rooms(sig),
        Module::opaque("placeholder", {}),
        default_instantiation(),
        declared_invariants(),
    };
    fixture.composed =
        compose(compose(compose(fixture.clients, fixture.admin), fixture.rooms), fixture.experts);
    return fixture;
}

}  // namespace heraklit::service_system
