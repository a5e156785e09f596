#include <gtest/gtest.h>

#include "heraklit/composition.hpp"
#include "heraklit/net.hpp"
#include "heraklit/service_system.hpp"
#include "support/oracles.hpp"

using namespace heraklit;
namespace ss = heraklit::service_system;

namespace {

Value atom(const char* id, const char* sort) { return Value::atom(id, sort); }

Value acs(const char* a, const char* c, const char* s) {
    return Value::tuple({atom(a, "A"), atom(c, "C"), atom(s, "S")});
}

Net admin_net() {
    auto fixture = ss::build_system();
    return instantiate(fixture.admin.net_inner(), fixture.default_structure);
}

Net clients_net() {
    auto fixture = ss::build_system();
    return instantiate(fixture.clients.net_inner(), fixture.default_structure);
}

TEST(well_formed, flattened_service_system_is_ok) {
    auto fixture = ss::build_system();
    NetSchema flat = flatten(fixture.composed);
    ValidationReport report = check_well_formed(flat);
    EXPECT_TRUE(report.ok()) << report.str();
}

TEST(well_formed, tuple_into_basic_place_is_a_sort_violation) {
    NetSchema schema;
    schema.name = "bad";
    schema.signature = ss::make_signature();
    schema.places = {{"P", Sort::basic("E")}};
    Transition t;
    t.name = "t";
    t.output_arcs["P"] = {
        InscriptionItem::plain(Term::tuple({Term::variable("c"), Term::variable("s")}))};
    schema.transitions = {t};
    ValidationReport report = check_well_formed(schema);
    ASSERT_FALSE(report.ok());
    EXPECT_NE(report.str().find("sort"), std::string::npos);
}

TEST(well_formed, unknown_guard_variable_is_reported) {
    NetSchema schema;
    schema.name = "bad";
    schema.signature = ss::make_signature();
    schema.places = {{"P", Sort::basic("E")}};
    Transition t;
    t.name = "t";
    t.guard = Term::equality(Term::variable("q"), Term::variable("q"));
    t.input_arcs["P"] = {InscriptionItem::plain(Term::variable("e"))};
    schema.transitions = {t};
    ValidationReport report = check_well_formed(schema);
    ASSERT_FALSE(report.ok());
    EXPECT_NE(report.str().find("unknown variable q"), std::string::npos);
}

TEST(instantiate, spread_yields_one_token_per_element) {
    Net net = admin_net();
    // R = elm(EX) with EX = {e1, e2}
    EXPECT_EQ(net.initial_marking.at("R").size(), 2u);
    EXPECT_EQ(net.initial_marking.at("R").count(atom("e1", "E")), 1u);
    EXPECT_EQ(net.initial_marking.at("R").count(atom("e2", "E")), 1u);
    EXPECT_EQ(net.initial_marking.at("P").expand(), std::vector<Value>{atom("a1", "A")});
}

TEST(instantiate, plain_set_term_on_basic_place_is_rejected) {
    NetSchema schema;
    schema.name = "g_as_one_token";
    schema.signature = ss::make_signature();
    schema.places = {{"G", Sort::basic("E")}};
    schema.initial_marking["G"] = {InscriptionItem::plain(Term::constant("EX"))};
    ValidationReport report = check_well_formed(schema);
    ASSERT_FALSE(report.ok());  // one set-valued token does not fit sort E
    EXPECT_THROW(instantiate(schema, ss::default_instantiation()), ModelError);
}

TEST(instantiate, empty_initial_marking) {
    Net net = clients_net();
    EXPECT_TRUE(net.initial_marking.places.empty());
}

TEST(enabled_bindings, admin_j_with_matching_expert) {
    Net net = admin_net();
    Marking m;
    m.places["Q"].add(acs("a1", "c1", "s1"));
    m.places["R"].add(atom("e1", "E"));
    m.places["S"].add(atom("r1", "R"));

    const Transition* j = net.schema.find_transition("j");
    auto bindings = enabled_bindings(net, m, *j);
    ASSERT_EQ(bindings.size(), 1u);
    Binding expected{{"a", atom("a1", "A")},
                     {"c", atom("c1", "C")},
                     {"s", atom("s1", "S")},
                     {"e", atom("e1", "E")},
                     {"r", atom("r1", "R")}};
    EXPECT_EQ(bindings[0], expected);
}

TEST(enabled_bindings, admin_j_guard_blocks_wrong_expert) {
    Net net = admin_net();
    Marking m;
    m.places["Q"].add(acs("a1", "c1", "s1"));
    m.places["R"].add(atom("e2", "E"));  // f(s1) = {e1}
    m.places["S"].add(atom("r1", "R"));
    EXPECT_TRUE(enabled_bindings(net, m, *net.schema.find_transition("j")).empty());
}

TEST(enabled_bindings, admin_k_demands_whole_expert_set_in_T) {
    Net net = admin_net();
    Marking m;
    m.places["Q"].add(acs("a1", "c1", "s1"));
    m.places["T"].add(atom("e1", "E"));

    auto bindings = enabled_bindings(net, m, *net.schema.find_transition("k"));
    ASSERT_EQ(bindings.size(), 1u);
    Binding expected{{"a", atom("a1", "A")}, {"c", atom("c1", "C")}, {"s", atom("s1", "S")}};
    EXPECT_EQ(bindings[0], expected);

    Marking empty_t;
    empty_t.places["Q"].add(acs("a1", "c1", "s1"));
    EXPECT_TRUE(enabled_bindings(net, empty_t, *net.schema.find_transition("k")).empty());
}

TEST(enabled_bindings, agree_with_brute_force_on_fixture_markings) {
    Net net = admin_net();
    std::vector<Marking> markings;
    markings.push_back(net.initial_marking);
    Marking busy;
    busy.places["Q"].add(acs("a1", "c2", "s2"));
    busy.places["T"].add(atom("e1", "E"));
    busy.places["T"].add(atom("e2", "E"));
    busy.places["R"].add(atom("e2", "E"));
    markings.push_back(busy);
    for (const auto& m : markings)
        for (const auto& t : net.schema.transitions)
            EXPECT_EQ(enabled_bindings(net, m, t), oracles::brute_force_enabled_bindings(net, m, t))
                << "transition " << t.name;
}

TEST(fire, spontaneous_client_entry_on_empty_marking) {
    Net net = clients_net();
    Binding b{{"c", atom("c1", "C")}, {"s", atom("s1", "S")}};
    Marking after = fire(net, Marking{}, *net.schema.find_transition("a"), b);
    EXPECT_EQ(after.at("A").expand(),
              std::vector<Value>{Value::tuple({atom("c1", "C"), atom("s1", "S")})});
}

TEST(fire, admin_k_restores_the_loop_tokens) {
    Net net = admin_net();
    Marking m;
    m.places["Q"].add(acs("a1", "c1", "s1"));
    m.places["T"].add(atom("e1", "E"));

    Binding b{{"a", atom("a1", "A")}, {"c", atom("c1", "C")}, {"s", atom("s1", "S")}};
    Marking after = fire(net, m, *net.schema.find_transition("k"), b);
    EXPECT_EQ(after.at("P").count(atom("a1", "A")), 1u);
    EXPECT_EQ(after.at("C").count(atom("c1", "C")), 1u);
    EXPECT_TRUE(after.at("Q").empty());
    EXPECT_EQ(after.at("T"), m.at("T"));  // loop neutrality
}

TEST(fire, non_enabled_binding_is_a_hard_error) {
    Net net = admin_net();
    Binding b{{"a", atom("a1", "A")}, {"c", atom("c1", "C")}, {"s", atom("s1", "S")}};
    EXPECT_THROW(fire(net, Marking{}, *net.schema.find_transition("k"), b), FiringError);
}

TEST(fire, preserves_typing_along_a_happy_path_prefix) {
    auto fixture = ss::build_system();
    Net net = instantiate(flatten(fixture.composed), fixture.default_structure);
    EXPECT_TRUE(marking_well_typed(net, net.initial_marking));

    Marking m = net.initial_marking;
    Binding enter{{"c", atom("c1", "C")}, {"s", atom("s1", "S")}};
    m = fire(net, m, *net.schema.find_transition("a"), enter);
    EXPECT_TRUE(marking_well_typed(net, m));

    auto desk = enabled_bindings(net, m, *net.schema.find_transition("b"));
    ASSERT_EQ(desk.size(), 1u);
    m = fire(net, m, *net.schema.find_transition("b"), desk[0]);
    EXPECT_TRUE(marking_well_typed(net, m));

    auto assign = enabled_bindings(net, m, *net.schema.find_transition("j"));
    ASSERT_EQ(assign.size(), 1u);
    m = fire(net, m, *net.schema.find_transition("j"), assign[0]);
    EXPECT_TRUE(marking_well_typed(net, m));
    EXPECT_EQ(m.at("T").count(atom("e1", "E")), 1u);
    EXPECT_EQ(m.at("R").count(atom("e1", "E")), 0u);
}

TEST(marking, duplicates_are_permitted) {
    Net net = clients_net();
    Marking m;
    Value token = Value::tuple({atom("c1", "C"), atom("s1", "S")});
    m.places["A"].add(token);
    m.places["A"].add(token);
    EXPECT_EQ(m.at("A").count(token), 2u);
    EXPECT_TRUE(marking_well_typed(net, m));
}

}  // namespace
