#include <gtest/gtest.h>

#include "heraklit/dsl.hpp"
#include "heraklit/dot_export.hpp"
#include "heraklit/json_io.hpp"
#include "heraklit/service_system.hpp"

using namespace heraklit;
namespace ss = heraklit::service_system;

namespace {

TEST(parse, service_system_source_matches_the_programmatic_fixture) {
    auto parsed = dsl::parse_system(dsl::service_system_source());
    auto fixture = ss::build_system();
    EXPECT_TRUE(canonical_equal(*parsed.composed, fixture.composed));
    EXPECT_EQ(parsed.signature, fixture.signature);
    EXPECT_EQ(parsed.structure("Default"), fixture.default_structure);
    EXPECT_EQ(parsed.invariants, fixture.invariants);
    EXPECT_EQ(parsed.name, "ServiceSystem");
}

TEST(parse, print_then_reparse_is_canonically_equal) {
    auto first = dsl::parse_system(dsl::service_system_source());
    std::string printed = dsl::print_system(first);
    auto second = dsl::parse_system(printed);
    EXPECT_TRUE(canonical_equal(*first.composed, *second.composed));
    EXPECT_EQ(first.signature, second.signature);
    EXPECT_EQ(first.structures, second.structures);
    EXPECT_EQ(first.invariants, second.invariants);
    EXPECT_EQ(dsl::print_system(second), printed);  // printing is a fixpoint
}

TEST(parse, syntax_errors_carry_line_and_column) {
    std::string source = "signature S {\n  sorts X\n}\n";  // missing ';'
    try {
        dsl::parse_system(source);
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line, 3u);
        EXPECT_NE(std::string(e.what()).find("expected"), std::string::npos);
    }
}

TEST(parse, unknown_sort_in_place_declaration_is_located) {
    std::string source =
        "signature S { sorts X; variable x : X; }\n"
        "module m : S {\n"
        "  place P : Y;\n"
        "  transition t { in P : x; }\n"
        "}\n"
        "system Sys = m;\n";
    try {
        dsl::parse_system(source);
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line, 3u);
        EXPECT_NE(std::string(e.what()).find("unknown sort Y"), std::string::npos);
    }
}

TEST(parse, unresolved_term_name_is_an_error) {
    std::string source =
        "signature S { sorts X; variable x : X; }\n"
        "module m : S {\n"
        "  place P : X;\n"
        "  transition t { in P : q; }\n"
        "}\n"
        "system Sys = m;\n";
    EXPECT_THROW(dsl::parse_system(source), ParseError);
}

TEST(parse, kind_mismatched_gates_surface_as_composition_errors) {
    std::string source =
        "signature S { sorts X; variable x : X; }\n"
        "module l : S {\n"
        "  place P : X;\n"
        "  transition t { in P : x; }\n"
        "  right { place P as G; }\n"
        "}\n"
        "module r : S {\n"
        "  place P : X;\n"
        "  transition t { in P : x; }\n"
        "  left { transition t as G; }\n"
        "}\n"
        "system Sys = l . r;\n";
    EXPECT_THROW(dsl::parse_system(source), CompositionError);
}

TEST(parse, abstraction_brackets_compose_opaque_modules) {
    std::string source =
        "signature S { sorts X; variable x : X; }\n"
        "module l : S {\n"
        "  place P : X;\n"
        "  transition t { in P : x; }\n"
        "  right { place P as G; }\n"
        "}\n"
        "module r : S {\n"
        "  place P : X;\n"
        "  transition t { in P : x; }\n"
        "  left { place P as G; }\n"
        "}\n"
        "system Sys = [l] . [r];\n";
    auto parsed = dsl::parse_system(source);
    ASSERT_TRUE(parsed.composed.has_value());
    auto resolved = resolve(*parsed.composed);
    ASSERT_EQ(resolved.leaves.size(), 2u);
    EXPECT_EQ(resolved.leaves[0].schema, nullptr);  // opaque
    EXPECT_EQ(resolved.leaves[1].schema, nullptr);
    EXPECT_EQ(resolved.fused_classes().size(), 1u);  // G glued, opaque or not
    EXPECT_THROW(flatten(*parsed.composed), CompositionError);
}

TEST(parse, bullet_alias_for_composition) {
    std::string source =
        "signature S { sorts X; variable x : X; }\n"
        "module l : S { place P : X; transition t { in P : x; } right { place P as G; } }\n"
        "module r : S { place P : X; transition t { in P : x; } left { place P as G; } }\n"
        "system Sys = l \xe2\x80\xa2 r;\n";
    auto parsed = dsl::parse_system(source);
    EXPECT_EQ(resolve(*parsed.composed).fused_classes().size(), 1u);
}

TEST(parse, requirements_and_invalid_structures_stay_expressible) {
    std::string source =
        "signature S {\n"
        "  sorts X;\n"
        "  constant K : set(X);\n"
        "  constant L : set(X);\n"
        "  variable x : X;\n"
        "  requirement K subset L;\n"
        "}\n"
        "structure Good : S { carrier X = {x1, x2}; K = {x1}; L = {x1, x2}; }\n"
        "structure Bad : S { carrier X = {x1, x2}; K = {x1, x9}; L = {x1}; }\n"
        "module m : S { place P : X; transition t { in P : x; } }\n"
        "system Sys = m;\n";
    auto parsed = dsl::parse_system(source);
    EXPECT_TRUE(validate_structure(parsed.signature, parsed.structure("Good")).ok());
    ValidationReport bad = validate_structure(parsed.signature, parsed.structure("Bad"));
    EXPECT_FALSE(bad.ok());
    EXPECT_TRUE(bad.mentions("K"));  // foreign atom x9
}

TEST(parse, duplicate_system_declaration_is_rejected) {
    std::string source =
        "signature S { sorts X; variable x : X; }\n"
        "module m : S { place P : X; transition t { in P : x; } }\n"
        "system A = m;\n"
        "system B = m;\n";
    EXPECT_THROW(dsl::parse_system(source), ParseError);
}

TEST(scenario, json_round_trip_against_the_model) {
    auto parsed = dsl::parse_system(dsl::service_system_source());
    Net net = instantiate(flatten(*parsed.composed), parsed.structure("Default"));
    json j = {{"workload", json::array({{{"transition", "a"},
                                         {"binding", {{"c", "c1"}, {"s", "s1"}}}}})},
              {"maxSteps", 100},
              {"seed", 7}};
    Scenario sc = scenario_from_json(j, net);
    ASSERT_EQ(sc.workload.size(), 1u);
    EXPECT_EQ(sc.workload[0].binding.at("c"), Value::atom("c1", "C"));
    EXPECT_EQ(sc.seed, 7u);
    EXPECT_EQ(scenario_to_json(sc), j);
}

TEST(scenario, misspelled_atom_is_rejected) {
    auto parsed = dsl::parse_system(dsl::service_system_source());
    Net net = instantiate(flatten(*parsed.composed), parsed.structure("Default"));
    json j = {{"workload", json::array({{{"transition", "a"},
                                         {"binding", {{"c", "nope"}, {"s", "s1"}}}}})}};
    EXPECT_THROW(scenario_from_json(j, net), ModelError);
}

TEST(output, marking_json_lists_sorted_token_literals) {
    auto fixture = ss::build_system();
    Net net = instantiate(flatten(fixture.composed), fixture.default_structure);
    json j = marking_to_json(net.schema, net.initial_marking);
    EXPECT_EQ(j.at("G"), json::array({"e1", "e2"}));
    EXPECT_EQ(j.at("P"), json::array({"a1"}));
    EXPECT_EQ(j.at("A"), json::array());
}

TEST(output, dot_exports_are_generated) {
    auto fixture = ss::build_system();
    std::string module_dot = module_to_dot(fixture.composed);
    EXPECT_NE(module_dot.find("subgraph cluster_0"), std::string::npos);
    EXPECT_NE(module_dot.find("digraph"), std::string::npos);

    Net net = instantiate(flatten(fixture.composed), fixture.default_structure);
    Scenario sc;
    sc.workload = {{"a", {{"c", Value::atom("c1", "C")}, {"s", Value::atom("s1", "S")}}}};
    sc.max_steps = 50;
    sc.seed = 7;
    SimulationResult result = simulate(net, sc);
    std::string run_dot = run_to_dot(result.run);
    EXPECT_NE(run_dot.find("shape=box"), std::string::npos);
    EXPECT_NE(run_dot.find("shape=ellipse"), std::string::npos);
}

}  // namespace
