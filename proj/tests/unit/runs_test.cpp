#include <gtest/gtest.h>

#include <map>
#include <set>

#include "heraklit/composition.hpp"
#include "heraklit/runs.hpp"
#include "heraklit/service_system.hpp"
#include "support/oracles.hpp"

using namespace heraklit;
namespace ss = heraklit::service_system;

namespace {

Value atom(const char* id, const char* sort) { return Value::atom(id, sort); }

Net fixture_net() {
    auto fixture = ss::build_system();
    return instantiate(flatten(fixture.composed), fixture.default_structure);
}

Scenario one_client(std::uint64_t seed) {
    Scenario sc;
    sc.workload = {{"a", {{"c", atom("c1", "C")}, {"s", atom("s1", "S")}}}};
    sc.max_steps = 100;
    sc.seed = seed;
    return sc;
}

std::map<std::string, std::size_t> occurrences(const ConcurrentRun& run) {
    std::map<std::string, std::size_t> out;
    for (const auto& e : run.events) out[e.transition]++;
    return out;
}

TEST(simulate, one_client_happy_path) {
    Net net = fixture_net();
    SimulationResult result = simulate(net, one_client(7));

    ASSERT_EQ(result.run.events.size(), 9u);
    std::map<std::string, std::size_t> expected{{"a", 1}, {"b", 1}, {"j", 1}, {"d", 1}, {"f", 1},
                                                {"h", 1}, {"i", 1}, {"g", 1}, {"e", 1}};
    EXPECT_EQ(occurrences(result.run), expected);
    EXPECT_TRUE(result.workload_completed);

    // All resources restored; the client rests in the exit sink.
    Marking expected_final;
    expected_final.places["P"].add(atom("a1", "A"));
    expected_final.places["G"].add(atom("e1", "E"));
    expected_final.places["G"].add(atom("e2", "E"));
    expected_final.places["R"].add(atom("e1", "E"));
    expected_final.places["R"].add(atom("e2", "E"));
    expected_final.places["S"].add(atom("r1", "R"));
    expected_final.places["Exited"].add(atom("c1", "C"));
    EXPECT_EQ(result.final_marking, expected_final);
}

TEST(simulate, empty_workload_returns_initial_marking) {
    Net net = fixture_net();
    Scenario sc;
    sc.max_steps = 50;
    SimulationResult result = simulate(net, sc);
    EXPECT_TRUE(result.run.events.empty());
    EXPECT_EQ(result.final_marking, net.initial_marking);
    // Initial tokens still become conditions.
    EXPECT_EQ(result.run.conditions.size(), 6u);  // a1, e1, e2 twice, r1
}

TEST(simulate, deterministic_for_fixed_scenario) {
    Net net = fixture_net();
    SimulationResult first = simulate(net, one_client(3));
    SimulationResult second = simulate(net, one_client(3));
    EXPECT_EQ(first.run, second.run);
    EXPECT_EQ(first.final_marking, second.final_marking);
}

TEST(simulate, two_clients_one_rejection) {
    Net net = fixture_net();
    Scenario sc;
    sc.workload = {{"a", {{"c", atom("c1", "C")}, {"s", atom("s1", "S")}}},
                   {"a", {{"c", atom("c2", "C")}, {"s", atom("s1", "S")}}}};
    sc.max_steps = 100;
    sc.seed = 0;  // this seed resolves the second request while e1 consults
    SimulationResult result = simulate(net, sc);
    auto counts = occurrences(result.run);
    EXPECT_EQ(counts["k"], 1u);
    EXPECT_EQ(counts["c"], 1u);
    EXPECT_EQ(counts["j"], 1u);
    EXPECT_EQ(result.run.events.size(), 13u);
}

TEST(simulate, workload_entry_never_enabled_is_reported) {
    auto fixture = ss::build_system();
    // A net without transition 'a' being spontaneous: use admin alone, whose
    // only spontaneous candidates do not exist; instead, use a guard that
    // can never hold: request for an atom not in any carrier is caught by
    // scenario validation, so use max_steps exhaustion instead.
    Net net = fixture_net();
    Scenario sc;
    sc.workload = {{"a", {{"c", atom("c1", "C")}, {"s", atom("s1", "S")}}}};
    sc.max_steps = 0;  // nothing may fire
    SimulationResult result = simulate(net, sc);
    EXPECT_FALSE(result.workload_completed);
    ASSERT_EQ(result.pending_workload.size(), 1u);
    EXPECT_EQ(result.pending_workload[0].transition, "a");
}

TEST(simulate, rejects_non_spontaneous_workload) {
    Net net = fixture_net();
    Scenario sc;
    sc.workload = {{"b", {}}};
    EXPECT_THROW(simulate(net, sc), ModelError);
}

TEST(occurrence_net, shape_invariants_hold_for_simulated_runs) {
    Net net = fixture_net();
    SimulationResult result = simulate(net, one_client(1));
    for (const auto& c : result.run.conditions) {
        EXPECT_LE(c.producers.size(), 1u);
        EXPECT_LE(c.consumers.size(), 1u);
    }
    // 6 initial + a:1 + b:2 + j:4 + d:1 + f:1 + h:1 + i:2 + g:3 + e:1
    EXPECT_EQ(result.run.conditions.size(), 22u);
    EXPECT_TRUE(verify_run(net, result.run));
}

TEST(verify, rejects_condition_consumed_twice) {
    Net net = fixture_net();
    SimulationResult result = simulate(net, one_client(1));
    ConcurrentRun corrupt = result.run;
    // Find a consumed condition and double-book it.
    for (auto& c : corrupt.conditions) {
        if (!c.consumers.empty()) {
            c.consumers.push_back(c.consumers.front());
            break;
        }
    }
    EXPECT_FALSE(verify_run(net, corrupt));
}

TEST(verify, rejects_event_whose_guard_fails) {
    Net net = fixture_net();
    SimulationResult result = simulate(net, one_client(1));
    ConcurrentRun corrupt = result.run;
    for (auto& e : corrupt.events) {
        if (e.transition == "j") {
            e.binding["e"] = atom("e2", "E");  // f(s1) = {e1}: guard now fails
            break;
        }
    }
    EXPECT_FALSE(verify_run(net, corrupt));
}

TEST(verify, rejects_foreign_initial_conditions) {
    Net net = fixture_net();
    SimulationResult result = simulate(net, one_client(1));
    ConcurrentRun corrupt = result.run;
    RunCondition extra;
    extra.id = corrupt.conditions.size();
    extra.place = "G";
    extra.token = atom("e1", "E");
    corrupt.conditions.push_back(extra);
    EXPECT_FALSE(verify_run(net, corrupt));
}

TEST(linearize, chain_has_unique_order_and_empty_run_is_empty) {
    Net net = fixture_net();
    SimulationResult empty = simulate(net, Scenario{});
    EXPECT_TRUE(linearize(empty.run, 42).empty());

    // a -> b is a chain: every seed yields the same order.
    SimulationResult run = simulate(net, one_client(5));
    auto orders = all_topological_orders(run.run);
    // a,b,j first, then d/f interleave, h, i, then g/e interleave.
    EXPECT_EQ(orders.size(), 4u);
}

TEST(linearize, independent_events_vary_with_seed_and_all_orders_replay) {
    Net net = fixture_net();
    SimulationResult result = simulate(net, one_client(5));

    std::set<std::vector<std::size_t>> seen;
    for (std::uint64_t seed = 0; seed < 64; ++seed) {
        auto order = linearize(result.run, seed);
        seen.insert(order);
        EXPECT_TRUE(oracles::replays_as_firing_sequence(net, result.run, order));
    }
    EXPECT_GT(seen.size(), 1u);

    // The exchange property at desk scale: every topological order replays.
    for (const auto& order : all_topological_orders(result.run))
        EXPECT_TRUE(oracles::replays_as_firing_sequence(net, result.run, order));
}

TEST(linearize, cyclic_run_is_a_hard_error) {
    ConcurrentRun corrupt;
    corrupt.events = {{0, "x", {}}, {1, "y", {}}};
    RunCondition c0;
    c0.id = 0;
    c0.place = "P";
    c0.token = Value::boolean(true);
    c0.producers = {0};
    c0.consumers = {1};
    RunCondition c1 = c0;
    c1.id = 1;
    c1.producers = {1};
    c1.consumers = {0};
    corrupt.conditions = {c0, c1};
    EXPECT_THROW(linearize(corrupt, 0), ModelError);
}

TEST(flattening_coherence, both_associations_simulate_identically) {
    auto fixture = ss::build_system();
    Module left_assoc =
        compose(compose(compose(fixture.clients, fixture.admin), fixture.rooms), fixture.experts);
    Module right_assoc =
        compose(fixture.clients, compose(fixture.admin, compose(fixture.rooms, fixture.experts)));
    Net net_l = instantiate(flatten(left_assoc), fixture.default_structure);
    Net net_r = instantiate(flatten(right_assoc), fixture.default_structure);

    SimulationResult a = simulate(net_l, one_client(7));
    SimulationResult b = simulate(net_r, one_client(7));
    EXPECT_EQ(a.run, b.run);
    EXPECT_EQ(a.final_marking, b.final_marking);
}

}  // namespace
