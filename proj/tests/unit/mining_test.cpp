#include <gtest/gtest.h>

#include "heraklit/composition.hpp"
#include "heraklit/json_io.hpp"
#include "heraklit/mining.hpp"
#include "heraklit/service_system.hpp"

using namespace heraklit;
namespace ss = heraklit::service_system;

namespace {

Value atom(const char* id, const char* sort) { return Value::atom(id, sort); }

Net fixture_net() {
    auto fixture = ss::build_system();
    return instantiate(flatten(fixture.composed), fixture.default_structure);
}

EventLog simulate_log(const Net& net, const std::vector<std::pair<const char*, const char*>>& clients,
                      std::uint64_t seed) {
    Scenario sc;
    for (const auto& [c, s] : clients)
        sc.workload.push_back({"a", {{"c", atom(c, "C")}, {"s", atom(s, "S")}}});
    sc.max_steps = 200;
    sc.seed = seed;
    SimulationResult result = simulate(net, sc);
    return export_log(net, result.run, "fixture", seed);
}

// Brute-force recount, one statistic at a time, with quadratic rescans of
// the raw records.
struct Recount {
    std::map<std::string, std::size_t> frequency;
    std::size_t k_events = 0;
    std::size_t served = 0, rejected = 0, open = 0, desk = 0;
    std::map<std::string, double> utilization;
};

std::string atom_of(const Binding& b, const char* var) { return b.at(var).as_atom().id; }

Recount recount(const EventLog& log) {
    Recount out;
    for (const auto& r : log.records)
        if (r.transition == "a") out.frequency[atom_of(r.binding, "s")]++;
    for (const auto& r : log.records)
        if (r.transition == "k") out.k_events++;

    std::vector<bool> resolved(log.records.size(), false);
    for (std::size_t i = 0; i < log.records.size(); ++i) {
        const auto& desk = log.records[i];
        if (desk.transition != "b") continue;
        out.desk++;
        bool matched = false;
        for (std::size_t j = i + 1; j < log.records.size() && !matched; ++j) {
            const auto& res = log.records[j];
            if (res.transition != "d" && res.transition != "c") continue;
            if (resolved[j]) continue;
            if (atom_of(res.binding, "c") != atom_of(desk.binding, "c")) continue;
            if (atom_of(res.binding, "s") != atom_of(desk.binding, "s")) continue;
            resolved[j] = true;
            matched = true;
            if (res.transition == "d")
                out.served++;
            else
                out.rejected++;
        }
        if (!matched) out.open++;
    }

    std::map<std::string, std::size_t> busy;
    for (std::size_t i = 0; i < log.records.size(); ++i) {
        if (log.records[i].transition != "f") continue;
        std::string expert = atom_of(log.records[i].binding, "e");
        std::size_t end = log.records.size();
        for (std::size_t j = i + 1; j < log.records.size(); ++j) {
            if (log.records[j].transition == "g" && atom_of(log.records[j].binding, "e") == expert) {
                end = log.records[j].index;
                break;
            }
        }
        busy[expert] += end - log.records[i].index;
    }
    for (const auto& [expert, steps] : busy)
        out.utilization[expert] =
            log.records.empty() ? 0.0 : double(steps) / double(log.records.size());
    return out;
}

void expect_matches_recount(const EventLog& log) {
    MiningReport report = analyze(log);
    Recount oracle = recount(log);
    EXPECT_EQ(report.request_frequency, oracle.frequency);
    EXPECT_EQ(report.turned_away_count, oracle.k_events);
    EXPECT_EQ(report.served_count, oracle.served);
    EXPECT_EQ(report.rejected_count, oracle.rejected);
    EXPECT_EQ(report.open_count, oracle.open);
    EXPECT_EQ(report.desk_count, oracle.desk);
    EXPECT_EQ(report.expert_utilization, oracle.utilization);
}

TEST(export_log, empty_run_gives_empty_log) {
    Net net = fixture_net();
    SimulationResult result = simulate(net, Scenario{});
    EventLog log = export_log(net, result.run, "fixture", 0);
    EXPECT_TRUE(log.records.empty());
    MiningReport report = analyze(log);
    EXPECT_EQ(report.span, 0u);
    EXPECT_TRUE(report.request_frequency.empty());
    EXPECT_EQ(report.turned_away_count, 0u);
    EXPECT_TRUE(report.expert_utilization.empty());
}

TEST(export_log, one_client_has_nine_events_and_replays) {
    Net net = fixture_net();
    EventLog log = simulate_log(net, {{"c1", "s1"}}, 7);
    ASSERT_EQ(log.records.size(), 9u);

    Scenario sc;
    sc.workload = {{"a", {{"c", atom("c1", "C")}, {"s", atom("s1", "S")}}}};
    sc.max_steps = 200;
    sc.seed = 7;
    SimulationResult reference = simulate(net, sc);
    EXPECT_EQ(replay_log(net, log), reference.final_marking);
}

TEST(export_log, jsonl_round_trip_is_lossless) {
    Net net = fixture_net();
    EventLog log = simulate_log(net, {{"c1", "s1"}, {"c2", "s1"}}, 0);
    std::string text = event_log_to_jsonl(log);
    EventLog back = event_log_from_jsonl(text, net);
    EXPECT_EQ(back.model, log.model);
    EXPECT_EQ(back.seed, log.seed);
    ASSERT_EQ(back.records.size(), log.records.size());
    for (std::size_t i = 0; i < back.records.size(); ++i) EXPECT_EQ(back.records[i], log.records[i]);
}

TEST(analyze, one_client_served) {
    Net net = fixture_net();
    EventLog log = simulate_log(net, {{"c1", "s1"}}, 7);
    MiningReport report = analyze(log);

    EXPECT_EQ(report.request_frequency, (std::map<std::string, std::size_t>{{"s1", 1}}));
    EXPECT_EQ(report.turned_away_count, 0u);
    EXPECT_EQ(report.served_count, 1u);
    EXPECT_EQ(report.open_count, 0u);
    ASSERT_EQ(report.waiting_times.count("c1"), 1u);
    ASSERT_EQ(report.waiting_times.at("c1").size(), 1u);
    const WaitingEntry& entry = report.waiting_times.at("c1")[0];
    EXPECT_EQ(entry.outcome, WaitingEntry::Outcome::Served);
    ASSERT_TRUE(entry.duration.has_value());
    EXPECT_GT(*entry.duration, 0u);

    // seed 7 order: a b j d f h i g e -> f at 4, g at 7, span 9.
    ASSERT_EQ(report.expert_utilization.count("e1"), 1u);
    EXPECT_DOUBLE_EQ(report.expert_utilization.at("e1"), 3.0 / 9.0);
    EXPECT_EQ(report.expert_utilization.count("e2"), 0u);

    expect_matches_recount(log);
}

TEST(analyze, second_client_turned_away) {
    Net net = fixture_net();
    EventLog log = simulate_log(net, {{"c1", "s1"}, {"c2", "s1"}}, 0);
    MiningReport report = analyze(log);

    EXPECT_EQ(report.turned_away_count, 1u);
    EXPECT_EQ(report.rejected_count, 1u);
    EXPECT_EQ(report.served_count, 1u);
    EXPECT_EQ(report.request_frequency.at("s1"), 2u);

    std::size_t k_count = 0, c_count = 0;
    for (const auto& r : log.records) {
        if (r.transition == "k") ++k_count;
        if (r.transition == "c") ++c_count;
    }
    EXPECT_EQ(report.turned_away_count, k_count);
    EXPECT_EQ(k_count, c_count);

    expect_matches_recount(log);
}

TEST(analyze, count_coherence_across_scenarios) {
    Net net = fixture_net();
    std::vector<EventLog> logs = {
        simulate_log(net, {{"c1", "s1"}}, 7),
        simulate_log(net, {{"c1", "s1"}, {"c2", "s1"}}, 0),
        simulate_log(net, {{"c1", "s1"}, {"c2", "s1"}}, 6),
        simulate_log(net, {{"c1", "s2"}, {"c2", "s2"}, {"c3", "s1"}}, 3),
        simulate_log(net, {{"c1", "s1"}, {"c1", "s2"}}, 4),
    };
    for (const auto& log : logs) {
        MiningReport report = analyze(log);
        EXPECT_EQ(report.served_count + report.rejected_count + report.open_count, report.desk_count);
        expect_matches_recount(log);
    }
}

TEST(analyze, open_requests_are_reported_without_durations) {
    Net net = fixture_net();
    EventLog log = simulate_log(net, {{"c1", "s1"}}, 7);
    // Truncate right after the desk event: the request stays open.
    EventLog cut = log;
    cut.records.resize(2);  // a, b
    MiningReport report = analyze(cut);
    EXPECT_EQ(report.open_count, 1u);
    EXPECT_EQ(report.served_count, 0u);
    ASSERT_EQ(report.waiting_times.at("c1").size(), 1u);
    EXPECT_EQ(report.waiting_times.at("c1")[0].outcome, WaitingEntry::Outcome::Open);
    EXPECT_FALSE(report.waiting_times.at("c1")[0].duration.has_value());
    expect_matches_recount(cut);
}

TEST(analyze, report_serializes_to_json_and_table) {
    Net net = fixture_net();
    EventLog log = simulate_log(net, {{"c1", "s1"}, {"c2", "s1"}}, 0);
    MiningReport report = analyze(log);
    json j = mining_report_to_json(report);
    EXPECT_EQ(j.at("turnedAwayCount").get<std::size_t>(), 1u);
    EXPECT_TRUE(j.contains("requestFrequency"));
    EXPECT_TRUE(j.contains("waitingTimes"));
    EXPECT_TRUE(j.contains("expertUtilization"));
    std::string table = mining_report_to_table(report);
    EXPECT_NE(table.find("turned away: 1"), std::string::npos);
}

}  // namespace
