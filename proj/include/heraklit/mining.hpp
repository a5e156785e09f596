#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "heraklit/error.hpp"
#include "heraklit/runs.hpp"

namespace heraklit {

// One event record of a recorded run: logical index, transition, binding
// literals, and the tokens moved. Lossless for replay.
struct LogRecord {
    std::size_t index = 0;
    std::string transition;
    Binding binding;
    std::vector<std::pair<std::string, Value>> consumed;  // (place, token)
    std::vector<std::pair<std::string, Value>> produced;

    friend bool operator==(const LogRecord& a, const LogRecord& b) {
        return a.index == b.index && a.transition == b.transition && a.binding == b.binding &&
               a.consumed == b.consumed && a.produced == b.produced;
    }
};

struct EventLog {
    std::string model;      // net identity
    std::uint64_t seed = 0;  // scenario seed
    std::vector<LogRecord> records;
};

// Emits the run's events in recorder order. Requires a verified run.
inline EventLog export_log(const Net& net, const ConcurrentRun& run, std::string model,
                           std::uint64_t seed) {
    if (!verify_run(net, run)) throw ModelError("export_log: run does not verify against the net");
    EventLog log;
    log.model = std::move(model);
    log.seed = seed;
    for (const auto& event : run.events) {
        LogRecord record;
        record.index = event.id;
        record.transition = event.transition;
        record.binding = event.binding;
        for (std::size_t cid : run.consumed_by(event.id))
            record.consumed.push_back({run.conditions[cid].place, run.conditions[cid].token});
        for (std::size_t cid : run.produced_by(event.id))
            record.produced.push_back({run.conditions[cid].place, run.conditions[cid].token});
        std::sort(record.consumed.begin(), record.consumed.end());
        std::sort(record.produced.begin(), record.produced.end());
        log.records.push_back(std::move(record));
    }
    return log;
}

// Binds the mining statistics to the case-study roles. Defaults match the
// service-system transition names; other nets can remap them.
struct MiningConfig {
    std::string request_transition = "a";   // client enters with a wish
    std::string desk_transition = "b";      // help desk accepts the request
    std::string serve_transition = "d";     // client sent to a room
    std::string reject_transition = "c";    // client leaves unserved
    std::string reject_decision = "k";      // admin decides to turn away
    std::string engage_transition = "f";    // expert walks to the room
    std::string release_transition = "g";   // expert unengaged again
    std::string client_variable = "c";
    std::string service_variable = "s";
    std::string expert_variable = "e";
};

struct WaitingEntry {
    std::size_t request_index = 0;  // index of the desk event
    std::string service;
    enum class Outcome { Served, TurnedAway, Open } outcome = Outcome::Open;
    std::optional<std::size_t> resolved_index;
    std::optional<std::size_t> duration;  // logical steps; absent while open

    friend bool operator==(const WaitingEntry& a, const WaitingEntry& b) {
        return a.request_index == b.request_index && a.service == b.service &&
               a.outcome == b.outcome && a.resolved_index == b.resolved_index &&
               a.duration == b.duration;
    }
};

inline const char* outcome_str(WaitingEntry::Outcome o) {
    switch (o) {
        case WaitingEntry::Outcome::Served: return "served";
        case WaitingEntry::Outcome::TurnedAway: return "turned-away";
        case WaitingEntry::Outcome::Open: return "open";
    }
    return "?";
}

struct MiningReport {
    std::map<std::string, std::size_t> request_frequency;        // service atom -> entries
    std::map<std::string, std::vector<WaitingEntry>> waiting_times;  // client atom -> entries
    std::size_t turned_away_count = 0;                           // reject decisions (k)
    std::size_t served_count = 0;
    std::size_t rejected_count = 0;                              // requests resolved unserved (c)
    std::size_t open_count = 0;
    std::size_t desk_count = 0;                                  // b occurrences
    std::map<std::string, double> expert_utilization;            // fraction of the log span
    std::size_t span = 0;                                        // number of events

    friend bool operator==(const MiningReport& a, const MiningReport& b) {
        return a.request_frequency == b.request_frequency && a.waiting_times == b.waiting_times &&
               a.turned_away_count == b.turned_away_count && a.served_count == b.served_count &&
               a.rejected_count == b.rejected_count && a.open_count == b.open_count &&
               a.desk_count == b.desk_count && a.expert_utilization == b.expert_utilization &&
               a.span == b.span;
    }
};

namespace detail {

inline std::string binding_atom(const Binding& b, const std::string& var) {
    auto it = b.find(var);
    if (it == b.end()) throw ModelError("log record misses binding for variable " + var);
    if (!it->second.is_atom()) throw ModelError("binding for " + var + " is not an atom");
    return it->second.as_atom().id;
}

}  // namespace detail

// Single-pass statistics over an event log: request frequencies per
// service, waiting times per client request (desk acceptance to room
// assignment or turn-away, in logical steps), the turned-away count, and
// per-expert utilization as the fraction of the log span spent between
// engage and release.
//
// Requests still open at the end of the log are reported but excluded from
// duration statistics; experts still engaged count as busy to the end.
inline MiningReport analyze(const EventLog& log, const MiningConfig& config = {}) {
    MiningReport report;
    report.span = log.records.size();

    // Open desk requests per (client, service), matched first-in-first-out.
    std::map<std::pair<std::string, std::string>, std::deque<std::size_t>> open;
    std::map<std::string, std::size_t> engaged_since;  // expert -> engage index
    std::map<std::string, std::size_t> busy;           // expert -> accumulated steps

    std::size_t expected_index = 0;
    for (const auto& record : log.records) {
        if (record.index < expected_index)
            throw ModelError("event log indices are not strictly increasing");
        expected_index = record.index + 1;

        if (record.transition == config.request_transition) {
            report.request_frequency[detail::binding_atom(record.binding, config.service_variable)]++;
        } else if (record.transition == config.desk_transition) {
            std::string client = detail::binding_atom(record.binding, config.client_variable);
            std::string service = detail::binding_atom(record.binding, config.service_variable);
            open[{client, service}].push_back(record.index);
            ++report.desk_count;
        } else if (record.transition == config.serve_transition ||
                   record.transition == config.reject_transition) {
            std::string client = detail::binding_atom(record.binding, config.client_variable);
            std::string service = detail::binding_atom(record.binding, config.service_variable);
            auto& queue = open[{client, service}];
            if (queue.empty())
                throw ModelError("resolution for " + client + "/" + service + " without a desk event");
            WaitingEntry entry;
            entry.request_index = queue.front();
            queue.pop_front();
            entry.service = service;
            entry.resolved_index = record.index;
            entry.duration = record.index - entry.request_index;
            bool served = record.transition == config.serve_transition;
            entry.outcome = served ? WaitingEntry::Outcome::Served : WaitingEntry::Outcome::TurnedAway;
            if (served)
                ++report.served_count;
            else
                ++report.rejected_count;
            report.waiting_times[client].push_back(std::move(entry));
        } else if (record.transition == config.engage_transition) {
            engaged_since[detail::binding_atom(record.binding, config.expert_variable)] = record.index;
        } else if (record.transition == config.release_transition) {
            std::string expert = detail::binding_atom(record.binding, config.expert_variable);
            auto it = engaged_since.find(expert);
            if (it != engaged_since.end()) {
                busy[expert] += record.index - it->second;
                engaged_since.erase(it);
            }
        }
        if (record.transition == config.reject_decision) ++report.turned_away_count;
    }

    // Requests never resolved stay open.
    for (const auto& [key, queue] : open) {
        for (std::size_t index : queue) {
            WaitingEntry entry;
            entry.request_index = index;
            entry.service = key.second;
            entry.outcome = WaitingEntry::Outcome::Open;
            report.waiting_times[key.first].push_back(entry);
            ++report.open_count;
        }
    }
    for (auto& [client, entries] : report.waiting_times)
        std::sort(entries.begin(), entries.end(),
                  [](const WaitingEntry& a, const WaitingEntry& b) {
                      return a.request_index < b.request_index;
                  });

    for (const auto& [expert, since] : engaged_since) busy[expert] += report.span - since;
    for (const auto& [expert, steps] : busy)
        report.expert_utilization[expert] =
            report.span == 0 ? 0.0 : static_cast<double>(steps) / static_cast<double>(report.span);
    return report;
}

// Replays a log against a net, returning the final marking. Throws when a
// record is not fireable; used to certify that logs are lossless.
inline Marking replay_log(const Net& net, const EventLog& log) {
    Marking marking = net.initial_marking;
    for (const auto& record : log.records) {
        const Transition* t = net.schema.find_transition(record.transition);
        if (!t) throw ModelError("log fires unknown transition " + record.transition);
        marking = fire(net, marking, *t, record.binding);
    }
    return marking;
}

}  // namespace heraklit
