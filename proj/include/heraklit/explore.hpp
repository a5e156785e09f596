#pragma once

#include <deque>
#include <map>
#include <string>
#include <vector>

#include "heraklit/invariants.hpp"
#include "heraklit/net.hpp"
#include "heraklit/runs.hpp"

namespace heraklit {

// Exhaustive bounded exploration of the markings reachable under a
// workload scenario. Unlike the simulator's eager policy, exploration may
// interleave each workload entry (still in list order) with any other
// firing, so it covers every schedule.
//
// A state is (marking, number of workload entries consumed).

struct ExplorationOptions {
    std::size_t max_states = 100000;
};

struct InvariantViolation {
    std::string invariant;
    std::string message;
    Marking marking;
    std::size_t workload_consumed = 0;
};

struct ExplorationResult {
    std::size_t states = 0;
    std::size_t transitions_fired = 0;
    bool exhausted = true;  // false when max_states clipped the search
    std::vector<InvariantViolation> violations;
    std::map<std::string, std::size_t> violation_counts;  // per invariant name
};

inline ExplorationResult explore(const Net& net, const Scenario& scenario,
                                 const std::vector<Invariant>& invariants,
                                 const ExplorationOptions& options = {}) {
    for (const auto& item : scenario.workload) {
        const Transition* t = net.schema.find_transition(item.transition);
        if (!t) throw ModelError("scenario fires unknown transition " + item.transition);
        if (!t->spontaneous())
            throw ModelError("scenario fires non-spontaneous transition " + item.transition);
    }

    using State = std::pair<Marking, std::size_t>;
    std::map<State, bool> seen;
    std::deque<State> frontier;

    ExplorationResult result;

    auto visit = [&](const State& state) {
        if (seen.size() >= options.max_states) {
            result.exhausted = false;
            return;
        }
        if (seen.emplace(state, true).second) frontier.push_back(state);
    };

    visit({net.initial_marking, 0});

    while (!frontier.empty()) {
        auto [marking, consumed] = frontier.front();
        frontier.pop_front();
        ++result.states;

        for (const auto& inv : invariants) {
            if (auto violation = check_invariant(inv, net, marking)) {
                auto& count = result.violation_counts[invariant_name(inv)];
                ++count;
                if (result.violations.size() < 16)
                    result.violations.push_back({invariant_name(inv), *violation, marking, consumed});
            }
        }

        for (const auto& t : net.schema.transitions) {
            if (t.spontaneous()) continue;
            for (const auto& binding : enabled_bindings(net, marking, t)) {
                ++result.transitions_fired;
                visit({fire(net, marking, t, binding), consumed});
            }
        }
        if (consumed < scenario.workload.size()) {
            const auto& item = scenario.workload[consumed];
            const Transition* t = net.schema.find_transition(item.transition);
            if (binding_enabled(net, marking, *t, item.binding)) {
                ++result.transitions_fired;
                visit({fire(net, marking, *t, item.binding), consumed + 1});
            }
        }
    }
    return result;
}

}  // namespace heraklit
