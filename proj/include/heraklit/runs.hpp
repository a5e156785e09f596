#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "heraklit/error.hpp"
#include "heraklit/net.hpp"

namespace heraklit {

// Bounds the spontaneous transitions of a net to a finite experiment:
// each workload entry fires its transition once, with the given binding,
// in list order.
struct Scenario {
    struct WorkItem {
        std::string transition;
        Binding binding;
    };

    std::vector<WorkItem> workload;
    std::size_t max_steps = 1000;
    std::uint64_t seed = 0;
};

struct RunEvent {
    std::size_t id = 0;  // equals the logical index in recorder order
    std::string transition;
    Binding binding;

    friend bool operator==(const RunEvent& a, const RunEvent& b) {
        return a.id == b.id && a.transition == b.transition && a.binding == b.binding;
    }
};

// Occurrence-net condition: one token on one place, with at most one
// producing and one consuming event. No producer means initial.
struct RunCondition {
    std::size_t id = 0;
    std::string place;
    Value token = Value::boolean(false);
    std::vector<std::size_t> producers;
    std::vector<std::size_t> consumers;

    friend bool operator==(const RunCondition& a, const RunCondition& b) {
        return a.id == b.id && a.place == b.place && a.token == b.token &&
               a.producers == b.producers && a.consumers == b.consumers;
    }
};

// A partially ordered record of one execution. The causal order is the
// transitive closure of producer/consumer links; event ids double as
// logical indices for the mining statistics.
struct ConcurrentRun {
    std::vector<RunEvent> events;
    std::vector<RunCondition> conditions;

    std::vector<std::size_t> consumed_by(std::size_t event) const {
        std::vector<std::size_t> out;
        for (const auto& c : conditions)
            for (std::size_t e : c.consumers)
                if (e == event) out.push_back(c.id);
        return out;
    }

    std::vector<std::size_t> produced_by(std::size_t event) const {
        std::vector<std::size_t> out;
        for (const auto& c : conditions)
            for (std::size_t e : c.producers)
                if (e == event) out.push_back(c.id);
        return out;
    }

    // Direct causal predecessors of each event.
    std::vector<std::set<std::size_t>> predecessors() const {
        std::vector<std::set<std::size_t>> pred(events.size());
        for (const auto& c : conditions)
            if (!c.producers.empty())
                for (std::size_t consumer : c.consumers)
                    pred[consumer].insert(c.producers.front());
        return pred;
    }

    friend bool operator==(const ConcurrentRun& a, const ConcurrentRun& b) {
        return a.events == b.events && a.conditions == b.conditions;
    }
};

struct SimulationResult {
    ConcurrentRun run;
    Marking final_marking;
    bool workload_completed = true;
    std::size_t steps = 0;
    std::vector<Scenario::WorkItem> pending_workload;  // entries never enabled
};

namespace detail {

// Deterministic bounded draw; the engine is seeded per scenario.
inline std::size_t draw(std::mt19937_64& rng, std::size_t n) {
    return static_cast<std::size_t>(rng() % n);
}

class ConditionPool {
  public:
    void produce(std::vector<RunCondition>& conditions, const std::string& place, const Value& token,
                 std::optional<std::size_t> producer) {
        RunCondition c;
        c.id = conditions.size();
        c.place = place;
        c.token = token;
        if (producer) c.producers.push_back(*producer);
        available_[place][token].push_back(c.id);
        conditions.push_back(std::move(c));
    }

    // Oldest matching condition first; deterministic when duplicates exist.
    std::size_t consume(std::vector<RunCondition>& conditions, const std::string& place,
                        const Value& token, std::size_t consumer) {
        auto& queue = available_[place][token];
        std::size_t id = queue.front();
        queue.erase(queue.begin());
        conditions[id].consumers.push_back(consumer);
        return id;
    }

  private:
    std::map<std::string, std::map<Value, std::vector<std::size_t>>> available_;
};

}  // namespace detail

// Executes up to max_steps firings. Spontaneous transitions fire only as
// dictated by the workload list, in order, as soon as enabled; all other
// choices are resolved uniformly from the seeded stream. Terminates early
// when nothing is enabled; an unconsumed workload is reported, not thrown.
inline SimulationResult simulate(const Net& net, const Scenario& scenario) {
    for (const auto& item : scenario.workload) {
        const Transition* t = net.schema.find_transition(item.transition);
        if (!t) throw ModelError("scenario fires unknown transition " + item.transition);
        if (!t->spontaneous())
            throw ModelError("scenario fires non-spontaneous transition " + item.transition);
        for (const auto& var : t->free_variables())
            if (item.binding.find(var) == item.binding.end())
                throw ModelError("scenario binding for " + item.transition + " misses variable " + var);
    }

    SimulationResult result;
    Marking marking = net.initial_marking;
    std::mt19937_64 rng(scenario.seed);
    detail::ConditionPool pool;

    for (const auto& [place, tokens] : net.initial_marking.places)
        for (const auto& token : tokens.expand())
            pool.produce(result.run.conditions, place, token, std::nullopt);

    std::size_t next_work = 0;

    auto fire_recorded = [&](const Transition& t, const Binding& binding) {
        std::size_t event_id = result.run.events.size();
        Binding restricted;
        for (const auto& var : t.free_variables()) restricted[var] = binding.at(var);

        for (const auto& [place_name, arc] : t.input_arcs) {
            const Place* place = net.schema.find_place(place_name);
            Multiset<Value> need =
                detail::eval_inscription(arc, place->token_sort, net.structure, binding);
            for (const auto& token : need.expand())
                pool.consume(result.run.conditions, place_name, token, event_id);
            marking.subtract(place_name, need);
        }
        for (const auto& [place_name, arc] : t.output_arcs) {
            const Place* place = net.schema.find_place(place_name);
            Multiset<Value> produced =
                detail::eval_inscription(arc, place->token_sort, net.structure, binding);
            for (const auto& token : produced.expand())
                pool.produce(result.run.conditions, place_name, token, event_id);
            marking.add(place_name, produced);
        }
        result.run.events.push_back({event_id, t.name, std::move(restricted)});
        ++result.steps;
    };

    while (result.steps < scenario.max_steps) {
        if (next_work < scenario.workload.size()) {
            const auto& item = scenario.workload[next_work];
            const Transition* t = net.schema.find_transition(item.transition);
            if (binding_enabled(net, marking, *t, item.binding)) {
                fire_recorded(*t, item.binding);
                ++next_work;
                continue;
            }
        }

        std::vector<std::pair<const Transition*, Binding>> enabled;
        for (const auto& t : net.schema.transitions) {
            if (t.spontaneous()) continue;
            for (auto& b : enabled_bindings(net, marking, t)) enabled.push_back({&t, std::move(b)});
        }
        if (enabled.empty()) break;
        auto& [t, binding] = enabled[detail::draw(rng, enabled.size())];
        fire_recorded(*t, binding);
    }

    result.workload_completed = next_work == scenario.workload.size();
    for (std::size_t i = next_work; i < scenario.workload.size(); ++i)
        result.pending_workload.push_back(scenario.workload[i]);
    result.final_marking = marking;
    return result;
}

namespace detail {

// Kahn's algorithm; `pick` chooses among the ready events (by position).
template <typename Pick>
std::optional<std::vector<std::size_t>> topological_order(const ConcurrentRun& run, Pick&& pick) {
    auto pred = run.predecessors();
    std::vector<std::size_t> remaining(run.events.size(), 0);
    std::vector<std::vector<std::size_t>> succ(run.events.size());
    for (std::size_t e = 0; e < pred.size(); ++e) {
        remaining[e] = pred[e].size();
        for (std::size_t p : pred[e]) succ[p].push_back(e);
    }
    std::vector<std::size_t> ready;
    for (std::size_t e = 0; e < run.events.size(); ++e)
        if (remaining[e] == 0) ready.push_back(e);
    std::vector<std::size_t> order;
    while (!ready.empty()) {
        std::size_t at = pick(ready.size());
        std::size_t e = ready[at];
        ready.erase(ready.begin() + static_cast<std::ptrdiff_t>(at));
        order.push_back(e);
        for (std::size_t s : succ[e])
            if (--remaining[s] == 0) ready.push_back(s);
        std::sort(ready.begin(), ready.end());
    }
    if (order.size() != run.events.size()) return std::nullopt;  // cycle
    return order;
}

}  // namespace detail

// Structural and semantic soundness of a recorded run: occurrence-net
// shape, initial conditions matching the net's initial marking, acyclic
// causal order, and one witness linearization replaying from the initial
// marking with every event enabled under its recorded binding.
inline bool verify_run(const Net& net, const ConcurrentRun& run) {
    for (std::size_t i = 0; i < run.events.size(); ++i)
        if (run.events[i].id != i) return false;
    for (std::size_t i = 0; i < run.conditions.size(); ++i) {
        const RunCondition& c = run.conditions[i];
        if (c.id != i) return false;
        if (c.producers.size() > 1 || c.consumers.size() > 1) return false;
        if (!net.schema.find_place(c.place)) return false;
        for (std::size_t e : c.producers)
            if (e >= run.events.size()) return false;
        for (std::size_t e : c.consumers)
            if (e >= run.events.size()) return false;
    }
    for (const auto& e : run.events)
        if (!net.schema.find_transition(e.transition)) return false;

    Marking initial;
    for (const auto& c : run.conditions)
        if (c.producers.empty()) initial.places[c.place].add(c.token);
    if (initial != net.initial_marking) return false;

    auto order = detail::topological_order(run, [](std::size_t) { return 0; });
    if (!order) return false;

    // Replay the witness order via condition availability.
    std::vector<bool> available(run.conditions.size(), false);
    for (const auto& c : run.conditions)
        if (c.producers.empty()) available[c.id] = true;

    Marking marking = net.initial_marking;
    for (std::size_t e : *order) {
        const RunEvent& event = run.events[e];
        const Transition* t = net.schema.find_transition(event.transition);
        if (!binding_enabled(net, marking, *t, event.binding)) return false;

        Marking consumed;
        for (std::size_t cid : run.consumed_by(e)) {
            if (!available[cid]) return false;
            available[cid] = false;
            consumed.places[run.conditions[cid].place].add(run.conditions[cid].token);
        }
        Marking produced;
        for (std::size_t cid : run.produced_by(e)) {
            available[cid] = true;
            produced.places[run.conditions[cid].place].add(run.conditions[cid].token);
        }

        // Consumed and produced conditions must match the evaluated arcs.
        Marking expected_in, expected_out;
        for (const auto& [place_name, arc] : t->input_arcs) {
            const Place* place = net.schema.find_place(place_name);
            expected_in.add(place_name,
                            detail::eval_inscription(arc, place->token_sort, net.structure, event.binding));
        }
        for (const auto& [place_name, arc] : t->output_arcs) {
            const Place* place = net.schema.find_place(place_name);
            expected_out.add(place_name,
                             detail::eval_inscription(arc, place->token_sort, net.structure, event.binding));
        }
        if (consumed != expected_in || produced != expected_out) return false;

        marking = fire(net, marking, *t, event.binding);
    }
    return true;
}

// A topological order of the causal partial order; distinct seeds may give
// distinct orders. A cyclic order indicates a corrupted run.
inline std::vector<std::size_t> linearize(const ConcurrentRun& run, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto order = detail::topological_order(
        run, [&rng](std::size_t n) { return detail::draw(rng, n); });
    if (!order) throw ModelError("linearize: causal order is cyclic");
    return *order;
}

// Every topological order, for runs small enough to enumerate.
inline std::vector<std::vector<std::size_t>> all_topological_orders(const ConcurrentRun& run,
                                                                    std::size_t limit = 100000) {
    auto pred = run.predecessors();
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> order;
    std::vector<bool> placed(run.events.size(), false);
    std::function<void()> descend = [&]() {
        if (out.size() >= limit) return;
        if (order.size() == run.events.size()) {
            out.push_back(order);
            return;
        }
        for (std::size_t e = 0; e < run.events.size(); ++e) {
            if (placed[e]) continue;
            bool ready = true;
            for (std::size_t p : pred[e])
                if (!placed[p]) ready = false;
            if (!ready) continue;
            placed[e] = true;
            order.push_back(e);
            descend();
            order.pop_back();
            placed[e] = false;
        }
    };
    descend();
    return out;
}

}  // namespace heraklit
