// Library walkthrough: build the service system programmatically, run one
// client through it, and print the mining table. The same flow is available
// from the CLI; see the README.

#include <iostream>

#include "heraklit/heraklit.hpp"

using namespace heraklit;

int main() {
    auto fixture = service_system::build_system();

    std::cout << "composed module: " << fixture.composed.name() << "\n";
    NetSchema flat = flatten(fixture.composed);
    std::cout << "flattened: " << flat.places.size() << " places, " << flat.transitions.size()
              << " transitions\n\n";

    Net net = instantiate(flat, fixture.default_structure);
    Scenario scenario;
    scenario.workload = {{"a", {{"c", Value::atom("c1", "C")}, {"s", Value::atom("s1", "S")}}}};
    scenario.max_steps = 100;
    scenario.seed = 7;

    SimulationResult result = simulate(net, scenario);
    std::cout << "run of " << result.run.events.size() << " events:";
    for (const auto& e : result.run.events) std::cout << " " << e.transition;
    std::cout << "\n\n";

    EventLog log = export_log(net, result.run, "walkthrough", scenario.seed);
    std::cout << mining_report_to_table(analyze(log));

    std::cout << "\nfinal marking: " << marking_to_json(net.schema, result.final_marking).dump()
              << "\n";
    return 0;
}
