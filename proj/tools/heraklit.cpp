// Command-line front end: check models, compose and export modules,
// simulate workload scenarios, explore declared invariants, and mine
// recorded runs.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "heraklit/heraklit.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw heraklit::ModelError("cannot read " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw heraklit::ModelError("cannot write " + path);
    out << content;
}

heraklit::dsl::ParsedSystem load_model(const std::string& path) {
    try {
        return heraklit::dsl::parse_system(read_file(path));
    } catch (const heraklit::ParseError& e) {
        throw heraklit::ModelError(path + ":" + e.what());
    }
}

heraklit::Net instantiated(const heraklit::dsl::ParsedSystem& model, const std::string& structure) {
    heraklit::NetSchema schema = heraklit::flatten(*model.composed);
    return heraklit::instantiate(schema, model.structure(structure));
}

int run_check(const std::string& path, const std::string& structure_name) {
    auto model = load_model(path);
    int failures = 0;

    heraklit::NetSchema flat = heraklit::flatten(*model.composed);
    heraklit::ValidationReport wf = heraklit::check_well_formed(flat);
    if (wf.ok()) {
        std::cout << "well-formed: " << flat.places.size() << " places, "
                  << flat.transitions.size() << " transitions\n";
    } else {
        std::cout << "well-formedness violations:\n" << wf.str();
        ++failures;
    }

    for (const auto& name : model.structure_order) {
        if (!structure_name.empty() && name != structure_name) continue;
        heraklit::ValidationReport sv =
            heraklit::validate_structure(model.signature, model.structures.at(name));
        if (sv.ok()) {
            std::cout << "structure " << name << ": ok\n";
        } else {
            std::cout << "structure " << name << " violations:\n" << sv.str();
            ++failures;
        }
    }
    return failures == 0 ? 0 : 1;
}

int run_compose(const std::string& path, const std::string& expr, const std::string& format,
                const std::string& out_file) {
    auto model = load_model(path);
    heraklit::Module target =
        expr.empty() ? *model.composed : heraklit::dsl::evaluate_expression(model, expr);
    std::string payload = format == "dot" ? heraklit::module_to_dot(target)
                                          : heraklit::module_to_json(target).dump(2) + "\n";
    if (out_file.empty())
        std::cout << payload;
    else
        write_file(out_file, payload);
    return 0;
}

int run_simulate(const std::string& path, const std::string& scenario_path,
                 std::optional<std::uint64_t> seed, std::optional<std::size_t> max_steps,
                 const std::string& out_file, const std::string& dot_file,
                 const std::string& structure_name) {
    auto model = load_model(path);
    heraklit::Net net = instantiated(model, structure_name);
    heraklit::Scenario scenario =
        heraklit::scenario_from_json(heraklit::json::parse(read_file(scenario_path)), net);
    if (seed) scenario.seed = *seed;
    if (max_steps) scenario.max_steps = *max_steps;

    heraklit::SimulationResult result = heraklit::simulate(net, scenario);
    heraklit::EventLog log =
        heraklit::export_log(net, result.run, model.name, scenario.seed);

    std::cout << "fired " << result.run.events.size() << " events, "
              << result.run.conditions.size() << " conditions\n";
    if (!result.workload_completed) {
        std::cout << "incomplete workload: " << result.pending_workload.size()
                  << " entries never became enabled\n";
    }
    std::cout << "final marking: "
              << heraklit::marking_to_json(net.schema, result.final_marking).dump() << "\n";

    if (!out_file.empty()) write_file(out_file, heraklit::event_log_to_jsonl(log));
    if (!dot_file.empty()) write_file(dot_file, heraklit::run_to_dot(result.run));
    return result.workload_completed ? 0 : 1;
}

int run_invariants(const std::string& path, const std::string& scenario_path,
                   std::size_t max_states, const std::string& structure_name) {
    auto model = load_model(path);
    heraklit::Net net = instantiated(model, structure_name);
    heraklit::Scenario scenario =
        heraklit::scenario_from_json(heraklit::json::parse(read_file(scenario_path)), net);

    heraklit::ExplorationOptions options;
    options.max_states = max_states;
    heraklit::ExplorationResult result =
        heraklit::explore(net, scenario, model.invariants, options);

    std::cout << "explored " << result.states << " markings ("
              << (result.exhausted ? "exhaustive" : "clipped at bound") << ")\n";
    bool all_hold = true;
    for (const auto& inv : model.invariants) {
        const std::string& name = heraklit::invariant_name(inv);
        auto it = result.violation_counts.find(name);
        std::size_t count = it == result.violation_counts.end() ? 0 : it->second;
        std::cout << "  " << name << ": " << (count == 0 ? "holds" : "VIOLATED") << "\n";
        if (count != 0) all_hold = false;
    }
    for (const auto& violation : result.violations)
        std::cout << "  " << violation.invariant << ": " << violation.message << "\n";
    return all_hold && result.exhausted ? 0 : 1;
}

int run_mine(const std::string& run_path, const std::string& model_path, const std::string& out_file,
             bool table, const std::string& structure_name) {
    auto model = load_model(model_path);
    heraklit::Net net = instantiated(model, structure_name);
    heraklit::EventLog log = heraklit::event_log_from_jsonl(read_file(run_path), net);
    heraklit::replay_log(net, log);  // reject logs that do not fit the model
    heraklit::MiningReport report = heraklit::analyze(log);
    std::string payload = heraklit::mining_report_to_json(report).dump(2) + "\n";
    if (out_file.empty() || table) std::cout << heraklit::mining_report_to_table(report);
    if (!out_file.empty())
        write_file(out_file, payload);
    else
        std::cout << payload;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"HERAKLIT modelling toolkit"};
    app.require_subcommand(1);

    std::string model_path, structure_name, scenario_path, out_file, dot_file, expr, run_path;
    std::string format = "json";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> max_steps;
    std::size_t max_states = 100000;
    bool table = false;

    auto* check = app.add_subcommand("check", "well-formedness and structure validation");
    check->add_option("model", model_path, "model file (.hkl)")->required();
    check->add_option("--structure", structure_name, "validate one structure only");

    auto* compose_cmd = app.add_subcommand("compose", "evaluate a composition expression");
    compose_cmd->add_option("model", model_path, "model file (.hkl)")->required();
    compose_cmd->add_option("--expr", expr, "composition expression (defaults to the system)");
    compose_cmd->add_option("--out", format, "output format")->check(CLI::IsMember({"dot", "json"}));
    compose_cmd->add_option("--file", out_file, "write to a file instead of stdout");

    auto* simulate_cmd = app.add_subcommand("simulate", "run a workload scenario");
    simulate_cmd->add_option("model", model_path, "model file (.hkl)")->required();
    simulate_cmd->add_option("--scenario", scenario_path, "scenario file (.json)")->required();
    simulate_cmd->add_option("--seed", seed, "override the scenario seed");
    simulate_cmd->add_option("--max-steps", max_steps, "override the scenario step bound");
    simulate_cmd->add_option("--out", out_file, "event log output (JSON lines)");
    simulate_cmd->add_option("--dot", dot_file, "occurrence-net DOT output");
    simulate_cmd->add_option("--structure", structure_name, "structure to instantiate");

    auto* invariants_cmd = app.add_subcommand("invariants", "explore reachable markings");
    invariants_cmd->add_option("model", model_path, "model file (.hkl)")->required();
    invariants_cmd->add_option("--scenario", scenario_path, "scenario file (.json)")->required();
    invariants_cmd->add_option("--max-states", max_states, "state bound");
    invariants_cmd->add_option("--structure", structure_name, "structure to instantiate");

    auto* mine_cmd = app.add_subcommand("mine", "statistics over a recorded run");
    mine_cmd->add_option("run", run_path, "event log (JSON lines)")->required();
    mine_cmd->add_option("--model", model_path, "model file (.hkl)")->required();
    mine_cmd->add_option("--out", out_file, "report output (.json)");
    mine_cmd->add_flag("--table", table, "also print the plain-text table");
    mine_cmd->add_option("--structure", structure_name, "structure to instantiate");

    CLI11_PARSE(app, argc, argv);

    try {
        if (check->parsed()) return run_check(model_path, structure_name);
        if (compose_cmd->parsed()) return run_compose(model_path, expr, format, out_file);
        if (simulate_cmd->parsed())
            return run_simulate(model_path, scenario_path, seed, max_steps, out_file, dot_file,
                                structure_name);
        if (invariants_cmd->parsed())
            return run_invariants(model_path, scenario_path, max_states, structure_name);
        if (mine_cmd->parsed())
            return run_mine(run_path, model_path, out_file, table, structure_name);
    } catch (const heraklit::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const heraklit::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
