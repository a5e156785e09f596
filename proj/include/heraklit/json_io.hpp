#pragma once

#include <cctype>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "heraklit/composition.hpp"
#include "heraklit/explore.hpp"
#include "heraklit/mining.hpp"
#include "heraklit/net.hpp"
#include "heraklit/runs.hpp"

namespace heraklit {

using json = nlohmann::ordered_json;

// --- token literals ----------------------------------------------------------
//
// Grammar: atom `e1`, tuple `(c1,r1)`, set `{e1,e2}`, booleans true/false.
// Parsing needs the expected sort to resolve atom identifiers to carriers.

namespace detail {

class LiteralParser {
  public:
    LiteralParser(const std::string& text, const Structure& st) : text_(text), st_(st) {}

    Value parse(const Sort& sort) {
        Value v = parse_sorted(sort);
        skip_space();
        if (pos_ != text_.size())
            throw ModelError("trailing characters in token literal: " + text_);
        return v;
    }

  private:
    Value parse_sorted(const Sort& sort) {
        skip_space();
        switch (sort.kind()) {
            case Sort::Kind::Boolean: {
                if (consume_word("true")) return Value::boolean(true);
                if (consume_word("false")) return Value::boolean(false);
                throw ModelError("expected boolean literal in " + text_);
            }
            case Sort::Kind::Basic: {
                std::string id = identifier();
                Value atom = Value::atom(id, sort.name());
                if (!st_.carrier_has(sort.name(), atom))
                    throw ModelError("atom " + id + " is not in the carrier of " + sort.name());
                return atom;
            }
            case Sort::Kind::Tuple: {
                expect('(');
                std::vector<Value> components;
                for (std::size_t i = 0; i < sort.components().size(); ++i) {
                    if (i) expect(',');
                    components.push_back(parse_sorted(sort.components()[i]));
                    skip_space();
                }
                expect(')');
                return Value::tuple(std::move(components));
            }
            case Sort::Kind::Powerset: {
                expect('{');
                std::vector<Value> elements;
                skip_space();
                Sort elem = Sort::basic(sort.name());
                if (pos_ < text_.size() && text_[pos_] != '}') {
                    elements.push_back(parse_sorted(elem));
                    skip_space();
                    while (pos_ < text_.size() && text_[pos_] == ',') {
                        ++pos_;
                        elements.push_back(parse_sorted(elem));
                        skip_space();
                    }
                }
                expect('}');
                return Value::set(std::move(elements));
            }
        }
        throw ModelError("unsupported sort in token literal");
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    void expect(char c) {
        skip_space();
        if (pos_ >= text_.size() || text_[pos_] != c)
            throw ModelError(std::string("expected '") + c + "' in token literal: " + text_);
        ++pos_;
    }

    bool consume_word(const std::string& word) {
        skip_space();
        if (text_.compare(pos_, word.size(), word) == 0) {
            pos_ += word.size();
            return true;
        }
        return false;
    }

    std::string identifier() {
        skip_space();
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        if (start == pos_) throw ModelError("expected identifier in token literal: " + text_);
        return text_.substr(start, pos_ - start);
    }

    const std::string& text_;
    const Structure& st_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline Value parse_value_literal(const std::string& text, const Sort& sort, const Structure& st) {
    return detail::LiteralParser(text, st).parse(sort);
}

// --- markings ---------------------------------------------------------------

// Every place, sorted by name, holding the sorted list of token literals.
inline json marking_to_json(const NetSchema& schema, const Marking& m) {
    json out = json::object();
    std::vector<std::string> names;
    for (const auto& p : schema.places) names.push_back(p.name);
    std::sort(names.begin(), names.end());
    for (const auto& name : names) {
        json tokens = json::array();
        for (const auto& token : m.at(name).expand()) tokens.push_back(token.str());
        out[name] = std::move(tokens);
    }
    return out;
}

// --- scenarios ----------------------------------------------------------------

inline Scenario scenario_from_json(const json& j, const Net& net) {
    Scenario scenario;
    if (j.contains("maxSteps")) scenario.max_steps = j.at("maxSteps").get<std::size_t>();
    if (j.contains("seed")) scenario.seed = j.at("seed").get<std::uint64_t>();
    const json workload = j.value("workload", json::array());
    for (const auto& entry : workload) {
        Scenario::WorkItem item;
        item.transition = entry.at("transition").get<std::string>();
        const Transition* t = net.schema.find_transition(item.transition);
        if (!t) throw ModelError("scenario fires unknown transition " + item.transition);
        const json binding = entry.value("binding", json::object());
        for (const auto& [var, literal] : binding.items()) {
            auto sort = net.structure.signature.variables.find(var);
            if (sort == net.structure.signature.variables.end())
                throw ModelError("scenario binds unknown variable " + var);
            item.binding[var] =
                parse_value_literal(literal.get<std::string>(), sort->second, net.structure);
        }
        scenario.workload.push_back(std::move(item));
    }
    return scenario;
}

inline json scenario_to_json(const Scenario& scenario) {
    json workload = json::array();
    for (const auto& item : scenario.workload) {
        json binding = json::object();
        for (const auto& [var, value] : item.binding) binding[var] = value.str();
        workload.push_back({{"transition", item.transition}, {"binding", std::move(binding)}});
    }
    return {{"workload", std::move(workload)},
            {"maxSteps", scenario.max_steps},
            {"seed", scenario.seed}};
}

// --- event logs ----------------------------------------------------------------
//
// JSON lines: a provenance header record, then one record per event.

inline std::string event_log_to_jsonl(const EventLog& log) {
    std::ostringstream out;
    json header = {{"model", log.model}, {"seed", log.seed}, {"events", log.records.size()}};
    out << header.dump() << "\n";
    for (const auto& record : log.records) {
        json binding = json::object();
        for (const auto& [var, value] : record.binding) binding[var] = value.str();
        json consumed = json::array();
        for (const auto& [place, token] : record.consumed)
            consumed.push_back(json::array({place, token.str()}));
        json produced = json::array();
        for (const auto& [place, token] : record.produced)
            produced.push_back(json::array({place, token.str()}));
        json line = {{"index", record.index},
                     {"transition", record.transition},
                     {"binding", std::move(binding)},
                     {"consumed", std::move(consumed)},
                     {"produced", std::move(produced)}};
        out << line.dump() << "\n";
    }
    return out.str();
}

// Rebuilding a log from text needs the net to re-sort binding and token
// literals.
inline EventLog event_log_from_jsonl(const std::string& text, const Net& net) {
    EventLog log;
    std::istringstream in(text);
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        if (!header_seen) {
            header_seen = true;
            log.model = j.value("model", "");
            log.seed = j.value("seed", std::uint64_t{0});
            continue;
        }
        LogRecord record;
        record.index = j.at("index").get<std::size_t>();
        record.transition = j.at("transition").get<std::string>();
        const Transition* t = net.schema.find_transition(record.transition);
        if (!t) throw ModelError("log fires unknown transition " + record.transition);
        for (const auto& [var, literal] : j.at("binding").items()) {
            auto sort = net.structure.signature.variables.find(var);
            if (sort == net.structure.signature.variables.end())
                throw ModelError("log binds unknown variable " + var);
            record.binding[var] =
                parse_value_literal(literal.get<std::string>(), sort->second, net.structure);
        }
        auto tokens = [&](const json& array, std::vector<std::pair<std::string, Value>>& into) {
            for (const auto& pair : array) {
                std::string place = pair.at(0).get<std::string>();
                const Place* p = net.schema.find_place(place);
                if (!p) throw ModelError("log references unknown place " + place);
                into.push_back(
                    {place, parse_value_literal(pair.at(1).get<std::string>(), p->token_sort,
                                                net.structure)});
            }
        };
        tokens(j.value("consumed", json::array()), record.consumed);
        tokens(j.value("produced", json::array()), record.produced);
        log.records.push_back(std::move(record));
    }
    return log;
}

// --- mining reports -------------------------------------------------------------

inline json mining_report_to_json(const MiningReport& report) {
    json frequency = json::object();
    for (const auto& [service, count] : report.request_frequency) frequency[service] = count;

    json waiting = json::object();
    for (const auto& [client, entries] : report.waiting_times) {
        json list = json::array();
        for (const auto& entry : entries) {
            json e = {{"request", entry.request_index},
                      {"service", entry.service},
                      {"outcome", outcome_str(entry.outcome)}};
            if (entry.resolved_index) e["resolved"] = *entry.resolved_index;
            if (entry.duration) e["duration"] = *entry.duration;
            list.push_back(std::move(e));
        }
        waiting[client] = std::move(list);
    }

    json utilization = json::object();
    for (const auto& [expert, fraction] : report.expert_utilization) utilization[expert] = fraction;

    return {{"requestFrequency", std::move(frequency)},
            {"waitingTimes", std::move(waiting)},
            {"turnedAwayCount", report.turned_away_count},
            {"servedCount", report.served_count},
            {"rejectedCount", report.rejected_count},
            {"openCount", report.open_count},
            {"deskCount", report.desk_count},
            {"expertUtilization", std::move(utilization)},
            {"span", report.span}};
}

// Aligned plain-text table, one section per statistic.
inline std::string mining_report_to_table(const MiningReport& report) {
    std::ostringstream out;
    auto rule = [&]() { out << "  " << std::string(46, '-') << "\n"; };

    out << "request frequency\n";
    rule();
    for (const auto& [service, count] : report.request_frequency) {
        out << "  " << service;
        out << std::string(service.size() < 24 ? 24 - service.size() : 1, ' ');
        out << count << "\n";
    }
    if (report.request_frequency.empty()) out << "  (none)\n";

    out << "waiting times (logical steps)\n";
    rule();
    for (const auto& [client, entries] : report.waiting_times) {
        for (const auto& entry : entries) {
            std::string head = client + " @" + std::to_string(entry.request_index) + " " + entry.service;
            out << "  " << head;
            out << std::string(head.size() < 24 ? 24 - head.size() : 1, ' ');
            if (entry.duration)
                out << *entry.duration << "  " << outcome_str(entry.outcome) << "\n";
            else
                out << "-  " << outcome_str(entry.outcome) << "\n";
        }
    }
    if (report.waiting_times.empty()) out << "  (none)\n";

    out << "turned away: " << report.turned_away_count << " (served " << report.served_count
        << ", rejected " << report.rejected_count << ", open " << report.open_count << ", desk "
        << report.desk_count << ")\n";

    out << "expert utilization\n";
    rule();
    for (const auto& [expert, fraction] : report.expert_utilization) {
        out << "  " << expert;
        out << std::string(expert.size() < 24 ? 24 - expert.size() : 1, ' ');
        out << fraction << "\n";
    }
    if (report.expert_utilization.empty()) out << "  (none)\n";
    return out.str();
}

// --- schemas and modules ----------------------------------------------------------

inline json inscription_to_json(const ArcInscription& arc) {
    json items = json::array();
    for (const auto& item : arc) items.push_back(item.str());
    return items;
}

inline json schema_to_json(const NetSchema& schema) {
    json places = json::array();
    for (const auto& p : schema.places) places.push_back({{"name", p.name}, {"sort", p.token_sort.str()}});
    json transitions = json::array();
    for (const auto& t : schema.transitions) {
        json inputs = json::object(), outputs = json::object();
        for (const auto& [place, arc] : t.input_arcs) inputs[place] = inscription_to_json(arc);
        for (const auto& [place, arc] : t.output_arcs) outputs[place] = inscription_to_json(arc);
        transitions.push_back({{"name", t.name},
                               {"guard", t.guard.str()},
                               {"in", std::move(inputs)},
                               {"out", std::move(outputs)}});
    }
    json init = json::object();
    for (const auto& [place, items] : schema.initial_marking) init[place] = inscription_to_json(items);
    return {{"name", schema.name},
            {"places", std::move(places)},
            {"transitions", std::move(transitions)},
            {"initialMarking", std::move(init)}};
}

inline json module_to_json(const Module& m) {
    ResolvedModule resolved = resolve(m);
    json leaves = json::array();
    for (const auto& leaf : resolved.leaves)
        leaves.push_back({{"name", leaf.name}, {"kind", leaf.schema ? "net" : "opaque"}});
    auto side = [&](const std::vector<ResolvedGate>& gates) {
        json out = json::array();
        for (const auto& g : gates)
            out.push_back({{"label", g.label}, {"kind", gate_kind_str(g.kind)}});
        return out;
    };
    json fused = json::array();
    for (const auto& cls : resolved.fused_classes()) {
        json members = json::array();
        for (const auto& key : cls)
            members.push_back(resolved.leaves[key.leaf].name + "." + key.element);
        fused.push_back(std::move(members));
    }
    json out = {{"name", m.name()},
                {"left", side(resolved.left)},
                {"right", side(resolved.right)},
                {"leaves", std::move(leaves)},
                {"fused", std::move(fused)}};
    bool all_nets = true;
    for (const auto& leaf : resolved.leaves)
        if (!leaf.schema) all_nets = false;
    if (all_nets) out["flattened"] = schema_to_json(flatten(m));
    return out;
}

}  // namespace heraklit
