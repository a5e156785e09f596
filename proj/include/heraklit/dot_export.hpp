#pragma once

#include <map>
#include <sstream>
#include <string>

#include "heraklit/composition.hpp"
#include "heraklit/runs.hpp"

namespace heraklit {

namespace detail {

inline std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

}  // namespace detail

// One rectangle per submodule, gate labels on the border; fused elements
// drawn once, between the clusters they join.
inline std::string module_to_dot(const Module& m) {
    ResolvedModule r = resolve(m);
    std::ostringstream out;
    out << "digraph \"" << detail::dot_escape(m.name()) << "\" {\n";
    out << "  rankdir=LR;\n  compound=true;\n";

    std::map<ElementKey, std::string> node_of;
    std::map<ElementKey, bool> emitted;

    auto node_id = [&](const ElementKey& key) {
        return "n" + std::to_string(key.leaf) + "_" + detail::dot_escape(key.element);
    };

    // Fused classes become shared nodes outside the clusters.
    for (const auto& cls : r.fused_classes()) {
        std::string id = node_id(cls.front());
        std::string label = cls.front().element;
        bool is_place = true;
        for (const auto& key : cls) {
            node_of[key] = id;
            if (r.leaves[key.leaf].schema && r.leaves[key.leaf].schema->find_transition(key.element))
                is_place = false;
        }
        out << "  \"" << id << "\" [label=\"" << detail::dot_escape(label) << "\", shape="
            << (is_place ? "ellipse" : "box") << ", style=bold];\n";
        emitted[cls.front()] = true;
    }

    for (std::size_t i = 0; i < r.leaves.size(); ++i) {
        const auto& leaf = r.leaves[i];
        out << "  subgraph cluster_" << i << " {\n";
        out << "    label=\"" << detail::dot_escape(leaf.name) << "\";\n";
        if (!leaf.schema) {
            out << "    \"opaque_" << i << "\" [label=\"" << detail::dot_escape(leaf.name)
                << "\", shape=plaintext];\n";
            out << "  }\n";
            continue;
        }
        for (const auto& p : leaf.schema->places) {
            ElementKey key{i, p.name};
            if (node_of.count(key)) continue;
            std::string id = node_id(key);
            node_of[key] = id;
            out << "    \"" << id << "\" [label=\"" << detail::dot_escape(p.name)
                << "\", shape=ellipse];\n";
        }
        for (const auto& t : leaf.schema->transitions) {
            ElementKey key{i, t.name};
            if (node_of.count(key)) continue;
            std::string id = node_id(key);
            node_of[key] = id;
            out << "    \"" << id << "\" [label=\"" << detail::dot_escape(t.name)
                << "\", shape=box];\n";
        }
        out << "  }\n";
    }

    // Fused members all map to the shared node; everything else to its own.
    auto resolved_node = [&](std::size_t leaf, const std::string& element) {
        return node_of.at(ElementKey{leaf, element});
    };

    for (std::size_t i = 0; i < r.leaves.size(); ++i) {
        if (!r.leaves[i].schema) continue;
        for (const auto& t : r.leaves[i].schema->transitions) {
            std::string tid = resolved_node(i, t.name);
            for (const auto& [place, arc] : t.input_arcs)
                out << "  \"" << resolved_node(i, place) << "\" -> \"" << tid << "\" [label=\""
                    << detail::dot_escape(inscription_str(arc)) << "\"];\n";
            for (const auto& [place, arc] : t.output_arcs)
                out << "  \"" << tid << "\" -> \"" << resolved_node(i, place) << "\" [label=\""
                    << detail::dot_escape(inscription_str(arc)) << "\"];\n";
        }
    }

    // Gate labels on the border.
    auto emit_gates = [&](const std::vector<ResolvedGate>& gates, const char* side) {
        for (const auto& g : gates) {
            std::string id = std::string("gate_") + side + "_" + detail::dot_escape(g.label);
            out << "  \"" << id << "\" [label=\"" << detail::dot_escape(g.label)
                << "\", shape=plaintext];\n";
            auto it = node_of.find(g.element);
            if (it != node_of.end())
                out << "  \"" << id << "\" -> \"" << it->second << "\" [style=dashed, arrowhead=none];\n";
        }
    };
    emit_gates(r.left, "left");
    emit_gates(r.right, "right");

    out << "}\n";
    return out.str();
}

// Events as boxes, conditions as circles.
inline std::string run_to_dot(const ConcurrentRun& run) {
    std::ostringstream out;
    out << "digraph run {\n  rankdir=LR;\n";
    for (const auto& e : run.events) {
        std::string label = std::to_string(e.id) + ": " + e.transition;
        if (!e.binding.empty()) label += " " + binding_str(e.binding);
        out << "  \"e" << e.id << "\" [label=\"" << detail::dot_escape(label) << "\", shape=box];\n";
    }
    for (const auto& c : run.conditions) {
        out << "  \"c" << c.id << "\" [label=\"" << detail::dot_escape(c.place + ": " + c.token.str())
            << "\", shape=ellipse];\n";
        for (std::size_t producer : c.producers)
            out << "  \"e" << producer << "\" -> \"c" << c.id << "\";\n";
        for (std::size_t consumer : c.consumers)
            out << "  \"c" << c.id << "\" -> \"e" << consumer << "\";\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace heraklit
