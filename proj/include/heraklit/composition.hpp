#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "heraklit/error.hpp"
#include "heraklit/net.hpp"

namespace heraklit {

enum class GateKind { Place, Transition };

inline const char* gate_kind_str(GateKind k) {
    return k == GateKind::Place ? "place" : "transition";
}

// A labelled surface element. For net modules the gate is bound to an inner
// place or transition; for opaque modules it stands on its own. Composite
// surfaces carry labels only; their elements resolve through the children.
struct Gate {
    std::string label;
    GateKind kind = GateKind::Place;
    std::string bound_element;  // empty for opaque and composite surfaces

    friend bool operator==(const Gate& a, const Gate& b) {
        return a.label == b.label && a.kind == b.kind && a.bound_element == b.bound_element;
    }
};

// Left/right interface of a module. Labels are unique per side; the same
// label may appear on both sides.
struct Surface {
    std::vector<Gate> left;
    std::vector<Gate> right;

    const Gate* find(const std::vector<Gate>& side, const std::string& label) const {
        for (const auto& g : side)
            if (g.label == label) return &g;
        return nullptr;
    }

    friend bool operator==(const Surface& a, const Surface& b) {
        return a.left == b.left && a.right == b.right;
    }
};

class Module;

struct GluePair {
    std::string label;
    GateKind kind = GateKind::Place;

    friend bool operator==(const GluePair& a, const GluePair& b) {
        return a.label == b.label && a.kind == b.kind;
    }
};

// A system model: a surface of labelled gates split into left and right
// interfaces, over an inner that is a net schema, a composition of two
// submodules, or nothing but the name.
class Module {
  public:
    struct Opaque {};
    struct Composite {
        std::shared_ptr<const Module> left;
        std::shared_ptr<const Module> right;
        std::vector<GluePair> glue;
    };

    static Module opaque(std::string name, Surface surface);
    static Module net(std::string name, NetSchema schema, Surface surface);
    static Module composite(std::string name, Surface surface, Composite inner);

    const std::string& name() const { return name_; }
    const Surface& surface() const { return surface_; }

    bool is_opaque() const { return std::holds_alternative<Opaque>(inner_); }
    bool is_net() const { return std::holds_alternative<NetSchema>(inner_); }
    bool is_composite() const { return std::holds_alternative<Composite>(inner_); }

    const NetSchema& net_inner() const { return std::get<NetSchema>(inner_); }
    const Composite& composite_inner() const { return std::get<Composite>(inner_); }

  private:
    Module() = default;

    std::string name_;
    Surface surface_;
    std::variant<Opaque, NetSchema, Composite> inner_;
};

namespace detail {

inline void check_side_labels(const std::vector<Gate>& side, const char* which,
                              const std::string& module_name) {
    std::set<std::string> seen;
    for (const auto& g : side)
        if (!seen.insert(g.label).second)
            throw CompositionError("module " + module_name + ": duplicate label " + g.label +
                                   " on its " + which + " interface");
}

}  // namespace detail

inline Module Module::opaque(std::string name, Surface surface) {
    detail::check_side_labels(surface.left, "left", name);
    detail::check_side_labels(surface.right, "right", name);
    Module m;
    m.name_ = std::move(name);
    for (auto* side : {&surface.left, &surface.right})
        for (auto& g : *side) g.bound_element.clear();
    m.surface_ = std::move(surface);
    m.inner_ = Opaque{};
    return m;
}

inline Module Module::net(std::string name, NetSchema schema, Surface surface) {
    detail::check_side_labels(surface.left, "left", name);
    detail::check_side_labels(surface.right, "right", name);
    for (const auto* side : {&surface.left, &surface.right}) {
        for (const auto& g : *side) {
            if (g.bound_element.empty())
                throw CompositionError("module " + name + ": gate " + g.label +
                                       " of a net module must bind an inner element");
            if (g.kind == GateKind::Place) {
                if (!schema.find_place(g.bound_element))
                    throw CompositionError("module " + name + ": gate " + g.label +
                                           " binds unknown place " + g.bound_element);
            } else if (!schema.find_transition(g.bound_element)) {
                throw CompositionError("module " + name + ": gate " + g.label +
                                       " binds unknown transition " + g.bound_element);
            }
        }
    }
    Module m;
    m.name_ = std::move(name);
    m.surface_ = std::move(surface);
    m.inner_ = std::move(schema);
    return m;
}

inline Module Module::composite(std::string name, Surface surface, Composite inner) {
    Module m;
    m.name_ = std::move(name);
    m.surface_ = std::move(surface);
    m.inner_ = std::move(inner);
    return m;
}

// --- canonical (flat) view -------------------------------------------------
//
// Composite nesting dissolves into: the ordered list of leaves and a
// partition of fully qualified inner-element names into fusion classes.
// Leaf order is invariant under re-association, so qualified names are
// (leaf index, element name) pairs.

struct ElementKey {
    std::size_t leaf = 0;
    std::string element;

    friend bool operator==(const ElementKey& a, const ElementKey& b) {
        return a.leaf == b.leaf && a.element == b.element;
    }
    friend bool operator<(const ElementKey& a, const ElementKey& b) {
        if (a.leaf != b.leaf) return a.leaf < b.leaf;
        return a.element < b.element;
    }
};

struct ResolvedGate {
    std::string label;
    GateKind kind = GateKind::Place;
    ElementKey element;               // representative at resolve time
    std::optional<Sort> token_sort;   // known for place gates of net leaves
};

struct ResolvedModule {
    struct Leaf {
        std::string name;
        const NetSchema* schema = nullptr;  // null for opaque leaves
    };

    std::vector<Leaf> leaves;
    std::map<ElementKey, ElementKey> parent;  // union-find forest
    std::vector<ResolvedGate> left;
    std::vector<ResolvedGate> right;

    ElementKey find(ElementKey k) const {
        auto it = parent.find(k);
        while (it != parent.end() && !(it->second == k)) {
            k = it->second;
            it = parent.find(k);
        }
        return k;
    }

    void unite(const ElementKey& a, const ElementKey& b) {
        ElementKey ra = find(a), rb = find(b);
        if (ra == rb) return;
        if (rb < ra) std::swap(ra, rb);
        parent[rb] = ra;
    }

    // Fully qualified members of the class containing `k`.
    std::vector<ElementKey> class_of(const ElementKey& k) const {
        ElementKey root = find(k);
        std::vector<ElementKey> out{root};
        for (const auto& [child, p] : parent)
            if (find(child) == root && !(child == root)) out.push_back(child);
        std::sort(out.begin(), out.end());
        return out;
    }

    // All classes of size >= 2, i.e. the elements created by gluing.
    std::vector<std::vector<ElementKey>> fused_classes() const {
        std::map<ElementKey, std::vector<ElementKey>> buckets;
        for (const auto& [child, p] : parent) buckets[find(child)].push_back(child);
        std::vector<std::vector<ElementKey>> out;
        for (auto& [root, members] : buckets) {
            members.push_back(root);
            std::sort(members.begin(), members.end());
            members.erase(std::unique(members.begin(), members.end()), members.end());
            if (members.size() >= 2) out.push_back(std::move(members));
        }
        std::sort(out.begin(), out.end());
        return out;
    }
};

namespace detail {

inline std::string opaque_element(const char* side, const std::string& label) {
    return std::string(side) + ":" + label;
}

inline ResolvedModule resolve(const Module& m, std::size_t leaf_offset);

inline std::vector<ResolvedGate> resolve_side(const Module& m, std::size_t leaf_offset,
                                              const std::vector<Gate>& side, const char* side_name) {
    std::vector<ResolvedGate> out;
    for (const auto& g : side) {
        ResolvedGate rg;
        rg.label = g.label;
        rg.kind = g.kind;
        if (m.is_net()) {
            rg.element = {leaf_offset, g.bound_element};
            if (g.kind == GateKind::Place)
                rg.token_sort = m.net_inner().find_place(g.bound_element)->token_sort;
        } else {
            rg.element = {leaf_offset, opaque_element(side_name, g.label)};
        }
        out.push_back(std::move(rg));
    }
    return out;
}

inline ResolvedModule resolve(const Module& m, std::size_t leaf_offset) {
    ResolvedModule out;
    if (!m.is_composite()) {
        out.leaves.push_back({m.name(), m.is_net() ? &m.net_inner() : nullptr});
        out.left = resolve_side(m, leaf_offset, m.surface().left, "left");
        out.right = resolve_side(m, leaf_offset, m.surface().right, "right");
        return out;
    }

    const auto& inner = m.composite_inner();
    ResolvedModule l = resolve(*inner.left, leaf_offset);
    ResolvedModule r = resolve(*inner.right, leaf_offset + l.leaves.size());

    out.leaves = l.leaves;
    out.leaves.insert(out.leaves.end(), r.leaves.begin(), r.leaves.end());
    out.parent = l.parent;
    out.parent.insert(r.parent.begin(), r.parent.end());

    std::set<std::string> fused;
    for (const auto& pair : inner.glue) {
        const ResolvedGate* lg = nullptr;
        const ResolvedGate* rg = nullptr;
        for (const auto& g : l.right)
            if (g.label == pair.label) lg = &g;
        for (const auto& g : r.left)
            if (g.label == pair.label) rg = &g;
        if (!lg || !rg)
            throw CompositionError("module " + m.name() + ": glue references missing gate " + pair.label);
        if (lg->kind != rg->kind)
            throw CompositionError("gate " + pair.label + ": " + gate_kind_str(lg->kind) +
                                   " glued to " + gate_kind_str(rg->kind));
        if (lg->token_sort && rg->token_sort && !(*lg->token_sort == *rg->token_sort))
            throw CompositionError("gate " + pair.label + ": fused places hold " +
                                   lg->token_sort->str() + " and " + rg->token_sort->str());
        out.unite(lg->element, rg->element);
        fused.insert(pair.label);
    }

    // Surface of the composition, left-operand gates first on both sides:
    // *l followed by the unmatched gates of *r; the unmatched gates of l*
    // followed by r*. The order carries no meaning, it only keeps
    // composites deterministic.
    out.left = l.left;
    for (const auto& g : r.left)
        if (!fused.count(g.label)) out.left.push_back(g);
    for (const auto& g : l.right)
        if (!fused.count(g.label)) out.right.push_back(g);
    for (const auto& g : r.right) out.right.push_back(g);

    auto check_dup = [&](const std::vector<ResolvedGate>& side, const char* which) {
        std::set<std::string> seen;
        for (const auto& g : side)
            if (!seen.insert(g.label).second)
                throw CompositionError("composition " + m.name() + ": duplicate label " + g.label +
                                       " on the resulting " + which + " interface");
    };
    check_dup(out.left, "left");
    check_dup(out.right, "right");

    // Gates whose class gained a sorted member propagate that sort upward.
    auto refresh = [&](std::vector<ResolvedGate>& side, const std::vector<ResolvedGate>& l_side,
                       const std::vector<ResolvedGate>& r_side) {
        for (auto& g : side) {
            if (g.token_sort) continue;
            for (const auto* pool : {&l_side, &r_side})
                for (const auto& other : *pool)
                    if (other.token_sort && out.find(other.element) == out.find(g.element))
                        g.token_sort = other.token_sort;
        }
    };
    refresh(out.left, l.right, r.left);
    refresh(out.right, l.right, r.left);
    return out;
}

}  // namespace detail

inline ResolvedModule resolve(const Module& m) { return detail::resolve(m, 0); }

// Glues the equally labelled gates of l's right interface and r's left
// interface into inner elements of the composition. Fused place gates must
// agree on token sorts, fused gates on kinds, and net signatures on shared
// symbols.
inline Module compose(const Module& l, const Module& r) {
    std::vector<GluePair> glue;
    for (const auto& lg : l.surface().right) {
        const Gate* rg = r.surface().find(r.surface().left, lg.label);
        if (!rg) continue;
        if (lg.kind != rg->kind)
            throw CompositionError("gate " + lg.label + ": " + gate_kind_str(lg.kind) +
                                   " glued to " + gate_kind_str(rg->kind));
        glue.push_back({lg.label, lg.kind});
    }

    std::set<std::string> fused;
    for (const auto& pair : glue) fused.insert(pair.label);

    Surface surface;
    auto strip = [](const Gate& g) { return Gate{g.label, g.kind, ""}; };
    for (const auto& g : l.surface().left) surface.left.push_back(strip(g));
    for (const auto& g : r.surface().left)
        if (!fused.count(g.label)) surface.left.push_back(strip(g));
    for (const auto& g : l.surface().right)
        if (!fused.count(g.label)) surface.right.push_back(strip(g));
    for (const auto& g : r.surface().right) surface.right.push_back(strip(g));

    Module::Composite inner{std::make_shared<Module>(l), std::make_shared<Module>(r),
                            std::move(glue)};
    Module out = Module::composite(l.name() + "." + r.name(), std::move(surface), std::move(inner));

    // Resolving validates sorts, kinds and label uniqueness across nesting.
    ResolvedModule resolved = resolve(out);

    // Signatures of net leaves must agree on shared symbols.
    const NetSchema* previous = nullptr;
    for (const auto& leaf : resolved.leaves) {
        if (!leaf.schema) continue;
        if (previous) {
            ValidationReport compat = previous->signature.compatible_with(leaf.schema->signature);
            if (!compat.ok())
                throw CompositionError("signatures of " + previous->name + " and " +
                                       leaf.schema->name + " conflict:\n" + compat.str());
        }
        previous = leaf.schema;
    }
    return out;
}

// Deletes the inner structure of a module, keeping name and surface.
inline Module abstract(const Module& m) {
    return Module::opaque(m.name(), m.surface());
}

// --- canonical equality ----------------------------------------------------

namespace detail {

struct CanonicalGate {
    std::string label;
    GateKind kind;
    std::vector<ElementKey> element_class;

    friend bool operator==(const CanonicalGate& a, const CanonicalGate& b) {
        return a.label == b.label && a.kind == b.kind && a.element_class == b.element_class;
    }
    friend bool operator<(const CanonicalGate& a, const CanonicalGate& b) {
        if (a.label != b.label) return a.label < b.label;
        if (a.kind != b.kind) return a.kind < b.kind;
        return a.element_class < b.element_class;
    }
};

struct CanonicalForm {
    std::vector<std::pair<std::string, bool>> leaf_names;  // (name, is_net)
    std::vector<const NetSchema*> leaf_nets;               // null for opaque
    std::vector<std::vector<ElementKey>> classes;
    std::vector<CanonicalGate> left, right;
};

inline CanonicalForm canonical_form(const Module& m) {
    ResolvedModule r = resolve(m);
    CanonicalForm out;
    for (const auto& leaf : r.leaves) {
        out.leaf_names.push_back({leaf.name, leaf.schema != nullptr});
        out.leaf_nets.push_back(leaf.schema);
    }
    out.classes = r.fused_classes();
    auto side = [&](const std::vector<ResolvedGate>& gates) {
        std::vector<CanonicalGate> cs;
        for (const auto& g : gates) cs.push_back({g.label, g.kind, r.class_of(g.element)});
        std::sort(cs.begin(), cs.end());
        return cs;
    };
    out.left = side(r.left);
    out.right = side(r.right);
    return out;
}

inline bool canonical_forms_equal(const CanonicalForm& a, const CanonicalForm& b) {
    if (a.leaf_names != b.leaf_names) return false;
    for (std::size_t i = 0; i < a.leaf_nets.size(); ++i) {
        if ((a.leaf_nets[i] == nullptr) != (b.leaf_nets[i] == nullptr)) return false;
        if (a.leaf_nets[i] && !(*a.leaf_nets[i] == *b.leaf_nets[i])) return false;
    }
    return a.classes == b.classes && a.left == b.left && a.right == b.right;
}

}  // namespace detail

// Identity after canonicalization: nesting dissolved into leaves plus a
// fusion partition over fully qualified element names, surfaces compared
// as label-ordered sequences per side.
inline bool canonical_equal(const Module& a, const Module& b) {
    return detail::canonical_forms_equal(detail::canonical_form(a), detail::canonical_form(b));
}

// --- flattening --------------------------------------------------------------

namespace detail {

// Merged-element display names: the bare inner name when unambiguous,
// otherwise qualified by the owning leaf.
class ElementNamer {
  public:
    void reserve(const ElementKey& root, const std::vector<ElementKey>& members,
                 const std::vector<ResolvedModule::Leaf>& leaves) {
        std::set<std::string> bare;
        for (const auto& k : members) bare.insert(k.element);
        // A fused class keeps the shared gate/element name when unique.
        std::string candidate = *bare.begin();
        candidates_[root] = {candidate, members.front(), leaves[members.front().leaf].name};
        tally_[candidate]++;
    }

    std::map<ElementKey, std::string> assign() {
        std::map<ElementKey, std::string> names;
        std::set<std::string> used;
        for (const auto& [root, c] : candidates_) {
            std::string name = tally_[c.bare] == 1 ? c.bare : c.leaf_name + "." + c.smallest.element;
            while (used.count(name)) name = std::to_string(c.smallest.leaf) + "." + name;
            used.insert(name);
            names[root] = name;
        }
        return names;
    }

  private:
    struct Candidate {
        std::string bare;
        ElementKey smallest;
        std::string leaf_name;
    };
    std::map<ElementKey, Candidate> candidates_;
    std::map<std::string, std::size_t> tally_;
};

}  // namespace detail

// Dissolves a fully net-inner module into a single schema over the union
// signature. Fused gates become single merged places/transitions carrying
// the union of arcs (guards conjoined); everything unfused is preserved.
inline NetSchema flatten(const Module& m) {
    ResolvedModule r = resolve(m);
    for (const auto& leaf : r.leaves)
        if (!leaf.schema)
            throw CompositionError("cannot flatten: leaf module " + leaf.name + " is opaque");

    NetSchema out;
    out.name = m.name();
    for (const auto& leaf : r.leaves) {
        ValidationReport compat = out.signature.compatible_with(leaf.schema->signature);
        if (!compat.ok())
            throw CompositionError("signature conflict at leaf " + leaf.name + ":\n" + compat.str());
        out.signature = Signature::merged(out.signature, leaf.schema->signature);
    }

    // Group elements by fusion class, tracked separately per kind.
    std::map<ElementKey, std::vector<std::pair<ElementKey, const Place*>>> place_classes;
    std::map<ElementKey, std::vector<std::pair<ElementKey, const Transition*>>> transition_classes;
    for (std::size_t i = 0; i < r.leaves.size(); ++i) {
        for (const auto& p : r.leaves[i].schema->places)
            place_classes[r.find({i, p.name})].push_back({{i, p.name}, &p});
        for (const auto& t : r.leaves[i].schema->transitions)
            transition_classes[r.find({i, t.name})].push_back({{i, t.name}, &t});
    }

    detail::ElementNamer place_namer, transition_namer;
    for (auto& [root, members] : place_classes) {
        std::sort(members.begin(), members.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<ElementKey> keys;
        for (const auto& [k, p] : members) keys.push_back(k);
        place_namer.reserve(root, keys, r.leaves);
    }
    for (auto& [root, members] : transition_classes) {
        std::sort(members.begin(), members.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<ElementKey> keys;
        for (const auto& [k, t] : members) keys.push_back(k);
        transition_namer.reserve(root, keys, r.leaves);
    }
    std::map<ElementKey, std::string> place_names = place_namer.assign();
    std::map<ElementKey, std::string> transition_names = transition_namer.assign();

    for (const auto& [root, members] : place_classes) {
        const Place* first = members.front().second;
        for (const auto& [key, place] : members)
            if (!(place->token_sort == first->token_sort))
                throw CompositionError("fused place " + place_names[root] + " holds " +
                                       first->token_sort.str() + " and " + place->token_sort.str());
        out.places.push_back({place_names[root], first->token_sort});
    }
    std::sort(out.places.begin(), out.places.end(),
              [](const Place& a, const Place& b) { return a.name < b.name; });

    for (const auto& [root, members] : transition_classes) {
        Transition merged;
        merged.name = transition_names[root];
        std::vector<Term> guard_parts;
        for (const auto& [key, t] : members) {
            if (!t->guard.is_truth()) guard_parts.push_back(t->guard);
            auto add_arcs = [&](const std::map<std::string, ArcInscription>& arcs,
                                std::map<std::string, ArcInscription>& into) {
                for (const auto& [place, items] : arcs) {
                    auto named = place_names.find(r.find({key.leaf, place}));
                    if (named == place_names.end())
                        throw CompositionError("transition " + t->name + " of leaf " +
                                               r.leaves[key.leaf].name + " references unknown place " +
                                               place);
                    auto& inscription = into[named->second];
                    inscription.insert(inscription.end(), items.begin(), items.end());
                }
            };
            add_arcs(t->input_arcs, merged.input_arcs);
            add_arcs(t->output_arcs, merged.output_arcs);
        }
        merged.guard = guard_parts.empty()
                           ? Term::truth()
                           : (guard_parts.size() == 1 ? guard_parts[0]
                                                      : Term::conjunction(std::move(guard_parts)));
        out.transitions.push_back(std::move(merged));
    }
    std::sort(out.transitions.begin(), out.transitions.end(),
              [](const Transition& a, const Transition& b) { return a.name < b.name; });

    // Initial markings of merged places are multiset-unioned in leaf order.
    for (const auto& [root, members] : place_classes) {
        ArcInscription items;
        for (const auto& [key, place] : members) {
            const auto& init = r.leaves[key.leaf].schema->initial_marking;
            auto it = init.find(key.element);
            if (it != init.end()) items.insert(items.end(), it->second.begin(), it->second.end());
        }
        if (!items.empty()) out.initial_marking[place_names.at(root)] = std::move(items);
    }
    return out;
}

}  // namespace heraklit
