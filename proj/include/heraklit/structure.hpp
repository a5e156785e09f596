#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "heraklit/error.hpp"
#include "heraklit/multiset.hpp"
#include "heraklit/report.hpp"
#include "heraklit/signature.hpp"
#include "heraklit/value.hpp"

namespace heraklit {

// Assignment of values to variables.
using Binding = std::map<std::string, Value>;

inline std::string binding_str(const Binding& b) {
    std::string out = "{";
    bool first = true;
    for (const auto& [name, value] : b) {
        if (!first) out += ", ";
        first = false;
        out += name + ": " + value.str();
    }
    return out + "}";
}

struct FunctionTable {
    std::map<std::vector<Value>, Value> entries;

    friend bool operator==(const FunctionTable& a, const FunctionTable& b) {
        return a.entries == b.entries;
    }
};

// An instantiation of a signature: finite carriers of named atoms for the
// basic sorts, plus values for every constant and a total table for every
// function symbol.
struct Structure {
    Signature signature;
    std::map<std::string, std::vector<Value>> carriers;  // basic sort -> sorted atoms
    std::map<std::string, Value> constant_values;
    std::map<std::string, FunctionTable> function_tables;

    void set_carrier(const std::string& sort, const std::vector<std::string>& atom_ids) {
        std::vector<Value> atoms;
        atoms.reserve(atom_ids.size());
        for (const auto& id : atom_ids) atoms.push_back(Value::atom(id, sort));
        std::sort(atoms.begin(), atoms.end());
        atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
        carriers[sort] = std::move(atoms);
    }

    const std::vector<Value>& carrier(const std::string& sort) const {
        static const std::vector<Value> empty;
        auto it = carriers.find(sort);
        return it == carriers.end() ? empty : it->second;
    }

    bool carrier_has(const std::string& sort, const Value& atom) const {
        const auto& c = carrier(sort);
        return std::binary_search(c.begin(), c.end(), atom);
    }

    friend bool operator==(const Structure& a, const Structure& b) {
        return a.signature == b.signature && a.carriers == b.carriers &&
               a.constant_values == b.constant_values && a.function_tables == b.function_tables;
    }

    // Does `v` inhabit sort `s`? Includes carrier membership for atoms.
    bool inhabits(const Value& v, const Sort& s) const {
        switch (s.kind()) {
            case Sort::Kind::Boolean: return v.is_boolean();
            case Sort::Kind::Basic:
                return v.is_atom() && v.as_atom().sort == s.name() && carrier_has(s.name(), v);
            case Sort::Kind::Powerset: {
                if (!v.is_set()) return false;
                Sort elem = Sort::basic(s.name());
                for (const auto& e : v.elements())
                    if (!inhabits(e, elem)) return false;
                return true;
            }
            case Sort::Kind::Tuple: {
                if (!v.is_tuple()) return false;
                const auto& cs = v.components();
                if (cs.size() != s.components().size()) return false;
                for (std::size_t i = 0; i < cs.size(); ++i)
                    if (!inhabits(cs[i], s.components()[i])) return false;
                return true;
            }
        }
        return false;
    }

    // Every value of a sort, in canonical order. Powerset sorts enumerate
    // all subsets of the carrier, so they are capped to keep binding
    // enumeration tractable.
    std::vector<Value> enumerate(const Sort& s) const {
        switch (s.kind()) {
            case Sort::Kind::Boolean: return {Value::boolean(false), Value::boolean(true)};
            case Sort::Kind::Basic: return carrier(s.name());
            case Sort::Kind::Powerset: {
                const auto& atoms = carrier(s.name());
                if (atoms.size() > 16)
                    throw ModelError("carrier of " + s.name() + " too large to enumerate subsets");
                std::vector<Value> out;
                out.reserve(std::size_t(1) << atoms.size());
                for (std::size_t mask = 0; mask < (std::size_t(1) << atoms.size()); ++mask) {
                    std::vector<Value> elems;
                    for (std::size_t i = 0; i < atoms.size(); ++i)
                        if (mask & (std::size_t(1) << i)) elems.push_back(atoms[i]);
                    out.push_back(Value::set(std::move(elems)));
                }
                std::sort(out.begin(), out.end());
                return out;
            }
            case Sort::Kind::Tuple: {
                std::vector<Value> out;
                std::vector<std::vector<Value>> pools;
                for (const auto& c : s.components()) pools.push_back(enumerate(c));
                std::vector<std::size_t> idx(pools.size(), 0);
                for (const auto& pool : pools)
                    if (pool.empty()) return {};
                while (true) {
                    std::vector<Value> tupled;
                    for (std::size_t i = 0; i < pools.size(); ++i) tupled.push_back(pools[i][idx[i]]);
                    out.push_back(Value::tuple(std::move(tupled)));
                    std::size_t i = pools.size();
                    while (i > 0) {
                        --i;
                        if (++idx[i] < pools[i].size()) break;
                        idx[i] = 0;
                        if (i == 0) {
                            std::sort(out.begin(), out.end());
                            return out;
                        }
                    }
                }
            }
        }
        return {};
    }
};

// Standard first-order evaluation. Unbound variables and sort mismatches
// indicate a malformed model and raise EvalError.
inline Value eval_term(const Term& t, const Structure& st, const Binding& binding) {
    switch (t.kind()) {
        case Term::Kind::Variable: {
            auto it = binding.find(t.symbol());
            if (it == binding.end()) throw EvalError("unbound variable " + t.symbol());
            return it->second;
        }
        case Term::Kind::Constant: {
            auto it = st.constant_values.find(t.symbol());
            if (it == st.constant_values.end())
                throw EvalError("constant " + t.symbol() + " has no interpretation");
            return it->second;
        }
        case Term::Kind::Apply: {
            auto it = st.function_tables.find(t.symbol());
            if (it == st.function_tables.end())
                throw EvalError("function " + t.symbol() + " has no interpretation");
            std::vector<Value> args;
            args.reserve(t.args().size());
            for (const auto& a : t.args()) args.push_back(eval_term(a, st, binding));
            auto entry = it->second.entries.find(args);
            if (entry == it->second.entries.end()) {
                std::string key;
                for (const auto& a : args) key += (key.empty() ? "" : ", ") + a.str();
                throw EvalError("function " + t.symbol() + " undefined at (" + key + ")");
            }
            return entry->second;
        }
        case Term::Kind::Tuple: {
            std::vector<Value> components;
            components.reserve(t.args().size());
            for (const auto& a : t.args()) components.push_back(eval_term(a, st, binding));
            return Value::tuple(std::move(components));
        }
        case Term::Kind::Membership: {
            Value elem = eval_term(t.args()[0], st, binding);
            Value set = eval_term(t.args()[1], st, binding);
            if (!set.is_set()) throw EvalError("right side of `in` is not a set: " + set.str());
            return Value::boolean(set.set_contains(elem));
        }
        case Term::Kind::Equality: {
            Value lhs = eval_term(t.args()[0], st, binding);
            Value rhs = eval_term(t.args()[1], st, binding);
            return Value::boolean(lhs == rhs);
        }
        case Term::Kind::SubsetOf: {
            Value lhs = eval_term(t.args()[0], st, binding);
            Value rhs = eval_term(t.args()[1], st, binding);
            if (!lhs.is_set() || !rhs.is_set())
                throw EvalError("subset needs two sets, got " + lhs.str() + " and " + rhs.str());
            for (const auto& e : lhs.elements())
                if (!rhs.set_contains(e)) return Value::boolean(false);
            return Value::boolean(true);
        }
        case Term::Kind::Conjunction: {
            for (const auto& a : t.args()) {
                Value v = eval_term(a, st, binding);
                if (!v.is_boolean()) throw EvalError("conjunct " + a.str() + " is not boolean");
                if (!v.as_boolean()) return Value::boolean(false);
            }
            return Value::boolean(true);
        }
    }
    throw EvalError("unreachable term kind");
}

inline bool eval_guard(const Term& guard, const Structure& st, const Binding& binding) {
    Value v = eval_term(guard, st, binding);
    if (!v.is_boolean()) throw EvalError("guard " + guard.str() + " is not boolean");
    return v.as_boolean();
}

// Checks every Structure invariant: all symbols assigned, assignments
// respect declared sorts, function tables total over the carrier product,
// and every requirement evaluates to true.
inline ValidationReport validate_structure(const Signature& sig, const Structure& st) {
    ValidationReport report = sig.validate();

    for (const auto& sort : sig.sorts)
        if (st.carriers.find(sort) == st.carriers.end())
            report.add(sort, "carrier of sort " + sort + " unassigned");
    for (const auto& [sort, atoms] : st.carriers) {
        if (!sig.declares_sort(sort)) {
            report.add(sort, "carrier for undeclared sort " + sort);
            continue;
        }
        for (const auto& atom : atoms)
            if (!atom.is_atom() || atom.as_atom().sort != sort)
                report.add(sort, "carrier element " + atom.str() + " is not an atom of " + sort);
    }

    for (const auto& [name, sort] : sig.constants) {
        auto it = st.constant_values.find(name);
        if (it == st.constant_values.end()) {
            report.add(name, "constant " + name + " unassigned");
            continue;
        }
        if (!st.inhabits(it->second, sort))
            report.add(name, "value " + it->second.str() + " does not inhabit " + sort.str());
    }

    for (const auto& [name, type] : sig.functions) {
        auto it = st.function_tables.find(name);
        if (it == st.function_tables.end()) {
            report.add(name, "function " + name + " unassigned");
            continue;
        }
        const FunctionTable& table = it->second;
        for (const auto& [args, result] : table.entries) {
            if (args.size() != type.arguments.size()) {
                report.add(name, "table entry with wrong arity");
                continue;
            }
            bool args_ok = true;
            for (std::size_t i = 0; i < args.size(); ++i)
                if (!st.inhabits(args[i], type.arguments[i])) args_ok = false;
            if (!args_ok) {
                report.add(name, "table entry with out-of-carrier arguments");
                continue;
            }
            if (!st.inhabits(result, type.result))
                report.add(name, "table value " + result.str() + " does not inhabit " + type.result.str());
        }
        // Totality over the carrier product of the argument sorts.
        std::vector<std::vector<Value>> pools;
        bool enumerable = true;
        for (const auto& arg : type.arguments) {
            try {
                pools.push_back(st.enumerate(arg));
            } catch (const ModelError&) {
                enumerable = false;
                break;
            }
        }
        if (!enumerable) continue;
        std::vector<std::size_t> idx(pools.size(), 0);
        bool done = false;
        for (const auto& pool : pools)
            if (pool.empty()) done = true;
        while (!done) {
            std::vector<Value> args;
            for (std::size_t i = 0; i < pools.size(); ++i) args.push_back(pools[i][idx[i]]);
            if (table.entries.find(args) == table.entries.end()) {
                std::string key;
                for (const auto& a : args) key += (key.empty() ? "" : ", ") + a.str();
                report.add(name, "function " + name + " undefined at (" + key + ")");
            }
            std::size_t i = pools.size();
            while (i > 0) {
                --i;
                if (++idx[i] < pools[i].size()) break;
                idx[i] = 0;
                if (i == 0) done = true;
            }
            if (pools.empty()) done = true;
        }
    }

    if (report.ok()) {
        for (const auto& req : sig.requirements) {
            try {
                if (!eval_guard(req, st, {}))
                    report.add("requirement " + req.str(), "requirement evaluates to false");
            } catch (const EvalError& e) {
                report.add("requirement " + req.str(), e.what());
            }
        }
    }
    return report;
}

}  // namespace heraklit
