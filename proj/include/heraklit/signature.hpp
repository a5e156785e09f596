#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "heraklit/report.hpp"
#include "heraklit/sorts.hpp"
#include "heraklit/term.hpp"

namespace heraklit {

struct FunctionType {
    std::vector<Sort> arguments;
    Sort result;

    friend bool operator==(const FunctionType& a, const FunctionType& b) {
        return a.arguments == b.arguments && a.result == b.result;
    }
};

// A sorted symbol vocabulary: basic sorts, constants, functions, variables,
// plus boolean requirement terms that every instantiation must satisfy.
// All symbol namespaces are pairwise disjoint.
struct Signature {
    std::set<std::string> sorts;
    std::map<std::string, Sort> constants;
    std::map<std::string, FunctionType> functions;
    std::map<std::string, Sort> variables;
    std::vector<Term> requirements;

    bool declares_sort(const std::string& name) const { return sorts.count(name) > 0; }

    // True when every basic sort mentioned by `s` is declared and powersets
    // take basic arguments only.
    bool sort_valid(const Sort& s) const {
        switch (s.kind()) {
            case Sort::Kind::Boolean: return true;
            case Sort::Kind::Basic: return declares_sort(s.name());
            case Sort::Kind::Powerset: return declares_sort(s.name());
            case Sort::Kind::Tuple:
                for (const auto& c : s.components())
                    if (!sort_valid(c)) return false;
                return true;
        }
        return false;
    }

    ValidationReport validate() const {
        ValidationReport report;
        std::map<std::string, std::string> seen;
        auto claim = [&](const std::string& name, const std::string& space) {
            auto [it, fresh] = seen.emplace(name, space);
            if (!fresh)
                report.add(name, "symbol declared both as " + it->second + " and as " + space);
        };
        for (const auto& s : sorts) claim(s, "sort");
        for (const auto& [name, sort] : constants) {
            claim(name, "constant");
            if (!sort_valid(sort)) report.add(name, "constant references undeclared sort " + sort.str());
        }
        for (const auto& [name, type] : functions) {
            claim(name, "function");
            for (const auto& arg : type.arguments)
                if (!sort_valid(arg)) report.add(name, "argument references undeclared sort " + arg.str());
            if (!sort_valid(type.result)) report.add(name, "result references undeclared sort " + type.result.str());
        }
        for (const auto& [name, sort] : variables) {
            claim(name, "variable");
            if (!sort_valid(sort)) report.add(name, "variable references undeclared sort " + sort.str());
        }
        for (std::size_t i = 0; i < requirements.size(); ++i) {
            const Term& req = requirements[i];
            std::string subject = "requirement " + req.str();
            if (!req.free_variables().empty()) {
                report.add(subject, "requirements must be variable-free");
                continue;
            }
            auto sort = sort_of(req);
            if (!sort)
                report.add(subject, sort.error());
            else if (!sort->is_boolean())
                report.add(subject, "requirement is not boolean");
        }
        return report;
    }

    // Minimal expected-or-error carrier for sort checking.
    class SortResult {
      public:
        SortResult(Sort sort) : sort_(std::move(sort)) {}
        static SortResult failure(std::string message) {
            SortResult r;
            r.error_ = std::move(message);
            return r;
        }
        explicit operator bool() const { return sort_.has_value(); }
        const Sort& operator*() const { return *sort_; }
        const Sort* operator->() const { return &*sort_; }
        const std::string& error() const { return error_; }

      private:
        SortResult() = default;
        std::optional<Sort> sort_;
        std::string error_;
    };

    // Sort of a term under this signature, or a diagnostic. Membership wants
    // an element of the powerset's basic sort; subset wants two like-sorted
    // powerset terms; conjunctions want boolean conjuncts.
    SortResult sort_of(const Term& t) const {
        switch (t.kind()) {
            case Term::Kind::Variable: {
                auto it = variables.find(t.symbol());
                if (it == variables.end())
                    return SortResult::failure("unknown variable " + t.symbol());
                return it->second;
            }
            case Term::Kind::Constant: {
                auto it = constants.find(t.symbol());
                if (it == constants.end())
                    return SortResult::failure("unknown constant " + t.symbol());
                return it->second;
            }
            case Term::Kind::Apply: {
                auto it = functions.find(t.symbol());
                if (it == functions.end())
                    return SortResult::failure("unknown function " + t.symbol());
                const FunctionType& type = it->second;
                if (type.arguments.size() != t.args().size())
                    return SortResult::failure("function " + t.symbol() + " expects " +
                                               std::to_string(type.arguments.size()) + " arguments");
                for (std::size_t i = 0; i < t.args().size(); ++i) {
                    auto arg = sort_of(t.args()[i]);
                    if (!arg) return arg;
                    if (*arg != type.arguments[i])
                        return SortResult::failure("argument " + std::to_string(i + 1) + " of " +
                                                   t.symbol() + " has sort " + arg->str() +
                                                   ", expected " + type.arguments[i].str());
                }
                return type.result;
            }
            case Term::Kind::Tuple: {
                std::vector<Sort> components;
                for (const auto& a : t.args()) {
                    auto s = sort_of(a);
                    if (!s) return s;
                    components.push_back(*s);
                }
                return Sort::tuple(std::move(components));
            }
            case Term::Kind::Membership: {
                auto elem = sort_of(t.args()[0]);
                if (!elem) return elem;
                auto set = sort_of(t.args()[1]);
                if (!set) return set;
                if (!set->is_powerset())
                    return SortResult::failure("right side of `in` has sort " + set->str() +
                                               ", expected a set sort");
                if (!elem->is_basic() || elem->name() != set->name())
                    return SortResult::failure("element sort " + elem->str() +
                                               " does not match set sort " + set->str());
                return Sort::boolean();
            }
            case Term::Kind::Equality: {
                auto lhs = sort_of(t.args()[0]);
                if (!lhs) return lhs;
                auto rhs = sort_of(t.args()[1]);
                if (!rhs) return rhs;
                if (*lhs != *rhs)
                    return SortResult::failure("cannot compare sorts " + lhs->str() + " and " + rhs->str());
                return Sort::boolean();
            }
            case Term::Kind::SubsetOf: {
                auto lhs = sort_of(t.args()[0]);
                if (!lhs) return lhs;
                auto rhs = sort_of(t.args()[1]);
                if (!rhs) return rhs;
                if (!lhs->is_powerset() || !rhs->is_powerset() || lhs->name() != rhs->name())
                    return SortResult::failure("subset needs two like-sorted set terms, got " +
                                               lhs->str() + " and " + rhs->str());
                return Sort::boolean();
            }
            case Term::Kind::Conjunction: {
                for (const auto& a : t.args()) {
                    auto s = sort_of(a);
                    if (!s) return s;
                    if (!s->is_boolean())
                        return SortResult::failure("conjunct " + a.str() + " is not boolean");
                }
                return Sort::boolean();
            }
        }
        return SortResult::failure("unreachable term kind");
    }

    // Shared-symbol compatibility: used when composing modules whose nets
    // were written against different signature fragments.
    ValidationReport compatible_with(const Signature& other) const {
        ValidationReport report;
        for (const auto& [name, sort] : constants) {
            auto it = other.constants.find(name);
            if (it != other.constants.end() && !(it->second == sort))
                report.add(name, "constant declared with sorts " + sort.str() + " and " + it->second.str());
        }
        for (const auto& [name, type] : functions) {
            auto it = other.functions.find(name);
            if (it != other.functions.end() && !(it->second == type))
                report.add(name, "function declared with conflicting types");
        }
        for (const auto& [name, sort] : variables) {
            auto it = other.variables.find(name);
            if (it != other.variables.end() && !(it->second == sort))
                report.add(name, "variable declared with sorts " + sort.str() + " and " + it->second.str());
        }
        return report;
    }

    // Union of two compatible signatures. Requirements concatenate, with
    // duplicates dropped.
    static Signature merged(const Signature& a, const Signature& b) {
        Signature out = a;
        out.sorts.insert(b.sorts.begin(), b.sorts.end());
        out.constants.insert(b.constants.begin(), b.constants.end());
        out.functions.insert(b.functions.begin(), b.functions.end());
        out.variables.insert(b.variables.begin(), b.variables.end());
        for (const auto& req : b.requirements) {
            bool present = false;
            for (const auto& have : out.requirements)
                if (have == req) present = true;
            if (!present) out.requirements.push_back(req);
        }
        return out;
    }

    friend bool operator==(const Signature& a, const Signature& b) {
        return a.sorts == b.sorts && a.constants == b.constants && a.functions == b.functions &&
               a.variables == b.variables && a.requirements == b.requirements;
    }
};

}  // namespace heraklit
