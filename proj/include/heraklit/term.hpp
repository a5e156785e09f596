#pragma once

#include <set>
#include <string>
#include <vector>

#include "heraklit/error.hpp"

namespace heraklit {

// First-order term over a signature. Boolean forms (membership, equality,
// subset, conjunction) serve as guards and requirements. The empty
// conjunction is the constant `true`.
class Term {
  public:
    enum class Kind {
        Variable,
        Constant,
        Apply,
        Tuple,
        Membership,
        Equality,
        Conjunction,
        SubsetOf,
    };

    static Term variable(std::string name) { return Term(Kind::Variable, std::move(name), {}); }
    static Term constant(std::string name) { return Term(Kind::Constant, std::move(name), {}); }

    static Term apply(std::string function, std::vector<Term> args) {
        if (args.empty()) throw ModelError("function application needs arguments");
        return Term(Kind::Apply, std::move(function), std::move(args));
    }

    static Term tuple(std::vector<Term> components) {
        if (components.size() < 2) throw ModelError("tuple term needs at least two components");
        return Term(Kind::Tuple, "", std::move(components));
    }

    static Term membership(Term element, Term set) {
        return Term(Kind::Membership, "", {std::move(element), std::move(set)});
    }

    static Term equality(Term lhs, Term rhs) {
        return Term(Kind::Equality, "", {std::move(lhs), std::move(rhs)});
    }

    static Term conjunction(std::vector<Term> conjuncts) {
        return Term(Kind::Conjunction, "", std::move(conjuncts));
    }

    static Term truth() { return conjunction({}); }

    static Term subset_of(Term lhs, Term rhs) {
        return Term(Kind::SubsetOf, "", {std::move(lhs), std::move(rhs)});
    }

    Kind kind() const { return kind_; }
    const std::string& symbol() const { return symbol_; }
    const std::vector<Term>& args() const { return args_; }

    bool is_truth() const { return kind_ == Kind::Conjunction && args_.empty(); }

    void collect_variables(std::set<std::string>& out) const {
        if (kind_ == Kind::Variable) out.insert(symbol_);
        for (const auto& a : args_) a.collect_variables(out);
    }

    std::set<std::string> free_variables() const {
        std::set<std::string> out;
        collect_variables(out);
        return out;
    }

    std::string str() const {
        switch (kind_) {
            case Kind::Variable:
            case Kind::Constant: return symbol_;
            case Kind::Apply: {
                std::string out = symbol_ + "(";
                for (std::size_t i = 0; i < args_.size(); ++i) {
                    if (i) out += ", ";
                    out += args_[i].str();
                }
                return out + ")";
            }
            case Kind::Tuple: {
                std::string out = "(";
                for (std::size_t i = 0; i < args_.size(); ++i) {
                    if (i) out += ", ";
                    out += args_[i].str();
                }
                return out + ")";
            }
            case Kind::Membership: return infix("in");
            case Kind::Equality: return infix("==");
            case Kind::SubsetOf: return infix("subset");
            case Kind::Conjunction: {
                if (args_.empty()) return "true";
                if (args_.size() == 1) return args_[0].str();
                std::string out;
                for (std::size_t i = 0; i < args_.size(); ++i) {
                    if (i) out += " and ";
                    out += args_[i].str();
                }
                return out;
            }
        }
        return "?";
    }

    friend bool operator==(const Term& a, const Term& b) {
        return a.kind_ == b.kind_ && a.symbol_ == b.symbol_ && a.args_ == b.args_;
    }
    friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }

  private:
    Term(Kind kind, std::string symbol, std::vector<Term> args)
        : kind_(kind), symbol_(std::move(symbol)), args_(std::move(args)) {}

    std::string infix(const std::string& op) const {
        return maybe_paren(args_[0]) + " " + op + " " + maybe_paren(args_[1]);
    }

    static std::string maybe_paren(const Term& t) {
        switch (t.kind_) {
            case Kind::Membership:
            case Kind::Equality:
            case Kind::SubsetOf: return "(" + t.str() + ")";
            case Kind::Conjunction:
                return t.args_.empty() ? t.str() : "(" + t.str() + ")";
            default: return t.str();
        }
    }

    Kind kind_;
    std::string symbol_;
    std::vector<Term> args_;
};

}  // namespace heraklit
