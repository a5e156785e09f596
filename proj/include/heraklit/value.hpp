#pragma once

#include <algorithm>
#include <string>
#include <variant>
#include <vector>

#include "heraklit/error.hpp"
#include "heraklit/sorts.hpp"

namespace heraklit {

// A concrete token value: an atom of a basic sort, a tuple, a finite set,
// or a boolean. Atoms are identified by (identifier, sort); atoms of
// different sorts never compare equal. Sets keep their elements sorted
// and distinct.
class Value {
  public:
    struct Atom {
        std::string id;
        std::string sort;
    };

    static Value atom(std::string id, std::string sort) {
        Value v;
        v.rep_ = Atom{std::move(id), std::move(sort)};
        return v;
    }

    static Value tuple(std::vector<Value> components) {
        if (components.size() < 2)
            throw ModelError("tuple value needs at least two components");
        Value v;
        v.rep_ = Tuple{std::move(components)};
        return v;
    }

    static Value set(std::vector<Value> elements) {
        std::sort(elements.begin(), elements.end());
        elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
        Value v;
        v.rep_ = Set{std::move(elements)};
        return v;
    }

    static Value boolean(bool b) {
        Value v;
        v.rep_ = b;
        return v;
    }

    bool is_atom() const { return std::holds_alternative<Atom>(rep_); }
    bool is_tuple() const { return std::holds_alternative<Tuple>(rep_); }
    bool is_set() const { return std::holds_alternative<Set>(rep_); }
    bool is_boolean() const { return std::holds_alternative<bool>(rep_); }

    const Atom& as_atom() const { return std::get<Atom>(rep_); }
    const std::vector<Value>& components() const { return std::get<Tuple>(rep_).components; }
    const std::vector<Value>& elements() const { return std::get<Set>(rep_).elements; }
    bool as_boolean() const { return std::get<bool>(rep_); }

    bool set_contains(const Value& x) const {
        const auto& es = elements();
        return std::binary_search(es.begin(), es.end(), x);
    }

    // Token literal grammar: atom `e1`, tuple `(c1,r1)`, set `{e1,e2}`,
    // booleans `true`/`false`.
    std::string str() const {
        if (is_atom()) return as_atom().id;
        if (is_boolean()) return as_boolean() ? "true" : "false";
        std::string out;
        if (is_tuple()) {
            out = "(";
            const auto& cs = components();
            for (std::size_t i = 0; i < cs.size(); ++i) {
                if (i) out += ",";
                out += cs[i].str();
            }
            return out + ")";
        }
        out = "{";
        const auto& es = elements();
        for (std::size_t i = 0; i < es.size(); ++i) {
            if (i) out += ",";
            out += es[i].str();
        }
        return out + "}";
    }

    friend int compare(const Value& a, const Value& b) {
        int ka = a.kind_rank(), kb = b.kind_rank();
        if (ka != kb) return ka < kb ? -1 : 1;
        switch (ka) {
            case 0: {
                const Atom& x = a.as_atom();
                const Atom& y = b.as_atom();
                if (int c = x.sort.compare(y.sort)) return c < 0 ? -1 : 1;
                if (int c = x.id.compare(y.id)) return c < 0 ? -1 : 1;
                return 0;
            }
            case 1:
                return a.as_boolean() == b.as_boolean() ? 0 : (a.as_boolean() < b.as_boolean() ? -1 : 1);
            case 2: return compare_lists(a.components(), b.components());
            default: return compare_lists(a.elements(), b.elements());
        }
    }

    friend bool operator==(const Value& a, const Value& b) { return compare(a, b) == 0; }
    friend bool operator!=(const Value& a, const Value& b) { return compare(a, b) != 0; }
    friend bool operator<(const Value& a, const Value& b) { return compare(a, b) < 0; }

  private:
    struct Tuple {
        std::vector<Value> components;
    };
    struct Set {
        std::vector<Value> elements;
    };

    int kind_rank() const {
        if (is_atom()) return 0;
        if (is_boolean()) return 1;
        if (is_tuple()) return 2;
        return 3;
    }

    static int compare_lists(const std::vector<Value>& a, const std::vector<Value>& b) {
        std::size_t n = std::min(a.size(), b.size());
        for (std::size_t i = 0; i < n; ++i)
            if (int c = compare(a[i], b[i])) return c;
        if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
        return 0;
    }

    std::variant<Atom, bool, Tuple, Set> rep_;
};

}  // namespace heraklit
