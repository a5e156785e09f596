#pragma once

#include <string>
#include <vector>

#include "heraklit/error.hpp"

namespace heraklit {

// A sort expression over the basic sorts declared in a signature:
// a basic sort by name, the powerset of a basic sort, a tuple of sorts,
// or the boolean sort. Powersets do not nest.
class Sort {
  public:
    enum class Kind { Basic, Powerset, Tuple, Boolean };

    static Sort basic(std::string name) {
        Sort s;
        s.kind_ = Kind::Basic;
        s.name_ = std::move(name);
        return s;
    }

    static Sort powerset(std::string basic_name) {
        Sort s;
        s.kind_ = Kind::Powerset;
        s.name_ = std::move(basic_name);
        return s;
    }

    static Sort tuple(std::vector<Sort> components) {
        if (components.size() < 2)
            throw ModelError("tuple sort needs at least two components");
        Sort s;
        s.kind_ = Kind::Tuple;
        s.components_ = std::move(components);
        return s;
    }

    static Sort boolean() {
        Sort s;
        s.kind_ = Kind::Boolean;
        return s;
    }

    Kind kind() const { return kind_; }

    // Basic: the sort name. Powerset: the element sort name.
    const std::string& name() const { return name_; }
    const std::vector<Sort>& components() const { return components_; }

    bool is_basic() const { return kind_ == Kind::Basic; }
    bool is_powerset() const { return kind_ == Kind::Powerset; }
    bool is_tuple() const { return kind_ == Kind::Tuple; }
    bool is_boolean() const { return kind_ == Kind::Boolean; }

    std::string str() const {
        switch (kind_) {
            case Kind::Basic: return name_;
            case Kind::Powerset: return "set(" + name_ + ")";
            case Kind::Boolean: return "bool";
            case Kind::Tuple: {
                std::string out = "(";
                for (std::size_t i = 0; i < components_.size(); ++i) {
                    if (i) out += ", ";
                    out += components_[i].str();
                }
                return out + ")";
            }
        }
        return "?";
    }

    friend bool operator==(const Sort& a, const Sort& b) {
        return a.kind_ == b.kind_ && a.name_ == b.name_ && a.components_ == b.components_;
    }
    friend bool operator!=(const Sort& a, const Sort& b) { return !(a == b); }
    friend bool operator<(const Sort& a, const Sort& b) {
        if (a.kind_ != b.kind_) return a.kind_ < b.kind_;
        if (a.name_ != b.name_) return a.name_ < b.name_;
        return a.components_ < b.components_;
    }

  private:
    Kind kind_ = Kind::Boolean;
    std::string name_;
    std::vector<Sort> components_;
};

}  // namespace heraklit
