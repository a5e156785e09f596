#pragma once

#include <string>
#include <vector>

namespace heraklit {

struct Violation {
    std::string subject;  // offending symbol, place, transition, requirement
    std::string message;

    friend bool operator==(const Violation& a, const Violation& b) {
        return a.subject == b.subject && a.message == b.message;
    }
};

// Validation outcome: violations are data, not failures.
struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }

    void add(std::string subject, std::string message) {
        violations.push_back({std::move(subject), std::move(message)});
    }

    void merge(const ValidationReport& other) {
        violations.insert(violations.end(), other.violations.begin(), other.violations.end());
    }

    bool mentions(const std::string& subject) const {
        for (const auto& v : violations)
            if (v.subject == subject) return true;
        return false;
    }

    std::string str() const {
        std::string out;
        for (const auto& v : violations) out += v.subject + ": " + v.message + "\n";
        return out;
    }
};

}  // namespace heraklit
