#pragma once

#include <cstddef>
#include <map>
#include <vector>

namespace heraklit {

// Ordered multiset over a totally ordered value type. Places hold these;
// arc inscriptions evaluate to them.
template <typename T, typename Compare = std::less<T>>
class Multiset {
  public:
    using map_type = std::map<T, std::size_t, Compare>;

    Multiset() = default;

    explicit Multiset(const std::vector<T>& items) {
        for (const auto& x : items) add(x);
    }

    void add(const T& x, std::size_t n = 1) {
        if (n == 0) return;
        counts_[x] += n;
        size_ += n;
    }

    std::size_t count(const T& x) const {
        auto it = counts_.find(x);
        return it == counts_.end() ? 0 : it->second;
    }

    std::size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }

    bool contains(const Multiset& other) const {
        for (const auto& [x, n] : other.counts_)
            if (count(x) < n) return false;
        return true;
    }

    // Requires contains(other).
    void subtract(const Multiset& other) {
        for (const auto& [x, n] : other.counts_) {
            auto it = counts_.find(x);
            it->second -= n;
            size_ -= n;
            if (it->second == 0) counts_.erase(it);
        }
    }

    void add(const Multiset& other) {
        for (const auto& [x, n] : other.counts_) add(x, n);
    }

    bool remove(const T& x, std::size_t n = 1) {
        auto it = counts_.find(x);
        if (it == counts_.end() || it->second < n) return false;
        it->second -= n;
        size_ -= n;
        if (it->second == 0) counts_.erase(it);
        return true;
    }

    std::vector<T> expand() const {
        std::vector<T> out;
        out.reserve(size_);
        for (const auto& [x, n] : counts_)
            for (std::size_t i = 0; i < n; ++i) out.push_back(x);
        return out;
    }

    const map_type& counts() const { return counts_; }

    friend bool operator==(const Multiset& a, const Multiset& b) {
        return a.counts_ == b.counts_;
    }
    friend bool operator!=(const Multiset& a, const Multiset& b) { return !(a == b); }
    friend bool operator<(const Multiset& a, const Multiset& b) {
        return a.counts_ < b.counts_;
    }

  private:
    map_type counts_;
    std::size_t size_ = 0;
};

}  // namespace heraklit
