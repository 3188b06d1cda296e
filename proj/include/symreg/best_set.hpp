#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "symreg/canonical.hpp"
#include "symreg/form.hpp"

namespace symreg {

// One scored expression: the searched part g with its fitted constants,
// the wrapper that was in effect, and the composed closed form.
struct Candidate {
    ExprTree g;
    std::vector<double> params;
    double reward = 0.0;
    double sse = 0.0;
    ExprForm form;
    ExprTree composed;
    std::string canon_key;
};

// Top-k pool ordered by reward, distinct by canonical form of the
// composed expression. Coefficients in the key are coarsened to 2
// significant digits: a family of near-fits of one skeleton takes one
// slot instead of crowding out structural diversity.
class BestSet {
public:
    explicit BestSet(int capacity = 20) : capacity_(capacity) {}

    int capacity() const { return capacity_; }
    size_t size() const { return items_.size(); }
    bool empty() const { return items_.empty(); }
    const std::vector<Candidate>& items() const { return items_; }
    const Candidate& operator[](size_t i) const { return items_[i]; }

    double min_reward() const { return items_.empty() ? 0.0 : items_.back().reward; }
    double max_reward() const { return items_.empty() ? 0.0 : items_.front().reward; }

    // Cheap pre-check before composing/canonicalizing a candidate.
    bool would_accept(double reward) const {
        return static_cast<int>(items_.size()) < capacity_ || reward > min_reward();
    }

    static std::string key_of(const ExprTree& composed, int term_limit = 256) {
        if (auto c = canonicalize(composed, term_limit)) return print_canonical(*c, 2);
        return to_infix(composed);
    }

    bool insert(Candidate cand) {
        auto it = std::find_if(items_.begin(), items_.end(), [&](const Candidate& c) {
            return c.canon_key == cand.canon_key;
        });
        if (it != items_.end()) {
            if (cand.reward <= it->reward) return false;
            items_.erase(it);
        } else if (static_cast<int>(items_.size()) >= capacity_ &&
                   cand.reward <= items_.back().reward) {
            return false;
        }
        auto pos = std::upper_bound(items_.begin(), items_.end(), cand,
                                    [](const Candidate& a, const Candidate& b) {
                                        if (a.reward != b.reward) return a.reward > b.reward;
                                        return a.canon_key < b.canon_key;
                                    });
        items_.insert(pos, std::move(cand));
        if (static_cast<int>(items_.size()) > capacity_) items_.pop_back();
        return true;
    }

    void merge(const BestSet& other) {
        for (const Candidate& c : other.items_) insert(c);
    }

private:
    int capacity_;
    std::vector<Candidate> items_;
};

}  // namespace symreg
