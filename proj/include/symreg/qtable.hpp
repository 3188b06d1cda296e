#pragma once

#include <cstdint>
#include <cstring>
#include <random>
#include <span>
#include <unordered_map>
#include <vector>

#include "symreg/token.hpp"

namespace symreg {

namespace detail {

inline std::uint64_t fnv1a(std::uint64_t h, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        h ^= (v >> (8 * i)) & 0xff;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::uint64_t token_bits(const Token& t) {
    std::uint64_t v = static_cast<std::uint64_t>(t.op) << 32 |
                      static_cast<std::uint32_t>(t.index);
    if (t.op == Op::lit) {
        std::uint64_t bits;
        std::memcpy(&bits, &t.value, sizeof(bits));
        v ^= bits * 0x9e3779b97f4a7c15ull;
    }
    return v;
}

}  // namespace detail

// State for the Q-tables: the layer-order token prefix truncated to its
// last `window` tokens. A bounded suffix keeps the tables small while
// still distinguishing local context.
inline std::uint64_t state_key(std::span<const Token> prefix, int window = 8) {
    std::uint64_t h = 1469598103934665603ull;
    size_t start = prefix.size() > static_cast<size_t>(window)
                       ? prefix.size() - static_cast<size_t>(window)
                       : 0;
    for (size_t i = start; i < prefix.size(); ++i)
        h = detail::fnv1a(h, detail::token_bits(prefix[i]));
    return h;
}

inline std::uint64_t state_action_key(std::uint64_t state, const Token& action) {
    return detail::fnv1a(state ^ 0x51ed270b7a1fca5dull, detail::token_bits(action));
}

// Two tabular action-value maps updated alternately; decisions read the
// mean of both. Unseen keys start at zero.
class QTables {
public:
    explicit QTables(double learning_rate = 1e-3) : lr_(learning_rate) {}

    double mean(std::uint64_t sa) const {
        return (lookup(qa_, sa) + lookup(qb_, sa)) / 2.0;
    }

    // Terminal-reward target: rollouts carry a single reward, so there
    // is no bootstrapped max term and no discount parameter.
    template <typename Rng>
    void update(std::uint64_t sa, double reward, Rng& rng) {
        std::bernoulli_distribution coin(0.5);
        auto& table = coin(rng) ? qa_ : qb_;
        double& q = table[sa];
        q += lr_ * (reward - q);
    }

    double a_value(std::uint64_t sa) const { return lookup(qa_, sa); }
    double b_value(std::uint64_t sa) const { return lookup(qb_, sa); }
    size_t size() const { return qa_.size() + qb_.size(); }
    double learning_rate() const { return lr_; }

private:
    static double lookup(const std::unordered_map<std::uint64_t, double>& t, std::uint64_t k) {
        auto it = t.find(k);
        return it == t.end() ? 0.0 : it->second;
    }

    std::unordered_map<std::uint64_t, double> qa_, qb_;
    double lr_;
};

}  // namespace symreg
