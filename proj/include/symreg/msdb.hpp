#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "symreg/best_set.hpp"
#include "symreg/config.hpp"

namespace symreg {

struct MsdbParams {
    double k_s = 0.1;  // reward gate relative to the pool maximum
    double k_p = 0.1;  // term frequency gate relative to pool size
    int N = 5;         // expressions examined
    int term_limit = 256;

    static MsdbParams from_config(const RunConfig& cfg) {
        return MsdbParams{cfg.k_s, cfg.k_p, cfg.N, cfg.term_limit};
    }
};

namespace detail {

struct DictEntry {
    int count = 0;      // occurrences of this exact term (coefficient included)
    int first_order = 0;
    CanonTerm term;
    std::string shape;
};

inline bool noninteger(double v) { return std::abs(v - std::round(v)) > 1e-6; }

}  // namespace detail

// Infers the wrapper form from the best-expression pool. Each of the top
// expressions is split into additive terms; the dictionary counts exact
// terms (coefficient included, coarsened to 6 digits). The dominant term
// selects a power wrapper (lone base to a non-integer constant), a
// multiplicative wrapper (non-integer scale), or falls through to an
// additive fixed part made of every term frequent enough — where
// sign-flipped duplicates cancel canonically, so {e^x - x, e^x + x}
// yields A = e^x. Parity is attached by the caller.
inline ExprForm discover_form(const BestSet& best, const MsdbParams& p) {
    ExprForm form;  // identity unless something qualifies
    if (best.empty()) return form;

    std::map<std::string, detail::DictEntry> dict;
    std::map<std::string, int> shape_count;  // coefficient-free support
    int order = 0;
    double r_max = best.max_reward();
    for (size_t i = 0; i < best.size(); ++i) {
        if (static_cast<int>(i) >= p.N || best[i].reward < p.k_s * r_max) break;
        std::optional<CanonExpr> c = canonicalize(best[i].composed, p.term_limit);
        if (!c) continue;  // oversize expansion: skip this expression
        for (const CanonTerm& t : c->terms) {
            std::string key = term_key(t, 6);
            detail::DictEntry& e = dict[key];
            if (e.count == 0) {
                e.first_order = order++;
                e.term = t;
                e.shape = term_shape_key(t, 6);
            }
            e.count += 1;
            shape_count[e.shape] += 1;
        }
    }
    if (dict.empty()) return form;

    const detail::DictEntry* g0 = nullptr;
    for (const auto& [key, e] : dict) {
        if (!g0 || e.count > g0->count ||
            (e.count == g0->count && (shape_count[e.shape] > shape_count[g0->shape] ||
                                      (shape_count[e.shape] == shape_count[g0->shape] &&
                                       e.first_order < g0->first_order))))
            g0 = &e;
    }

    double gate = static_cast<double>(best.size()) * p.k_p;
    bool g0_supported = static_cast<double>(shape_count[g0->shape]) >= gate;

    // Power wrapper: dominant term is a lone base raised to a
    // non-integer constant.
    if (g0_supported && g0->term.factors.size() == 1 &&
        detail::noninteger(g0->term.factors[0].second)) {
        CanonExpr base;
        base.terms.push_back(CanonTerm{1.0, {{g0->term.factors[0].first, 1.0}}});
        form.kind = FormKind::power;
        form.fixed = canonical_to_tree(base);
        return form;
    }

    // Multiplicative wrapper: dominant shape scaled by a non-integer
    // constant.
    if (g0_supported && !g0->term.factors.empty() && detail::noninteger(g0->term.coeff)) {
        CanonExpr a;
        CanonTerm t = g0->term;
        t.coeff = 1.0;
        a.terms.push_back(std::move(t));
        form.kind = FormKind::multiplicative;
        form.fixed = canonical_to_tree(a);
        return form;
    }

    // Additive fixed part: every distinct term frequent enough, added
    // once; canonical normalization merges and cancels.
    CanonExpr a;
    for (const auto& [key, e] : dict) {
        if (static_cast<double>(e.count) < gate) continue;
        a.terms.push_back(e.term);
    }
    if (a.terms.empty()) return form;
    detail::CanonCtx ctx{p.term_limit};
    a = detail::normalize(std::move(a.terms), ctx);
    if (ctx.failed || a.terms.empty()) return form;
    form.kind = FormKind::additive;
    form.fixed = canonical_to_tree(a);
    return form;
}

}  // namespace symreg
