#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "symreg/agent.hpp"
#include "symreg/best_set.hpp"

namespace symreg {

namespace detail {

struct Individual {
    ExprTree g;
    std::vector<double> params;
    double reward = 0.0;
    double sse = std::numeric_limits<double>::infinity();
};

inline void score_individual(Individual& ind, const Dataset& data, const ExprForm& form,
                             const RunConfig& cfg) {
    ind.params.resize(static_cast<size_t>(ind.g.param_count()), 1.0);
    double sse = fit_objective(ind.g, data, form, ind.params);
    FitResult fr;
    fr.error_sq_sum = sse;
    fr.valid = std::isfinite(sse);
    ind.sse = sse;
    ind.reward = reward(ind.g.length(), fr, cfg.eta, cfg.reward_norm, data.size());
}

template <typename Rng>
inline size_t tournament(const std::vector<Individual>& pop, int size, Rng& rng) {
    std::uniform_int_distribution<size_t> u(0, pop.size() - 1);
    size_t best = u(rng);
    for (int i = 1; i < size; ++i) {
        size_t c = u(rng);
        if (pop[c].reward > pop[best].reward) best = c;
    }
    return best;
}

}  // namespace detail

// Genetic-programming refinement of the search pool: tournament
// selection, subtree crossover and subtree mutation at the configured
// rates, structurally invalid children rejected in favour of their
// parent. Constants are re-fitted for the top 5% each round only.
template <typename Rng>
inline BestSet evolve(const BestSet& seed_pool, const Dataset& data, const ExprForm& form,
                      const RunConfig& cfg, const GrammarConfig& grammar, Rng& rng) {
    using detail::Individual;
    BestSet out(cfg.l_b);
    out.merge(seed_pool);
    if (seed_pool.empty()) return out;

    auto same_form = [&](const ExprForm& f) {
        return f.kind == form.kind && f.parity == form.parity &&
               f.fixed_text() == form.fixed_text();
    };

    std::vector<Individual> pop;
    pop.reserve(static_cast<size_t>(cfg.gp_population));
    for (const Candidate& c : seed_pool.items()) {
        if (!same_form(c.form)) continue;
        Individual ind;
        ind.g = c.g;
        ind.params = c.params;
        ind.reward = c.reward;
        ind.sse = c.sse;
        pop.push_back(std::move(ind));
        if (static_cast<int>(pop.size()) >= cfg.gp_population) break;
    }
    std::uniform_int_distribution<int> init_size(grammar.l_min,
                                                 std::max(grammar.l_min, grammar.l_max / 2));
    while (static_cast<int>(pop.size()) < cfg.gp_population) {
        auto t = random_tree(grammar, grammar.l_min, init_size(rng), rng);
        if (!t) break;
        Individual ind;
        ind.g = std::move(*t);
        detail::score_individual(ind, data, form, cfg);
        pop.push_back(std::move(ind));
    }
    if (pop.empty()) return out;

    std::bernoulli_distribution do_mate(cfg.p_mate);
    std::bernoulli_distribution do_mutate(cfg.p_mutate);

    for (int round = 0; round < cfg.gp_rounds; ++round) {
        // elite slot 0 carries the current best through unchanged
        size_t elite = 0;
        for (size_t i = 1; i < pop.size(); ++i)
            if (pop[i].reward > pop[elite].reward) elite = i;

        std::vector<Individual> next;
        next.reserve(pop.size());
        next.push_back(pop[elite]);
        while (next.size() < pop.size()) {
            size_t pa = detail::tournament(pop, 3, rng);
            ExprTree child = pop[pa].g;
            bool changed = false;
            if (do_mate(rng)) {
                size_t pb = detail::tournament(pop, 3, rng);
                std::uniform_int_distribution<int> ua(0, child.length() - 1);
                std::uniform_int_distribution<int> ub(0, pop[pb].g.length() - 1);
                child = child.with_subtree(ua(rng), pop[pb].g.subtree(ub(rng)));
                changed = true;
            }
            if (do_mutate(rng)) {
                std::uniform_int_distribution<int> ua(0, child.length() - 1);
                if (auto sub = random_tree(grammar, 1, 7, rng)) {
                    child = child.with_subtree(ua(rng), *sub);
                    changed = true;
                }
            }
            if (!changed || !satisfies_constraints(child, grammar)) {
                next.push_back(pop[pa]);  // reject invalid child, retain parent
                continue;
            }
            Individual ind;
            ind.g = std::move(child);
            // carry over what parameter values we can; new slots start at 1
            ind.params.assign(static_cast<size_t>(ind.g.param_count()), 1.0);
            for (size_t i = 0; i < ind.params.size() && i < pop[pa].params.size(); ++i)
                ind.params[i] = pop[pa].params[i];
            detail::score_individual(ind, data, form, cfg);
            next.push_back(std::move(ind));
        }
        pop = std::move(next);

        // re-fit constants for the top slice only
        std::vector<size_t> order(pop.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](size_t a, size_t b) { return pop[a].reward > pop[b].reward; });
        size_t refit = std::max<size_t>(1, pop.size() / 20);
        for (size_t k = 0; k < refit && k < order.size(); ++k) {
            Individual& ind = pop[order[k]];
            if (ind.g.param_count() == 0) continue;
            FitResult fit = fit_params(ind.g, data, form, cfg.fit_restarts, rng);
            if (fit.valid && fit.error_sq_sum <= ind.sse) {
                ind.params = fit.params;
                ind.sse = fit.error_sq_sum;
                ind.reward = reward(ind.g.length(), fit, cfg.eta, cfg.reward_norm, data.size());
            }
        }
    }

    for (const Individual& ind : pop) {
        if (ind.reward <= 0.0 || !out.would_accept(ind.reward)) continue;
        Candidate cand;
        cand.g = ind.g;
        cand.params = ind.params;
        cand.reward = ind.reward;
        cand.sse = ind.sse;
        cand.form = form;
        cand.composed = final_expression(form, ind.g, ind.params, cfg.term_limit);
        cand.canon_key = BestSet::key_of(cand.composed, cfg.term_limit);
        out.insert(std::move(cand));
    }
    return out;
}

}  // namespace symreg
