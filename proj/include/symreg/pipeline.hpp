#pragma once

#include <cstdint>
#include <fstream>
#include <memory>
#include <set>
#include <optional>
#include <string>

#include "symreg/agent.hpp"
#include "symreg/gptuner.hpp"
#include "symreg/match.hpp"
#include "symreg/msdb.hpp"
#include "symreg/preprocess.hpp"

namespace symreg {

struct PipelineResult {
    bool found = false;         // at least one finite-reward expression
    Candidate best;             // highest-reward candidate overall
    bool recovered = false;     // exact_match against the known target
    ExprForm final_form;        // wrapper in effect when the run ended
    ParityReport parity;
    int epochs_run = 0;
    BestSet pool{20};
};

struct PipelineOptions {
    const ExprTree* target = nullptr;  // enables recovery checking
    bool early_stop_on_recovery = true;
    std::ostream* trace = nullptr;     // per-rollout log, one line each
    std::optional<ExprForm> initial_form;  // start from a given wrapper
    bool freeze_form = false;              // keep the wrapper fixed across epochs
};

// Full run: parity preprocessing, then epochs of RL-guided search, GP
// refinement and wrapper re-discovery over a shared best-expression
// pool. The wrapper is frozen during an epoch and updated between them;
// a wrapper that stops beating the identity pool is revoked.
inline PipelineResult run_pipeline(const Dataset& data, const RunConfig& cfg,
                                   const GrammarConfig& grammar, std::uint64_t seed,
                                   const PipelineOptions& opt = {}) {
    PipelineResult res;
    res.pool = BestSet(cfg.l_b);

    // Parity detection runs once per problem: the data never changes.
    Parity parity = Parity::none;
    if (cfg.ablation != AblationModel::D) {
        res.parity = detect_parity(data, cfg.E_sym);
        if (data.dim() == 1) parity = res.parity.primary();
    } else {
        res.parity.parity.assign(static_cast<size_t>(data.dim()), Parity::none);
        res.parity.sym_error.assign(static_cast<size_t>(data.dim()),
                                    std::numeric_limits<double>::infinity());
    }
    const Dataset folded = parity != Parity::none
                               ? fold_data(data, res.parity)
                               : data;

    std::mt19937_64 master(seed);
    auto make_trace_hook = [&opt](int epoch) {
        std::ostream* tr = opt.trace;
        return [tr, epoch](int round, const std::vector<Token>& toks, double r) {
            (*tr) << "epoch=" << epoch << " round=" << round << " tokens=";
            for (size_t i = 0; i < toks.size(); ++i) {
                if (i) (*tr) << ",";
                const Token& t = toks[i];
                if (t.op == Op::var) (*tr) << "x" << t.index + 1;
                else if (t.op == Op::param) (*tr) << "C";
                else if (t.op == Op::lit) (*tr) << format_number(t.value);
                else (*tr) << op_name(t.op);
            }
            (*tr) << " reward=" << format_number(r) << "\n";
        };
    };

    ExprForm form;
    if (opt.initial_form) form = *opt.initial_form;
    form.parity = parity;
    ProbeSpec probe = ProbeSpec::from_dataset(data);
    MsdbParams msdb = MsdbParams::from_config(cfg);

    std::optional<Candidate> recovered_candidate;
    auto check_recovery = [&]() {
        if (!opt.target || res.recovered) return;
        for (const Candidate& c : res.pool.items()) {
            if (exact_match(c.composed, c.params, *opt.target, probe)) {
                res.recovered = true;
                recovered_candidate = c;
                break;
            }
        }
    };

    auto form_key = [](const ExprForm& f) {
        return std::string(form_kind_name(f.kind)) + "|" + f.fixed_text();
    };
    std::set<std::string> revoked;
    double prev_best = 0.0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        // Each epoch is an independent search: a fresh tree and fresh
        // Q-tables re-roll the search basin, and GP refines only this
        // epoch's findings so stale junk cannot dominate its seeds. The
        // global pool aggregates epochs for recovery checks and for the
        // wrapper discovery.
        SearchAgent agent(folded, cfg, grammar, master());
        if (opt.trace) agent.rollout_hook = make_trace_hook(epoch);
        agent.set_form(form);
        BestSet epoch_pool(cfg.l_b);
        agent.run_epoch(epoch_pool);
        BestSet refined = evolve(epoch_pool, folded, form, cfg, grammar, master);
        res.pool.merge(epoch_pool);
        res.pool.merge(refined);
        res.epochs_run = epoch + 1;

        check_recovery();
        if (res.recovered && opt.early_stop_on_recovery) break;
        if (!res.pool.empty() && res.pool[0].sse <= cfg.early_stop_sse) break;

        // Wrapper bookkeeping between epochs. A non-identity wrapper is
        // on probation: if its epoch did not push the global best
        // forward it is revoked and blacklisted, otherwise re-discovery
        // would adopt the same wrapper again immediately.
        double global_best = res.pool.max_reward();
        if (cfg.ablation != AblationModel::C && !opt.freeze_form) {
            if (form.kind != FormKind::identity && global_best <= prev_best + 1e-12)
                revoked.insert(form_key(form));
            ExprForm next = discover_form(res.pool, msdb);
            next.parity = parity;
            if (next.kind != FormKind::identity && revoked.count(form_key(next))) {
                next = ExprForm{};
                next.parity = parity;
            }
            form = next;
        }
        prev_best = global_best;
    }

    res.final_form = form;
    if (recovered_candidate) {
        res.found = true;
        res.best = *recovered_candidate;
    } else if (!res.pool.empty()) {
        res.found = true;
        res.best = res.pool[0];
    }
    return res;
}

}  // namespace symreg
