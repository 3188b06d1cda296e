#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "symreg/best_set.hpp"
#include "symreg/config.hpp"
#include "symreg/constopt.hpp"
#include "symreg/qtable.hpp"

namespace symreg {

// One node of the search tree over layer-order token choices. Child
// statistics live in the child: `visits` counts rollouts issued at or
// below the node, `selections[i]` counts simulation steps into child i
// (the n0 gate reads selections, UCT reads visits).
struct SearchNode {
    std::vector<Token> actions;
    std::vector<std::unique_ptr<SearchNode>> children;
    std::vector<int> selections;
    std::vector<double> priors;
    bool expanded = false;

    long long visits = 0;
    double reward_sum = 0.0;
    double best_reward = 0.0;

    double mean_reward() const {
        return visits > 0 ? reward_sum / static_cast<double>(visits) : 0.0;
    }
};

inline double uct_score(const SearchNode& child, const SearchNode& parent, double c) {
    return child.mean_reward() +
           c * std::sqrt(std::log(static_cast<double>(parent.visits)) /
                         static_cast<double>(child.visits));
}

// Child with the best reward seen so far; ties break toward the lower
// action index. Children never visited are skipped.
inline std::optional<int> select_greedy(const SearchNode& node) {
    int best = -1;
    double best_r = -1.0;
    for (size_t i = 0; i < node.children.size(); ++i) {
        const SearchNode* ch = node.children[i].get();
        if (!ch || ch->visits == 0) continue;
        if (ch->best_reward > best_r) {
            best_r = ch->best_reward;
            best = static_cast<int>(i);
        }
    }
    if (best < 0) return std::nullopt;
    return best;
}

// RL-guided expression search: a persistent committed token prefix grows
// by one greedy step per round, and each round's simulation walk rolls
// the partial tree out to completion, training the Q-tables with every
// simulated reward and back-propagating those rewards along the path.
class SearchAgent {
public:
    SearchAgent(const Dataset& data, const RunConfig& cfg, GrammarConfig grammar,
                std::uint64_t seed)
        : data_(&data), cfg_(cfg), grammar_(std::move(grammar)), rng_(seed), q_(cfg.lr) {
        root_ = std::make_unique<SearchNode>();
    }

    const ExprForm& form() const { return form_; }

    // Installing a different wrapper invalidates node rewards and cached
    // fits; Q-tables persist across forms.
    void set_form(const ExprForm& f) {
        bool same = f.kind == form_.kind && f.parity == form_.parity &&
                    f.fixed_text() == form_.fixed_text();
        form_ = f;
        if (!same) {
            root_ = std::make_unique<SearchNode>();
            memo_.clear();
        }
    }

    void run_epoch(BestSet& pool) {
        for (int round = 0; round < cfg_.t_r; ++round) {
            if (cfg_.ablation == AblationModel::B)
                run_round_qonly(round, pool);
            else
                run_round(round, pool);
        }
    }

    // diagnostics / tests
    const SearchNode& root() const { return *root_; }
    QTables& qtables() { return q_; }
    double total_issued_reward() const { return issued_total_; }
    std::function<void(int, const std::vector<Token>&, double)> rollout_hook;
    std::function<void(const SearchNode&, int)> selection_hook;

private:
    const Dataset* data_;
    RunConfig cfg_;
    GrammarConfig grammar_;
    std::mt19937_64 rng_;
    QTables q_;
    ExprForm form_;

    std::unique_ptr<SearchNode> root_;
    std::unordered_map<std::string, double> memo_;  // token sequence -> reward
    double issued_total_ = 0.0;

    static std::string sequence_id(const std::vector<Token>& seq) {
        std::string s;
        s.reserve(seq.size() * 13);
        for (const Token& t : seq) {
            s += static_cast<char>(t.op);
            s += static_cast<char>(t.index & 0xff);
            if (t.op == Op::lit) s.append(reinterpret_cast<const char*>(&t.value), 8);
            s += ';';
        }
        return s;
    }

    void expand(SearchNode& n, const TreeBuilder& at) {
        if (n.expanded) return;
        n.actions = at.valid_tokens();
        n.children.clear();
        n.selections.assign(n.actions.size(), 0);
        n.priors.assign(n.actions.size(), 0.0);
        std::uint64_t s = state_key(at.sequence(), cfg_.state_window);
        double maxq = 0.0;
        std::vector<double> qm(n.actions.size(), 0.0);
        for (size_t i = 0; i < n.actions.size(); ++i) {
            qm[i] = cfg_.ablation == AblationModel::A
                        ? 0.0
                        : q_.mean(state_action_key(s, n.actions[i]));
            maxq = std::max(maxq, qm[i]);
        }
        double z = 0.0;
        for (size_t i = 0; i < n.actions.size(); ++i) {
            n.priors[i] = std::exp(qm[i] - maxq);
            z += n.priors[i];
        }
        for (double& p : n.priors) p /= z;
        for (size_t i = 0; i < n.actions.size(); ++i)
            n.children.push_back(std::make_unique<SearchNode>());
        n.expanded = true;
    }

    // Children under the selection floor come first (least selected,
    // ties by prior then index); afterwards sample proportionally to
    // softmax of the UCT scores.
    int choose_child(SearchNode& n) {
        int pick = -1;
        for (size_t i = 0; i < n.actions.size(); ++i) {
            bool fresh = n.children[i]->visits == 0 || n.selections[i] < cfg_.n0;
            if (!fresh) continue;
            if (pick < 0 || n.selections[i] < n.selections[static_cast<size_t>(pick)] ||
                (n.selections[i] == n.selections[static_cast<size_t>(pick)] &&
                 n.priors[i] > n.priors[static_cast<size_t>(pick)]))
                pick = static_cast<int>(i);
        }
        if (pick >= 0) return pick;
        int best = 0;
        double best_u = -1e300;
        for (size_t i = 0; i < n.actions.size(); ++i) {
            double u = uct_score(*n.children[i], n, cfg_.c);
            if (u > best_u) {
                best_u = u;
                best = static_cast<int>(i);
            }
        }
        return best;
    }

    double score_complete(const TreeBuilder& b, BestSet& pool) {
        std::string id = sequence_id(b.sequence());
        if (auto it = memo_.find(id); it != memo_.end()) return it->second;
        ExprTree g = b.build();
        FitResult fit = fit_params(g, *data_, form_, cfg_.fit_restarts, rng_);
        double r = reward(g.length(), fit, cfg_.eta, cfg_.reward_norm, data_->size());
        if (r > 0.0 && pool.would_accept(r)) {
            Candidate cand;
            cand.g = g;
            cand.params = fit.params;
            cand.reward = r;
            cand.sse = fit.error_sq_sum;
            cand.form = form_;
            cand.composed = final_expression(form_, g, fit.params, cfg_.term_limit);
            cand.canon_key = BestSet::key_of(cand.composed, cfg_.term_limit);
            pool.insert(std::move(cand));
        }
        memo_.emplace(std::move(id), r);
        return r;
    }

    // Q-guided random completion: tokens are drawn from an epsilon-mixed
    // softmax over the mean Q-values, so the tables learned from earlier
    // rollouts narrow where later rollouts go. Completions run under a
    // sampled length budget (otherwise they pile up at l_max, since
    // operators outnumber leaves in the library). A handful of attempts
    // guards against degenerate libraries.
    bool complete_guided(TreeBuilder& b) {
        std::vector<double> w;
        while (!b.complete()) {
            std::vector<Token> valid = b.valid_tokens();
            if (valid.empty()) return false;
            size_t pick = 0;
            if (valid.size() > 1) {
                std::uint64_t s = state_key(b.sequence(), cfg_.state_window);
                w.assign(valid.size(), 0.0);
                double maxq = -1e300;
                for (size_t i = 0; i < valid.size(); ++i) {
                    w[i] = cfg_.ablation == AblationModel::A
                               ? 0.0
                               : q_.mean(state_action_key(s, valid[i]));
                    maxq = std::max(maxq, w[i]);
                }
                double tau = std::max(1e-6, cfg_.rollout_tau);
                double z = 0.0;
                for (double& v : w) {
                    v = std::exp((v - maxq) / tau);
                    z += v;
                }
                double eps = std::clamp(cfg_.rollout_epsilon, 0.0, 1.0);
                double u = static_cast<double>(valid.size());
                for (double& v : w) v = eps / u + (1.0 - eps) * v / z;
                std::uniform_real_distribution<double> dist(0.0, 1.0);
                double r = dist(rng_);
                for (size_t i = 0; i < w.size(); ++i) {
                    r -= w[i];
                    if (r <= 0.0) { pick = i; break; }
                    if (i + 1 == w.size()) pick = i;
                }
            }
            b.append(valid[pick]);
        }
        return true;
    }

    double simulated_reward(const TreeBuilder& partial, BestSet& pool,
                            std::vector<Token>* rolled) {
        int floor = std::max(grammar_.l_min, partial.length() + partial.open_slots());
        for (int attempt = 0; attempt < 50; ++attempt) {
            TreeBuilder b = partial;
            if (floor < grammar_.l_max) {
                // Shorter completions carry most of the signal; take the
                // smaller of two draws to tilt the budget low.
                std::uniform_int_distribution<int> budget(floor, grammar_.l_max);
                b.set_length_cap(std::min(budget(rng_), budget(rng_)));
            }
            if (!complete_guided(b)) continue;
            if (rolled) *rolled = b.sequence();
            return score_complete(b, pool);
        }
        if (rolled) *rolled = partial.sequence();
        return 0.0;
    }

    void backprop(const std::vector<SearchNode*>& path, double r) {
        for (SearchNode* n : path) {
            n->visits += 1;
            n->reward_sum += r;
            n->best_reward = std::max(n->best_reward, r);
        }
        issued_total_ += r;
    }

    // True iff appending the action would close the expression.
    static bool closes_tree(const TreeBuilder& b, const Token& action) {
        if (action.arity() > 0) return false;
        return b.length() == 0 || b.open_slots() == 1;
    }

    void run_round(int round, BestSet& pool) {
        TreeBuilder sim(grammar_);
        std::vector<SearchNode*> simpath{root_.get()};

        // Selection: greedy descent by best reward, but only through
        // nodes whose children have all been explored at least n0
        // times. Shallow layers therefore fill in before the search
        // commits below them.
        while (simpath.back()->expanded) {
            SearchNode* node = simpath.back();
            if (node->actions.empty()) break;
            bool gated = false;
            for (size_t i = 0; i < node->selections.size(); ++i) {
                if (node->selections[i] < cfg_.n0 || node->children[i]->visits == 0) {
                    gated = true;
                    break;
                }
            }
            if (gated) break;
            int best = -1;
            double best_r = -1.0;
            for (size_t i = 0; i < node->actions.size(); ++i) {
                if (closes_tree(sim, node->actions[i])) continue;  // nothing below
                if (node->children[i]->best_reward > best_r) {
                    best_r = node->children[i]->best_reward;
                    best = static_cast<int>(i);
                }
            }
            if (best < 0) break;
            sim.append(node->actions[static_cast<size_t>(best)]);
            simpath.push_back(node->children[static_cast<size_t>(best)].get());
        }

        // Simulation: walk to a complete expression, rolling out and
        // training the Q-tables at every step.
        while (!sim.complete()) {
            SearchNode* cur = simpath.back();
            expand(*cur, sim);
            if (cur->actions.empty()) {
                backprop(simpath, 0.0);  // dead end
                break;
            }
            int k = choose_child(*cur);
            cur->selections[static_cast<size_t>(k)] += 1;
            if (selection_hook) selection_hook(*cur, k);
            Token action = cur->actions[static_cast<size_t>(k)];
            std::uint64_t skey = state_key(sim.sequence(), cfg_.state_window);
            sim.append(action);
            simpath.push_back(cur->children[static_cast<size_t>(k)].get());

            // A batch of rollouts per step: every simulated reward
            // trains the Q-tables and back-propagates along the path.
            int batch = sim.complete() ? 1 : std::max(1, cfg_.sim_rollouts);
            for (int rep = 0; rep < batch; ++rep) {
                std::vector<Token> rolled;
                double r = sim.complete() ? (rolled = sim.sequence(), score_complete(sim, pool))
                                          : simulated_reward(sim, pool, &rolled);
                if (cfg_.ablation != AblationModel::A)
                    q_.update(state_action_key(skey, action), r, rng_);
                backprop(simpath, r);
                if (rollout_hook) rollout_hook(round, rolled, r);
            }
        }

        // Expansion bookkeeping: refresh child priors of the nodes this
        // round touched from the newly trained Q-tables.
        TreeBuilder prefix(grammar_);
        for (size_t i = 0; i + 1 < simpath.size(); ++i) {
            refresh_priors(*simpath[i], prefix);
            prefix.append(sim.sequence()[i]);
        }
    }

    void refresh_priors(SearchNode& n, const TreeBuilder& at) {
        if (!n.expanded || n.actions.empty() || cfg_.ablation == AblationModel::A) return;
        std::uint64_t s = state_key(at.sequence(), cfg_.state_window);
        double maxq = -1e300;
        std::vector<double> qm(n.actions.size(), 0.0);
        for (size_t i = 0; i < n.actions.size(); ++i) {
            qm[i] = q_.mean(state_action_key(s, n.actions[i]));
            maxq = std::max(maxq, qm[i]);
        }
        double z = 0.0;
        for (size_t i = 0; i < n.actions.size(); ++i) {
            n.priors[i] = std::exp(qm[i] - maxq);
            z += n.priors[i];
        }
        for (double& p : n.priors) p /= z;
    }

    // MCTS ablation: epsilon-greedy generation straight from the mean
    // Q-values, trained with the terminal reward of each expression.
    void run_round_qonly(int round, BestSet& pool) {
        std::bernoulli_distribution explore(cfg_.model_b_epsilon);
        for (int gidx = 0; gidx < cfg_.model_b_rollouts; ++gidx) {
            TreeBuilder b(grammar_);
            std::vector<std::pair<std::uint64_t, Token>> steps;
            bool ok = true;
            while (!b.complete()) {
                std::vector<Token> valid = b.valid_tokens();
                if (valid.empty()) { ok = false; break; }
                std::uint64_t s = state_key(b.sequence(), cfg_.state_window);
                size_t pick = 0;
                if (explore(rng_)) {
                    std::uniform_int_distribution<size_t> u(0, valid.size() - 1);
                    pick = u(rng_);
                } else {
                    double bestq = -1e300;
                    for (size_t i = 0; i < valid.size(); ++i) {
                        double qv = q_.mean(state_action_key(s, valid[i]));
                        if (qv > bestq) { bestq = qv; pick = i; }
                    }
                }
                steps.emplace_back(s, valid[pick]);
                b.append(valid[pick]);
            }
            if (!ok) continue;
            double r = score_complete(b, pool);
            for (const auto& [s, a] : steps) q_.update(state_action_key(s, a), r, rng_);
            issued_total_ += r;
            if (rollout_hook) rollout_hook(round, b.sequence(), r);
        }
    }
};

// Convenience wrapper matching the operation contract: t_r rounds of
// search over `data` under `form`, returning the l_b best expressions.
inline BestSet run_search(const Dataset& data, const ExprForm& form, const RunConfig& cfg,
                          const GrammarConfig& grammar, std::uint64_t seed) {
    BestSet pool(cfg.l_b);
    SearchAgent agent(data, cfg, grammar, seed);
    agent.set_form(form);
    agent.run_epoch(pool);
    return pool;
}

}  // namespace symreg
