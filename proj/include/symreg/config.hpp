#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "symreg/tree.hpp"

namespace symreg {

// Ablation switches: full keeps every block; the lettered models each
// disable one of them.
enum class AblationModel {
    full,
    A,  // no double Q-learning (uniform priors, no updates)
    B,  // no MCTS (epsilon-greedy Q-table generation)
    C,  // no sub-tree form discovery (form pinned to identity)
    D,  // no parity preprocessing
};

struct RunConfig {
    // search
    double eta = 0.99;      // length discount of the reward
    int t_r = 50;           // training rounds per epoch
    double c = std::sqrt(2.0);  // UCT exploration constant
    int n0 = 3;             // minimum selections before UCT sampling
    double lr = 1e-3;       // double-Q learning rate
    int l_min = 4;
    int l_max = 35;
    int c_max = 10;
    // genetic programming
    int gp_rounds = 30;
    int gp_population = 500;
    int l_b = 20;           // best-expression pool size
    double p_mate = 0.5;
    double p_mutate = 0.5;
    // sub-tree discovery
    double E_sym = 1e-5;
    double k_s = 0.1;
    double k_p = 0.1;
    int N = 5;
    std::string reward_norm = "sum";  // "sum" (as printed) or "mean" (RMSE)
    // pipeline
    int epochs = 4;
    int sim_rollouts = 64;       // random completions per simulation step
    double rollout_epsilon = 0.25;  // uniform share of the completion policy
    double rollout_tau = 0.02;   // softmax temperature over mean Q values
    int state_window = 8;        // token-suffix length of the Q state
    int fit_restarts = 4;
    int term_limit = 256;
    double early_stop_sse = 1e-12;
    int model_b_rollouts = 12;  // generations per round when MCTS is off
    double model_b_epsilon = 0.1;
    AblationModel ablation = AblationModel::full;
    std::string operators = "add,sub,mul,div,sin,cos,exp,log,sqrt";
    std::string trace_file;  // per-rollout trace log, off when empty

    GrammarConfig grammar(int dim, bool with_constants) const {
        GrammarConfig g;
        std::stringstream ss(operators);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (!tok.empty()) g.library.push_back(token_from_symbol(tok));
        }
        for (int i = 0; i < dim; ++i) g.library.push_back(Token::variable(i));
        g.library.push_back(Token::literal(1.0));
        g.library.push_back(Token::literal(2.0));
        if (with_constants) g.library.push_back(Token::placeholder());
        g.l_min = l_min;
        g.l_max = l_max;
        g.c_max = c_max;
        return g;
    }

    void set(const std::string& key, const std::string& value) {
        auto d = [&] { return std::stod(value); };
        auto i = [&] { return std::stoi(value); };
        if (key == "eta") eta = d();
        else if (key == "t_r") t_r = i();
        else if (key == "c") c = d();
        else if (key == "n0") n0 = i();
        else if (key == "lr") lr = d();
        else if (key == "l_min") l_min = i();
        else if (key == "l_max") l_max = i();
        else if (key == "c_max") c_max = i();
        else if (key == "gp_rounds") gp_rounds = i();
        else if (key == "gp_population") gp_population = i();
        else if (key == "l_b") l_b = i();
        else if (key == "p_mate") p_mate = d();
        else if (key == "p_mutate") p_mutate = d();
        else if (key == "E_sym") E_sym = d();
        else if (key == "k_s") k_s = d();
        else if (key == "k_p") k_p = d();
        else if (key == "N") N = i();
        else if (key == "reward_norm") {
            if (value != "sum" && value != "mean")
                throw std::invalid_argument("reward_norm must be sum or mean");
            reward_norm = value;
        }
        else if (key == "epochs") epochs = i();
        else if (key == "sim_rollouts") sim_rollouts = i();
        else if (key == "rollout_epsilon") rollout_epsilon = d();
        else if (key == "rollout_tau") rollout_tau = d();
        else if (key == "state_window") state_window = i();
        else if (key == "fit_restarts") fit_restarts = i();
        else if (key == "term_limit") term_limit = i();
        else if (key == "early_stop_sse") early_stop_sse = d();
        else if (key == "model_b_rollouts") model_b_rollouts = i();
        else if (key == "model_b_epsilon") model_b_epsilon = d();
        else if (key == "operators") operators = value;
        else if (key == "trace_file") trace_file = value;
        else throw std::invalid_argument("unknown config key: " + key);
    }
};

// Flat key=value file; `#` comments and blank lines ignored.
inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            size_t a = s.find_first_not_of(" \t\r\n");
            size_t b = s.find_last_not_of(" \t\r\n");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key=value");
        cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

}  // namespace symreg
