#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "symreg/token.hpp"

namespace symreg {

// Token library plus structural limits used during generation.
struct GrammarConfig {
    std::vector<Token> library;
    int l_min = 4;
    int l_max = 35;
    int c_max = 10;

    int num_variables() const {
        int d = 0;
        for (const Token& t : library)
            if (t.op == Op::var && t.index + 1 > d) d = t.index + 1;
        return d;
    }

    bool allows_constants() const {
        for (const Token& t : library)
            if (t.op == Op::param) return true;
        return false;
    }

    // Default operator set: arithmetic, sin/cos, exp/log, sqrt, integer
    // literals 1 and 2, d variables, optional constant slots. pow stays
    // out of the default library (x1^x2 is reachable as exp(x2*log(x1)))
    // but remains fully supported in parsed targets and wrappers.
    static GrammarConfig standard(int d, bool with_constants) {
        GrammarConfig g;
        for (Op op : {Op::add, Op::sub, Op::mul, Op::div,
                      Op::sin, Op::cos, Op::exp, Op::log, Op::sqrt})
            g.library.push_back(Token::make_op(op));
        for (int i = 0; i < d; ++i) g.library.push_back(Token::variable(i));
        g.library.push_back(Token::literal(1.0));
        g.library.push_back(Token::literal(2.0));
        if (with_constants) g.library.push_back(Token::placeholder());
        return g;
    }
};

// Rooted expression tree. Node 0 is the root; children index into the
// same vector. Complete trees are immutable by convention: mutation
// helpers return fresh trees.
class ExprTree {
public:
    struct Node {
        Token tok;
        int child[2] = {-1, -1};
        int parent = -1;
    };

    ExprTree() = default;

    const std::vector<Node>& nodes() const { return nodes_; }
    const Node& node(int i) const { return nodes_[i]; }
    int length() const { return static_cast<int>(nodes_.size()); }
    bool empty() const { return nodes_.empty(); }

    int param_count() const {
        int n = 0;
        for (const Node& nd : nodes_)
            if (nd.tok.op == Op::param) ++n;
        return n;
    }

    // Element-wise evaluation over a column-major input matrix.
    // Non-finite intermediates propagate; callers treat non-finite rows
    // as invalid.
    std::vector<double> evaluate(const std::vector<std::vector<double>>& columns,
                                 const std::vector<double>& params) const {
        size_t n = columns.empty() ? 1 : columns[0].size();
        std::vector<double> out;
        eval_node(0, columns, params, n, out);
        return out;
    }

    double evaluate_scalar(const std::vector<double>& point,
                           const std::vector<double>& params) const {
        std::vector<std::vector<double>> cols(point.size());
        for (size_t i = 0; i < point.size(); ++i) cols[i] = {point[i]};
        return evaluate(cols, params)[0];
    }

    // Rebinds parameter placeholders as numeric literals.
    ExprTree bind_params(const std::vector<double>& params) const {
        ExprTree t = *this;
        for (Node& nd : t.nodes_) {
            if (nd.tok.op == Op::param)
                nd.tok = Token::literal(params.at(static_cast<size_t>(nd.tok.index)));
        }
        return t;
    }

    // Deep copy of the subtree rooted at `idx` as a standalone tree.
    ExprTree subtree(int idx) const {
        ExprTree t;
        copy_into(idx, -1, t);
        t.renumber_params();
        return t;
    }

    // Fresh tree with the subtree at `idx` replaced; parameter slots are
    // renumbered in node order.
    ExprTree with_subtree(int idx, const ExprTree& replacement) const {
        ExprTree t;
        graft(0, idx, replacement, -1, t);
        t.renumber_params();
        return t;
    }

    // Fresh tree with every occurrence of variable `var` replaced by the
    // given expression (used to build mirrored arguments).
    ExprTree substitute_var(int var, const ExprTree& expr) const {
        ExprTree t;
        subst(0, var, expr, -1, t);
        t.renumber_params();
        return t;
    }

    int max_var_index() const {
        int d = -1;
        for (const Node& nd : nodes_)
            if (nd.tok.op == Op::var && nd.tok.index > d) d = nd.tok.index;
        return d;
    }

    friend class TreeBuilder;
    static ExprTree from_nodes(std::vector<Node> nodes) {
        ExprTree t;
        t.nodes_ = std::move(nodes);
        return t;
    }

private:
    std::vector<Node> nodes_;

    void eval_node(int idx, const std::vector<std::vector<double>>& cols,
                   const std::vector<double>& params, size_t n,
                   std::vector<double>& out) const {
        const Node& nd = nodes_[idx];
        switch (nd.tok.op) {
        case Op::var:
            out.assign(cols.at(static_cast<size_t>(nd.tok.index)).begin(),
                       cols.at(static_cast<size_t>(nd.tok.index)).end());
            return;
        case Op::lit:
            out.assign(n, nd.tok.value);
            return;
        case Op::param:
            out.assign(n, params.at(static_cast<size_t>(nd.tok.index)));
            return;
        default:
            break;
        }
        std::vector<double> a, b;
        eval_node(nd.child[0], cols, params, n, a);
        if (nd.tok.arity() == 2) eval_node(nd.child[1], cols, params, n, b);
        out.resize(n);
        for (size_t i = 0; i < n; ++i) {
            double x = a[i];
            double y = nd.tok.arity() == 2 ? b[i] : 0.0;
            double r;
            switch (nd.tok.op) {
            case Op::add: r = x + y; break;
            case Op::sub: r = x - y; break;
            case Op::mul: r = x * y; break;
            case Op::div: r = x / y; break;
            case Op::pow: r = std::pow(x, y); break;
            case Op::neg: r = -x; break;
            case Op::sin: r = std::sin(x); break;
            case Op::cos: r = std::cos(x); break;
            case Op::exp: r = std::exp(x); break;
            case Op::log: r = std::log(x); break;
            case Op::sqrt: r = std::sqrt(x); break;
            case Op::sinh: r = std::sinh(x); break;
            case Op::cosh: r = std::cosh(x); break;
            default: r = std::numeric_limits<double>::quiet_NaN();
            }
            out[i] = r;
        }
    }

    int copy_into(int idx, int parent, ExprTree& dst) const {
        int at = static_cast<int>(dst.nodes_.size());
        dst.nodes_.push_back(Node{nodes_[idx].tok, {-1, -1}, parent});
        for (int c = 0; c < nodes_[idx].tok.arity(); ++c)
            dst.nodes_[at].child[c] = copy_into(nodes_[idx].child[c], at, dst);
        return at;
    }

    int graft(int idx, int target, const ExprTree& rep, int parent, ExprTree& dst) const {
        if (idx == target) return rep.copy_into(0, parent, dst);
        int at = static_cast<int>(dst.nodes_.size());
        dst.nodes_.push_back(Node{nodes_[idx].tok, {-1, -1}, parent});
        for (int c = 0; c < nodes_[idx].tok.arity(); ++c)
            dst.nodes_[at].child[c] = graft(nodes_[idx].child[c], target, rep, at, dst);
        return at;
    }

    int subst(int idx, int var, const ExprTree& rep, int parent, ExprTree& dst) const {
        const Node& nd = nodes_[idx];
        if (nd.tok.op == Op::var && nd.tok.index == var)
            return rep.copy_into(0, parent, dst);
        int at = static_cast<int>(dst.nodes_.size());
        dst.nodes_.push_back(Node{nd.tok, {-1, -1}, parent});
        for (int c = 0; c < nd.tok.arity(); ++c)
            dst.nodes_[at].child[c] = subst(nd.child[c], var, rep, at, dst);
        return at;
    }

    void renumber_params() {
        int next = 0;
        for (Node& nd : nodes_)
            if (nd.tok.op == Op::param) nd.tok.index = next++;
    }
};

inline ExprTree make_leaf(Token tok) {
    std::vector<ExprTree::Node> nodes;
    nodes.push_back(ExprTree::Node{tok, {-1, -1}, -1});
    return ExprTree::from_nodes(std::move(nodes));
}

namespace detail {
inline int append_tree(const ExprTree& src, int idx, int parent,
                       std::vector<ExprTree::Node>& dst) {
    int at = static_cast<int>(dst.size());
    dst.push_back(ExprTree::Node{src.node(idx).tok, {-1, -1}, parent});
    for (int c = 0; c < src.node(idx).tok.arity(); ++c)
        dst[static_cast<size_t>(at)].child[c] = append_tree(src, src.node(idx).child[c], at, dst);
    return at;
}
}  // namespace detail

inline ExprTree make_unary(Op op, const ExprTree& a) {
    std::vector<ExprTree::Node> nodes;
    nodes.push_back(ExprTree::Node{Token::make_op(op), {-1, -1}, -1});
    nodes[0].child[0] = detail::append_tree(a, 0, 0, nodes);
    return ExprTree::from_nodes(std::move(nodes));
}

inline ExprTree make_binary(Op op, const ExprTree& a, const ExprTree& b) {
    std::vector<ExprTree::Node> nodes;
    nodes.push_back(ExprTree::Node{Token::make_op(op), {-1, -1}, -1});
    nodes[0].child[0] = detail::append_tree(a, 0, 0, nodes);
    nodes[0].child[1] = detail::append_tree(b, 0, 0, nodes);
    return ExprTree::from_nodes(std::move(nodes));
}

// Post-hoc structural check used by mutation operators: a complete tree
// is accepted iff a layer-order generation of it would have been.
inline bool satisfies_constraints(const ExprTree& tree, const GrammarConfig& g) {
    if (tree.empty()) return false;
    int len = tree.length();
    if (len < g.l_min || len > g.l_max) return false;
    if (tree.param_count() > g.c_max) return false;
    for (const auto& nd : tree.nodes()) {
        if (nd.parent < 0) continue;
        Op parent = tree.node(nd.parent).tok.op;
        if (is_unary(parent) && nd.tok.op == unary_inverse(parent)) return false;
        if (is_trig(parent) && is_trig(nd.tok.op)) return false;
    }
    return true;
}

// Incremental layer-order construction: tokens fill open slots
// breadth-first, children of new internal nodes joining the back of the
// slot queue.
class TreeBuilder {
public:
    explicit TreeBuilder(const GrammarConfig& g) : grammar_(&g) {}

    bool complete() const { return !nodes_.empty() && open_.empty(); }
    int length() const { return static_cast<int>(nodes_.size()); }
    int open_slots() const { return static_cast<int>(open_.size()); }
    int param_count() const { return params_; }
    const std::vector<Token>& sequence() const { return seq_; }

    // Tightens the effective maximum length (never beyond the grammar's
    // own l_max). Completions under a sampled budget stay length-diverse
    // instead of saturating the cap.
    void set_length_cap(int cap) { cap_ = cap; }
    int effective_l_max() const {
        return cap_ > 0 ? std::min(cap_, grammar_->l_max) : grammar_->l_max;
    }

    // True iff appending `tok` at the next layer-order slot violates no
    // constraint. Unknown symbols (not in the library) are a caller bug.
    bool validate_partial(const Token& tok) const {
        if (complete()) return false;
        if (!in_library(tok))
            throw std::invalid_argument("token not in grammar library");
        int a = tok.arity();
        int new_len = length() + 1;
        int new_open = (nodes_.empty() ? 0 : open_slots() - 1) + a;
        // Minimal completion fills every open slot with a leaf; it must
        // fit under l_max.
        if (new_len + new_open > effective_l_max()) return false;
        // A leaf may not close the whole tree below l_min.
        if (a == 0 && new_open == 0 && new_len < grammar_->l_min) return false;
        if (tok.op == Op::param && params_ >= grammar_->c_max) return false;
        if (!nodes_.empty()) {
            Op parent = nodes_[open_.front()].tok.op;
            if (is_unary(parent) && tok.op == unary_inverse(parent)) return false;
            if (is_trig(parent) && is_trig(tok.op)) return false;
        }
        return true;
    }

    void append(const Token& tok) {
        if (complete()) throw std::logic_error("append on complete tree");
        int at = static_cast<int>(nodes_.size());
        int parent = -1;
        if (!nodes_.empty()) {
            parent = open_.front();
            open_.erase(open_.begin());
            auto& p = nodes_[static_cast<size_t>(parent)];
            p.child[p.child[0] < 0 ? 0 : 1] = at;
        }
        Token t = tok;
        if (t.op == Op::param) t.index = params_++;
        nodes_.push_back(ExprTree::Node{t, {-1, -1}, parent});
        for (int c = 0; c < t.arity(); ++c) open_.push_back(at);
        seq_.push_back(t);
    }

    std::vector<Token> valid_tokens() const {
        std::vector<Token> out;
        for (const Token& t : grammar_->library)
            if (validate_partial(t)) out.push_back(t);
        return out;
    }

    // Uniform random constraint-valid completion. Returns false if no
    // valid token exists at some step (possible only with degenerate
    // libraries).
    template <typename Rng>
    bool complete_random(Rng& rng) {
        while (!complete()) {
            std::vector<Token> valid = valid_tokens();
            if (valid.empty()) return false;
            std::uniform_int_distribution<size_t> pick(0, valid.size() - 1);
            append(valid[pick(rng)]);
        }
        return true;
    }

    ExprTree build() const {
        if (!complete()) throw std::logic_error("build on incomplete tree");
        return ExprTree::from_nodes(nodes_);
    }

    // Parent token of the next open slot, if any.
    std::optional<Op> pending_parent() const {
        if (nodes_.empty() || open_.empty()) return std::nullopt;
        return nodes_[static_cast<size_t>(open_.front())].tok.op;
    }

private:
    const GrammarConfig* grammar_;
    std::vector<ExprTree::Node> nodes_;
    std::vector<int> open_;  // FIFO of parent indices awaiting a child
    std::vector<Token> seq_;
    int params_ = 0;
    int cap_ = 0;

    bool in_library(const Token& tok) const {
        for (const Token& t : grammar_->library)
            if (t.op == tok.op &&
                (t.op != Op::var || t.index == tok.index) &&
                (t.op != Op::lit || t.value == tok.value))
                return true;
        return false;
    }
};

// Random tree with node count in [min_nodes, max_nodes] (still subject
// to the grammar's own limits); used for GP initialization and mutation
// subtrees, where the whole-tree length floor does not apply.
template <typename Rng>
inline std::optional<ExprTree> random_tree(const GrammarConfig& g, int min_nodes,
                                           int max_nodes, Rng& rng) {
    GrammarConfig capped = g;
    capped.l_max = std::min(g.l_max, max_nodes);
    capped.l_min = std::min(min_nodes, capped.l_max);
    TreeBuilder b(capped);
    b.set_length_cap(capped.l_max);
    if (!b.complete_random(rng)) return std::nullopt;
    return b.build();
}

}  // namespace symreg
