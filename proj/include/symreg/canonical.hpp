#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "symreg/parse.hpp"

namespace symreg {

// Canonical form: a sum of terms, each a real coefficient times a sorted
// product of atomic factors raised to real exponents. Products and small
// integer powers of sums are expanded distributively; everything else
// (function applications, non-constant exponents, sums kept as
// denominators) stays atomic. This is deliberately conservative: two
// canonically-equal expressions are equal as functions, but not every
// pair of equal functions shares a canonical form.
struct CanonExpr;
using CanonExprPtr = std::shared_ptr<const CanonExpr>;

struct CanonFactor {
    enum class Kind { variable, placeholder, func, expr_atom, pow_atom };
    Kind kind = Kind::variable;
    int index = 0;       // variable / placeholder slot
    Op func = Op::sin;   // func kind only
    CanonExprPtr a;      // func argument, atom body, pow base
    CanonExprPtr b;      // pow exponent (non-constant)
};

struct CanonTerm {
    double coeff = 0.0;
    std::vector<std::pair<CanonFactor, double>> factors;  // sorted by key
};

struct CanonExpr {
    std::vector<CanonTerm> terms;  // sorted by shape key, like shapes merged
};

// Multiset of additive terms in canonical string form.
struct TermMultiset {
    std::map<std::string, int> terms;
    friend bool operator==(const TermMultiset&, const TermMultiset&) = default;
};

inline double snap_number(double v) {
    double r = std::round(v);
    if (std::abs(v - r) <= 1e-9 * std::max(1.0, std::abs(v)))
        return r == 0.0 ? 0.0 : r;
    return v;
}

inline bool is_integer_value(double v) { return v == std::round(v) && std::isfinite(v); }

namespace detail {

inline std::string round_digits(double v, int digits) {
    if (digits <= 0) return format_number(v);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
    std::string s(buf);
    if (s == "-0") s = "0";
    return s;
}

std::string print_canon_impl(const CanonExpr& e, int digits);

inline std::string factor_key(const CanonFactor& f, int digits) {
    switch (f.kind) {
    case CanonFactor::Kind::variable:
        return "x" + std::to_string(f.index + 1);
    case CanonFactor::Kind::placeholder:
        return "C" + std::to_string(f.index + 1);
    case CanonFactor::Kind::func:
        return std::string(op_name(f.func)) + "(" + print_canon_impl(*f.a, digits) + ")";
    case CanonFactor::Kind::expr_atom:
        return "(" + print_canon_impl(*f.a, digits) + ")";
    case CanonFactor::Kind::pow_atom:
        return "(" + print_canon_impl(*f.a, digits) + ")^(" +
               print_canon_impl(*f.b, digits) + ")";
    }
    return "?";
}

inline std::string factor_power_string(const std::pair<CanonFactor, double>& fe, int digits) {
    std::string s = factor_key(fe.first, digits);
    if (fe.second != 1.0) s += "^" + round_digits(fe.second, digits);
    return s;
}

inline std::string term_shape_string(const CanonTerm& t, int digits) {
    std::string s;
    for (size_t i = 0; i < t.factors.size(); ++i) {
        if (i) s += "*";
        s += factor_power_string(t.factors[i], digits);
    }
    return s;
}

inline std::string term_string(const CanonTerm& t, int digits) {
    std::string shape = term_shape_string(t, digits);
    double c = t.coeff;
    if (shape.empty()) return round_digits(c, digits);
    if (c == 1.0) return shape;
    if (c == -1.0) return "-" + shape;
    return round_digits(c, digits) + "*" + shape;
}

inline std::string print_canon_impl(const CanonExpr& e, int digits) {
    if (e.terms.empty()) return "0";
    std::string out;
    for (size_t i = 0; i < e.terms.size(); ++i) {
        std::string ts = term_string(e.terms[i], digits);
        if (i && ts[0] != '-') out += "+";
        out += ts;
    }
    return out;
}

// Expansion state: term budget plus a validity flag (non-finite
// coefficients from constant folding poison the whole form).
struct CanonCtx {
    int term_limit = 256;
    bool failed = false;
};

inline CanonExpr normalize(std::vector<CanonTerm> terms, CanonCtx& ctx) {
    CanonExpr out;
    if (ctx.failed) return out;
    std::vector<std::pair<std::string, CanonTerm>> keyed;
    for (CanonTerm& t : terms) {
        t.coeff = snap_number(t.coeff);
        if (!std::isfinite(t.coeff)) { ctx.failed = true; return out; }
        if (t.coeff == 0.0) continue;
        std::vector<std::pair<CanonFactor, double>> kept;
        for (auto& fe : t.factors) {
            fe.second = snap_number(fe.second);
            if (!std::isfinite(fe.second)) { ctx.failed = true; return out; }
            if (fe.second != 0.0) kept.push_back(fe);
        }
        t.factors = std::move(kept);
        std::sort(t.factors.begin(), t.factors.end(),
                  [](const auto& l, const auto& r) {
                      return factor_key(l.first, -1) < factor_key(r.first, -1);
                  });
        keyed.emplace_back(term_shape_string(t, -1), std::move(t));
    }
    std::sort(keyed.begin(), keyed.end(),
              [](const auto& l, const auto& r) { return l.first < r.first; });
    for (size_t i = 0; i < keyed.size(); ++i) {
        if (!out.terms.empty() &&
            term_shape_string(out.terms.back(), -1) == keyed[i].first) {
            out.terms.back().coeff = snap_number(out.terms.back().coeff + keyed[i].second.coeff);
        } else {
            out.terms.push_back(std::move(keyed[i].second));
        }
    }
    double max_c = 1.0;
    for (const CanonTerm& t : out.terms) max_c = std::max(max_c, std::abs(t.coeff));
    std::erase_if(out.terms, [max_c](const CanonTerm& t) {
        return std::abs(t.coeff) <= 1e-12 * max_c;
    });
    if (static_cast<int>(out.terms.size()) > ctx.term_limit) ctx.failed = true;
    return out;
}

inline CanonExpr constant_expr(double v) {
    CanonExpr e;
    if (v != 0.0) e.terms.push_back(CanonTerm{v, {}});
    return e;
}

inline std::optional<double> constant_of(const CanonExpr& e) {
    if (e.terms.empty()) return 0.0;
    if (e.terms.size() == 1 && e.terms[0].factors.empty()) return e.terms[0].coeff;
    return std::nullopt;
}

inline CanonExpr add_exprs(const CanonExpr& a, const CanonExpr& b, CanonCtx& ctx) {
    std::vector<CanonTerm> ts = a.terms;
    ts.insert(ts.end(), b.terms.begin(), b.terms.end());
    return normalize(std::move(ts), ctx);
}

inline CanonExpr scale_expr(const CanonExpr& a, double c, CanonCtx& ctx) {
    std::vector<CanonTerm> ts = a.terms;
    for (CanonTerm& t : ts) t.coeff *= c;
    return normalize(std::move(ts), ctx);
}

inline CanonTerm term_mul(const CanonTerm& a, const CanonTerm& b) {
    CanonTerm out;
    out.coeff = a.coeff * b.coeff;
    out.factors = a.factors;
    for (const auto& fe : b.factors) {
        bool merged = false;
        std::string key = factor_key(fe.first, -1);
        for (auto& mine : out.factors) {
            if (factor_key(mine.first, -1) == key) {
                mine.second += fe.second;
                merged = true;
                break;
            }
        }
        if (!merged) out.factors.push_back(fe);
    }
    return out;
}

inline CanonExpr mul_exprs(const CanonExpr& a, const CanonExpr& b, CanonCtx& ctx) {
    if (ctx.failed) return {};
    if (static_cast<long long>(a.terms.size()) * static_cast<long long>(b.terms.size()) >
        ctx.term_limit) {
        ctx.failed = true;
        return {};
    }
    std::vector<CanonTerm> ts;
    ts.reserve(a.terms.size() * b.terms.size());
    for (const CanonTerm& x : a.terms)
        for (const CanonTerm& y : b.terms) ts.push_back(term_mul(x, y));
    return normalize(std::move(ts), ctx);
}

inline CanonExpr atom_power(const CanonExpr& base, double expo) {
    CanonFactor f;
    f.kind = CanonFactor::Kind::expr_atom;
    f.a = std::make_shared<CanonExpr>(base);
    CanonExpr e;
    e.terms.push_back(CanonTerm{1.0, {{f, expo}}});
    return e;
}

inline CanonTerm invert_term(const CanonTerm& t) {
    CanonTerm out;
    out.coeff = 1.0 / t.coeff;
    out.factors = t.factors;
    for (auto& fe : out.factors) fe.second = -fe.second;
    return out;
}

inline CanonExpr pow_exprs(const CanonExpr& base, const CanonExpr& expo, CanonCtx& ctx) {
    if (ctx.failed) return {};
    std::optional<double> be = constant_of(expo);
    if (!be) {
        if (std::optional<double> bc = constant_of(base); bc && *bc == 1.0)
            return constant_expr(1.0);  // 1^anything
        // Non-constant exponent: one atomic factor.
        CanonFactor f;
        f.kind = CanonFactor::Kind::pow_atom;
        f.a = std::make_shared<CanonExpr>(base);
        f.b = std::make_shared<CanonExpr>(expo);
        CanonExpr e;
        e.terms.push_back(CanonTerm{1.0, {{f, 1.0}}});
        return e;
    }
    double p = snap_number(*be);
    if (p == 0.0) return constant_expr(1.0);
    if (std::optional<double> bc = constant_of(base)) {
        double v = std::pow(*bc, p);
        if (std::isfinite(v)) return constant_expr(v);
        ctx.failed = true;
        return {};
    }
    if (is_integer_value(p) && std::abs(p) <= 30.0) {
        int n = static_cast<int>(std::abs(p));
        if (base.terms.size() == 1) {
            CanonTerm t = base.terms[0];
            CanonTerm out;
            out.coeff = std::pow(t.coeff, p);
            if (!std::isfinite(out.coeff)) { ctx.failed = true; return {}; }
            out.factors = t.factors;
            for (auto& fe : out.factors) fe.second *= p;
            return normalize({out}, ctx);
        }
        if (p > 0) {
            CanonExpr acc = constant_expr(1.0);
            for (int i = 0; i < n && !ctx.failed; ++i) acc = mul_exprs(acc, base, ctx);
            return acc;
        }
        return atom_power(base, p);  // negative power of a sum stays atomic
    }
    // Fractional exponents distribute over a lone positive-coefficient
    // factor only; halving an even power would silently drop the |.|.
    if (base.terms.size() == 1) {
        const CanonTerm& t = base.terms[0];
        bool even_guard = t.factors.size() == 1 &&
                          is_integer_value(t.factors[0].second) &&
                          std::fmod(t.factors[0].second, 2.0) == 0.0;
        if (t.coeff > 0.0 && t.factors.size() <= 1 && !even_guard) {
            CanonTerm out;
            out.coeff = std::pow(t.coeff, p);
            if (!std::isfinite(out.coeff)) { ctx.failed = true; return {}; }
            out.factors = t.factors;
            for (auto& fe : out.factors) fe.second *= p;
            return normalize({out}, ctx);
        }
    }
    return atom_power(base, p);
}

inline CanonExpr div_exprs(const CanonExpr& a, const CanonExpr& b, CanonCtx& ctx) {
    if (ctx.failed) return {};
    if (std::optional<double> c = constant_of(b)) {
        if (*c == 0.0) { ctx.failed = true; return {}; }
        return scale_expr(a, 1.0 / *c, ctx);
    }
    if (b.terms.size() == 1) {
        CanonExpr inv;
        inv.terms.push_back(invert_term(b.terms[0]));
        return mul_exprs(a, inv, ctx);
    }
    return mul_exprs(a, atom_power(b, -1.0), ctx);
}

inline CanonExpr func_expr(Op op, const CanonExpr& arg, CanonCtx& ctx) {
    // Functions of constants fold to their numeric value, so dead
    // subexpressions like log(1) cannot masquerade as structure.
    if (std::optional<double> c = constant_of(arg)) {
        double v;
        switch (op) {
        case Op::sin: v = std::sin(*c); break;
        case Op::cos: v = std::cos(*c); break;
        case Op::exp: v = std::exp(*c); break;
        case Op::log: v = std::log(*c); break;
        case Op::sinh: v = std::sinh(*c); break;
        case Op::cosh: v = std::cosh(*c); break;
        default: v = std::numeric_limits<double>::quiet_NaN();
        }
        if (!std::isfinite(v)) {
            ctx.failed = true;
            return {};
        }
        return constant_expr(snap_number(v));
    }
    CanonFactor f;
    f.kind = CanonFactor::Kind::func;
    f.func = op;
    f.a = std::make_shared<CanonExpr>(arg);
    CanonExpr e;
    e.terms.push_back(CanonTerm{1.0, {{f, 1.0}}});
    return e;
}

inline CanonExpr canon_node(const ExprTree& t, int idx, CanonCtx& ctx) {
    if (ctx.failed) return {};
    const auto& nd = t.node(idx);
    switch (nd.tok.op) {
    case Op::var: {
        CanonFactor f;
        f.kind = CanonFactor::Kind::variable;
        f.index = nd.tok.index;
        CanonExpr e;
        e.terms.push_back(CanonTerm{1.0, {{f, 1.0}}});
        return e;
    }
    case Op::param: {
        CanonFactor f;
        f.kind = CanonFactor::Kind::placeholder;
        f.index = nd.tok.index;
        CanonExpr e;
        e.terms.push_back(CanonTerm{1.0, {{f, 1.0}}});
        return e;
    }
    case Op::lit:
        return constant_expr(snap_number(nd.tok.value));
    case Op::add:
        return add_exprs(canon_node(t, nd.child[0], ctx), canon_node(t, nd.child[1], ctx), ctx);
    case Op::sub: {
        CanonExpr rhs = scale_expr(canon_node(t, nd.child[1], ctx), -1.0, ctx);
        return add_exprs(canon_node(t, nd.child[0], ctx), rhs, ctx);
    }
    case Op::mul:
        return mul_exprs(canon_node(t, nd.child[0], ctx), canon_node(t, nd.child[1], ctx), ctx);
    case Op::div:
        return div_exprs(canon_node(t, nd.child[0], ctx), canon_node(t, nd.child[1], ctx), ctx);
    case Op::pow:
        return pow_exprs(canon_node(t, nd.child[0], ctx), canon_node(t, nd.child[1], ctx), ctx);
    case Op::neg:
        return scale_expr(canon_node(t, nd.child[0], ctx), -1.0, ctx);
    case Op::sqrt:
        return pow_exprs(canon_node(t, nd.child[0], ctx), constant_expr(0.5), ctx);
    case Op::sin:
    case Op::cos:
    case Op::exp:
    case Op::log:
    case Op::sinh:
    case Op::cosh: {
        CanonExpr arg = canon_node(t, nd.child[0], ctx);
        if (ctx.failed) return {};
        return func_expr(nd.tok.op, arg, ctx);
    }
    }
    ctx.failed = true;
    return {};
}

}  // namespace detail

inline std::optional<CanonExpr> canonicalize(const ExprTree& t, int term_limit = 256) {
    if (t.empty()) return std::nullopt;
    detail::CanonCtx ctx{term_limit};
    CanonExpr e = detail::canon_node(t, 0, ctx);
    if (ctx.failed) return std::nullopt;
    return e;
}

// digits <= 0 prints shortest round-trip numbers; a small positive value
// (6 is used for best-set deduplication) coarsens fitted constants so
// that near-identical fits collapse to one key.
inline std::string print_canonical(const CanonExpr& e, int digits = -1) {
    return detail::print_canon_impl(e, digits);
}

inline std::string term_shape_key(const CanonTerm& t, int digits = -1) {
    return detail::term_shape_string(t, digits);
}

inline std::string term_key(const CanonTerm& t, int digits = -1) {
    return detail::term_string(t, digits);
}

inline std::optional<double> canonical_constant(const CanonExpr& e) {
    return detail::constant_of(e);
}

// ---- tolerant structural equality ----------------------------------

namespace detail {

bool canon_close(const CanonExpr& a, const CanonExpr& b, double rtol);

inline bool value_close(double a, double b, double rtol) {
    return std::abs(a - b) <= rtol * std::max({1.0, std::abs(a), std::abs(b)});
}

inline bool factor_close(const CanonFactor& a, const CanonFactor& b, double rtol) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
    case CanonFactor::Kind::variable:
    case CanonFactor::Kind::placeholder:
        return a.index == b.index;
    case CanonFactor::Kind::func:
        return a.func == b.func && canon_close(*a.a, *b.a, rtol);
    case CanonFactor::Kind::expr_atom:
        return canon_close(*a.a, *b.a, rtol);
    case CanonFactor::Kind::pow_atom:
        return canon_close(*a.a, *b.a, rtol) && canon_close(*a.b, *b.b, rtol);
    }
    return false;
}

inline bool term_close(const CanonTerm& a, const CanonTerm& b, double rtol) {
    if (!value_close(a.coeff, b.coeff, rtol)) return false;
    if (a.factors.size() != b.factors.size()) return false;
    std::vector<bool> used(b.factors.size(), false);
    for (const auto& fa : a.factors) {
        bool found = false;
        for (size_t j = 0; j < b.factors.size(); ++j) {
            if (used[j]) continue;
            if (value_close(fa.second, b.factors[j].second, rtol) &&
                factor_close(fa.first, b.factors[j].first, rtol)) {
                used[j] = true;
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

inline bool canon_close(const CanonExpr& a, const CanonExpr& b, double rtol) {
    if (a.terms.size() != b.terms.size()) return false;
    std::vector<bool> used(b.terms.size(), false);
    for (const auto& ta : a.terms) {
        bool found = false;
        for (size_t j = 0; j < b.terms.size(); ++j) {
            if (used[j]) continue;
            if (term_close(ta, b.terms[j], rtol)) {
                used[j] = true;
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

}  // namespace detail

inline bool canonical_equal(const CanonExpr& a, const CanonExpr& b, double rtol = 1e-9) {
    return detail::canon_close(a, b, rtol);
}

// ---- canonical form back to a tree ----------------------------------

namespace detail {

ExprTree canon_to_tree_impl(const CanonExpr& e);

inline ExprTree factor_tree(const CanonFactor& f) {
    switch (f.kind) {
    case CanonFactor::Kind::variable:
        return make_leaf(Token::variable(f.index));
    case CanonFactor::Kind::placeholder:
        return make_leaf(Token{Op::param, f.index, 0.0});
    case CanonFactor::Kind::func:
        return make_unary(f.func, canon_to_tree_impl(*f.a));
    case CanonFactor::Kind::expr_atom:
        return canon_to_tree_impl(*f.a);
    case CanonFactor::Kind::pow_atom:
        return make_binary(Op::pow, canon_to_tree_impl(*f.a), canon_to_tree_impl(*f.b));
    }
    return make_leaf(Token::literal(0.0));
}

// Product of |coeff| and the factor powers; the caller folds the sign.
inline ExprTree term_tree_magnitude(const CanonTerm& t) {
    std::optional<ExprTree> acc;
    double c = std::abs(t.coeff);
    if (c != 1.0 || t.factors.empty()) acc = make_leaf(Token::literal(c));
    for (const auto& fe : t.factors) {
        ExprTree base = factor_tree(fe.first);
        ExprTree part = fe.second == 1.0
                            ? base
                            : make_binary(Op::pow, base, make_leaf(Token::literal(fe.second)));
        acc = acc ? make_binary(Op::mul, *acc, part) : part;
    }
    return *acc;
}

inline ExprTree canon_to_tree_impl(const CanonExpr& e) {
    if (e.terms.empty()) return make_leaf(Token::literal(0.0));
    std::optional<ExprTree> acc;
    for (const CanonTerm& t : e.terms) {
        ExprTree part = term_tree_magnitude(t);
        if (!acc) {
            acc = t.coeff < 0.0 ? make_unary(Op::neg, part) : part;
        } else {
            acc = make_binary(t.coeff < 0.0 ? Op::sub : Op::add, *acc, part);
        }
    }
    return *acc;
}

}  // namespace detail

inline ExprTree canonical_to_tree(const CanonExpr& e) {
    return detail::canon_to_tree_impl(e);
}

// ---- additive split ---------------------------------------------------

// Expands the expression distributively over +/- and returns its
// additive terms in canonical string form. Parameters must already be
// bound to literals. nullopt signals the configured term limit was hit
// (callers skip the expression).
inline std::optional<TermMultiset> split_by_addition(const ExprTree& t, int term_limit = 256) {
    std::optional<CanonExpr> c = canonicalize(t, term_limit);
    if (!c) return std::nullopt;
    TermMultiset out;
    for (const CanonTerm& term : c->terms) out.terms[term_key(term)] += 1;
    return out;
}

}  // namespace symreg
