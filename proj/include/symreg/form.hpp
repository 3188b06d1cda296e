#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "symreg/canonical.hpp"
#include "symreg/dataset.hpp"

namespace symreg {

enum class FormKind { identity, additive, multiplicative, power };

inline const char* form_kind_name(FormKind k) {
    switch (k) {
    case FormKind::additive: return "additive";
    case FormKind::multiplicative: return "multiplicative";
    case FormKind::power: return "power";
    default: return "identity";
    }
}

// A learned wrapper around the searched part g: identity g, A+g, A*g, or
// A^g, optionally symmetrized to an even/odd function of the input.
struct ExprForm {
    FormKind kind = FormKind::identity;
    ExprTree fixed;  // the fixed part A; empty for identity
    Parity parity = Parity::none;

    bool is_identity() const { return kind == FormKind::identity && parity == Parity::none; }

    std::string fixed_text() const {
        return fixed.empty() ? std::string() : to_infix(fixed);
    }

    // Node count of A; the reward length deliberately excludes it.
    int wrapper_length() const { return fixed.length(); }
};

namespace detail {

inline std::vector<double> combine_form(FormKind kind, const std::vector<double>& a,
                                        const std::vector<double>& g) {
    if (kind == FormKind::identity) return g;
    std::vector<double> out(g.size());
    for (size_t i = 0; i < g.size(); ++i) {
        switch (kind) {
        case FormKind::additive: out[i] = a[i] + g[i]; break;
        case FormKind::multiplicative: out[i] = a[i] * g[i]; break;
        case FormKind::power: out[i] = std::pow(a[i], g[i]); break;
        default: out[i] = g[i];
        }
    }
    return out;
}

inline std::vector<std::vector<double>> mirror_columns(const std::vector<std::vector<double>>& cols) {
    std::vector<std::vector<double>> out = cols;
    for (auto& col : out)
        for (double& v : col) v = -v;
    return out;
}

}  // namespace detail

// Prediction of the wrapped expression on the given input columns. With
// identity form and no parity this is exactly g's own evaluation.
inline std::vector<double> apply_form(const ExprForm& form, const ExprTree& g,
                                      const std::vector<std::vector<double>>& columns,
                                      const std::vector<double>& params) {
    if (form.is_identity()) return g.evaluate(columns, params);
    auto base = [&](const std::vector<std::vector<double>>& cols) {
        std::vector<double> gv = g.evaluate(cols, params);
        if (form.kind == FormKind::identity) return gv;
        std::vector<double> av = form.fixed.evaluate(cols, {});
        return detail::combine_form(form.kind, av, gv);
    };
    std::vector<double> y0 = base(columns);
    if (form.parity == Parity::none) return y0;
    std::vector<double> ym = base(detail::mirror_columns(columns));
    double sign = form.parity == Parity::even ? 1.0 : -1.0;
    for (size_t i = 0; i < y0.size(); ++i) y0[i] = (y0[i] + sign * ym[i]) / 2.0;
    return y0;
}

// Fully composed closed-form tree reported to the caller: parameters
// bound, wrapper reified, then canonicalized when the expansion fits the
// term budget. Exponential atoms are not rewritten (pow(exp(x),2) stays
// a power, not exp(2x)).
inline ExprTree final_expression(const ExprForm& form, const ExprTree& g,
                                 const std::vector<double>& params, int term_limit = 256) {
    ExprTree bound = g.bind_params(params);
    ExprTree composed = bound;
    switch (form.kind) {
    case FormKind::additive: composed = make_binary(Op::add, form.fixed, bound); break;
    case FormKind::multiplicative: composed = make_binary(Op::mul, form.fixed, bound); break;
    case FormKind::power: composed = make_binary(Op::pow, form.fixed, bound); break;
    default: break;
    }
    if (form.parity != Parity::none) {
        ExprTree mirrored = composed;
        int d = composed.max_var_index();
        for (int v = 0; v <= d; ++v)
            mirrored = mirrored.substitute_var(v, make_unary(Op::neg, make_leaf(Token::variable(v))));
        Op join = form.parity == Parity::even ? Op::add : Op::sub;
        composed = make_binary(Op::div, make_binary(join, composed, mirrored),
                               make_leaf(Token::literal(2.0)));
    }
    if (std::optional<CanonExpr> c = canonicalize(composed, term_limit))
        return canonical_to_tree(*c);
    return composed;
}

}  // namespace symreg
