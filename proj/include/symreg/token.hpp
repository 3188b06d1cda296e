#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace symreg {

// Node symbols of the expression grammar. Leaves carry extra payload in
// Token (variable index, literal value, parameter slot).
enum class Op : std::uint8_t {
    add,
    sub,
    mul,
    div,
    pow,
    neg,
    sin,
    cos,
    exp,
    log,
    sqrt,
    sinh,
    cosh,
    var,    // x1..xd
    lit,    // numeric literal
    param,  // constant placeholder C, fitted numerically
};

constexpr int arity(Op op) {
    switch (op) {
    case Op::add:
    case Op::sub:
    case Op::mul:
    case Op::div:
    case Op::pow:
        return 2;
    case Op::neg:
    case Op::sin:
    case Op::cos:
    case Op::exp:
    case Op::log:
    case Op::sqrt:
    case Op::sinh:
    case Op::cosh:
        return 1;
    default:
        return 0;
    }
}

constexpr bool is_unary(Op op) { return arity(op) == 1; }
constexpr bool is_binary(Op op) { return arity(op) == 2; }
constexpr bool is_leaf(Op op) { return arity(op) == 0; }

// sin/cos nesting is restricted; hyperbolics are not counted as trig.
constexpr bool is_trig(Op op) { return op == Op::sin || op == Op::cos; }

// Inverse pairs for the unary-successor constraint.
constexpr Op unary_inverse(Op op) {
    switch (op) {
    case Op::exp: return Op::log;
    case Op::log: return Op::exp;
    case Op::neg: return Op::neg;
    default: return Op::var;  // sentinel: no inverse in the grammar
    }
}

inline std::string_view op_name(Op op) {
    switch (op) {
    case Op::add: return "add";
    case Op::sub: return "sub";
    case Op::mul: return "mul";
    case Op::div: return "div";
    case Op::pow: return "pow";
    case Op::neg: return "neg";
    case Op::sin: return "sin";
    case Op::cos: return "cos";
    case Op::exp: return "exp";
    case Op::log: return "log";
    case Op::sqrt: return "sqrt";
    case Op::sinh: return "sinh";
    case Op::cosh: return "cosh";
    case Op::var: return "var";
    case Op::lit: return "lit";
    case Op::param: return "param";
    }
    return "?";
}

// One grammar symbol. `index` is the variable number (0-based) for var
// tokens and the parameter slot for param tokens; `value` is the literal
// payload for lit tokens.
struct Token {
    Op op = Op::lit;
    int index = 0;
    double value = 0.0;

    static Token make_op(Op o) { return Token{o, 0, 0.0}; }
    static Token variable(int i) { return Token{Op::var, i, 0.0}; }
    static Token literal(double v) { return Token{Op::lit, 0, v}; }
    static Token placeholder() { return Token{Op::param, 0, 0.0}; }

    int arity() const { return symreg::arity(op); }

    friend bool operator==(const Token& a, const Token& b) {
        return a.op == b.op && a.index == b.index && a.value == b.value;
    }
};

// Parses a library entry such as "add", "x3", "C", "1", "2.5".
inline Token token_from_symbol(std::string_view s) {
    static constexpr std::array<Op, 13> named = {
        Op::add, Op::sub, Op::mul, Op::div, Op::pow, Op::neg, Op::sin,
        Op::cos, Op::exp, Op::log, Op::sqrt, Op::sinh, Op::cosh};
    for (Op op : named) {
        if (s == op_name(op)) return Token::make_op(op);
    }
    if (s == "C") return Token::placeholder();
    if (s.size() >= 2 && s[0] == 'x') {
        int idx = 0;
        for (size_t i = 1; i < s.size(); ++i) {
            if (s[i] < '0' || s[i] > '9') { idx = -1; break; }
            idx = idx * 10 + (s[i] - '0');
        }
        if (idx >= 1) return Token::variable(idx - 1);
    }
    try {
        size_t pos = 0;
        double v = std::stod(std::string(s), &pos);
        if (pos == s.size()) return Token::literal(v);
    } catch (const std::exception&) {
    }
    throw std::invalid_argument("unknown token symbol: " + std::string(s));
}

}  // namespace symreg
