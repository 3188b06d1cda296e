#pragma once

#include <cctype>
#include <charconv>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

#include "symreg/tree.hpp"

namespace symreg {

// Shortest round-trip decimal form.
inline std::string format_number(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace detail {

// Infix grammar:
//   expr    := term (('+'|'-') term)*
//   term    := unary (('*'|'/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?
//   primary := number | ident '(' expr ')' | ident | '(' expr ')'
// A '-' directly in front of a number folds into a negative literal.
class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    ExprTree parse() {
        std::vector<ExprTree::Node> nodes;
        int root = parse_expr(nodes);
        (void)root;
        skip_ws();
        if (pos_ != text_.size()) fail("trailing input");
        // parse_* append children before parents; renumber to root-first.
        ExprTree t = reorder(nodes, static_cast<int>(nodes.size()) - 1);
        return t;
    }

private:
    std::string_view text_;
    size_t pos_ = 0;
    int next_param_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw std::invalid_argument("parse error at offset " +
                                    std::to_string(pos_) + ": " + what);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) { ++pos_; return true; }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    int make(std::vector<ExprTree::Node>& nodes, Token tok, int c0 = -1, int c1 = -1) {
        int at = static_cast<int>(nodes.size());
        nodes.push_back(ExprTree::Node{tok, {c0, c1}, -1});
        if (c0 >= 0) nodes[static_cast<size_t>(c0)].parent = at;
        if (c1 >= 0) nodes[static_cast<size_t>(c1)].parent = at;
        return at;
    }

    int parse_expr(std::vector<ExprTree::Node>& nodes) {
        int lhs = parse_term(nodes);
        while (true) {
            if (eat('+')) lhs = make(nodes, Token::make_op(Op::add), lhs, parse_term(nodes));
            else if (eat('-')) lhs = make(nodes, Token::make_op(Op::sub), lhs, parse_term(nodes));
            else return lhs;
        }
    }

    int parse_term(std::vector<ExprTree::Node>& nodes) {
        int lhs = parse_unary(nodes);
        while (true) {
            if (eat('*')) lhs = make(nodes, Token::make_op(Op::mul), lhs, parse_unary(nodes));
            else if (eat('/')) lhs = make(nodes, Token::make_op(Op::div), lhs, parse_unary(nodes));
            else return lhs;
        }
    }

    int parse_unary(std::vector<ExprTree::Node>& nodes) {
        if (eat('-')) {
            skip_ws();
            if (pos_ < text_.size() &&
                (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
                int lit = parse_number(nodes);
                nodes[static_cast<size_t>(lit)].tok.value = -nodes[static_cast<size_t>(lit)].tok.value;
                return parse_power_rest(nodes, lit);
            }
            return make(nodes, Token::make_op(Op::neg), parse_unary(nodes));
        }
        return parse_power(nodes);
    }

    int parse_power(std::vector<ExprTree::Node>& nodes) {
        return parse_power_rest(nodes, parse_primary(nodes));
    }

    int parse_power_rest(std::vector<ExprTree::Node>& nodes, int base) {
        if (eat('^'))
            return make(nodes, Token::make_op(Op::pow), base, parse_unary(nodes));
        return base;
    }

    int parse_number(std::vector<ExprTree::Node>& nodes) {
        size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
            ++pos_;
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            size_t mark = pos_++;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            } else {
                pos_ = mark;  // 'e' was not an exponent
            }
        }
        double v = 0.0;
        auto res = std::from_chars(text_.data() + start, text_.data() + pos_, v);
        if (res.ec != std::errc() || res.ptr != text_.data() + pos_) fail("bad number");
        return make(nodes, Token::literal(v));
    }

    int parse_primary(std::vector<ExprTree::Node>& nodes) {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number(nodes);
        if (c == '(') {
            ++pos_;
            int e = parse_expr(nodes);
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            std::string_view name = text_.substr(start, pos_ - start);
            if (peek() == '(') {
                Op op;
                if (name == "sin") op = Op::sin;
                else if (name == "cos") op = Op::cos;
                else if (name == "exp") op = Op::exp;
                else if (name == "log" || name == "ln") op = Op::log;
                else if (name == "sqrt") op = Op::sqrt;
                else if (name == "sinh") op = Op::sinh;
                else if (name == "cosh") op = Op::cosh;
                else if (name == "neg") op = Op::neg;
                else fail("unknown function '" + std::string(name) + "'");
                ++pos_;  // '('
                int arg = parse_expr(nodes);
                if (!eat(')')) fail("expected ')'");
                return make(nodes, Token::make_op(op), arg);
            }
            if (name == "C") return make(nodes, Token{Op::param, next_param_++, 0.0});
            if (name[0] == 'C' && name.size() > 1) {
                int slot = 0;
                for (size_t i = 1; i < name.size(); ++i) {
                    if (!std::isdigit(static_cast<unsigned char>(name[i]))) fail("bad placeholder");
                    slot = slot * 10 + (name[i] - '0');
                }
                if (slot < 1) fail("placeholder slots start at C1");
                if (slot > next_param_) next_param_ = slot;
                return make(nodes, Token{Op::param, slot - 1, 0.0});
            }
            if (name[0] == 'x' && name.size() > 1) {
                int idx = 0;
                for (size_t i = 1; i < name.size(); ++i) {
                    if (!std::isdigit(static_cast<unsigned char>(name[i]))) fail("bad variable");
                    idx = idx * 10 + (name[i] - '0');
                }
                if (idx < 1) fail("variables start at x1");
                return make(nodes, Token::variable(idx - 1));
            }
            if (name == "pi") return make(nodes, Token::literal(3.14159265358979323846));
            fail("unknown identifier '" + std::string(name) + "'");
        }
        fail("unexpected character");
    }

    static int copy_subtree(const std::vector<ExprTree::Node>& src, int idx,
                            int parent, std::vector<ExprTree::Node>& dst) {
        int at = static_cast<int>(dst.size());
        dst.push_back(ExprTree::Node{src[static_cast<size_t>(idx)].tok, {-1, -1}, parent});
        for (int c = 0; c < src[static_cast<size_t>(idx)].tok.arity(); ++c)
            dst[static_cast<size_t>(at)].child[c] =
                copy_subtree(src, src[static_cast<size_t>(idx)].child[c], at, dst);
        return at;
    }

    static ExprTree reorder(const std::vector<ExprTree::Node>& nodes, int root) {
        std::vector<ExprTree::Node> out;
        out.reserve(nodes.size());
        copy_subtree(nodes, root, -1, out);
        return ExprTree::from_nodes(std::move(out));
    }
};

inline int precedence(Op op) {
    switch (op) {
    case Op::add:
    case Op::sub: return 1;
    case Op::mul:
    case Op::div: return 2;
    case Op::neg: return 3;
    case Op::pow: return 4;
    default: return 5;
    }
}

inline void print_node(const ExprTree& t, int idx, std::string& out) {
    const auto& nd = t.node(idx);
    Op op = nd.tok.op;
    switch (op) {
    case Op::var:
        out += "x" + std::to_string(nd.tok.index + 1);
        return;
    case Op::param:
        out += "C" + std::to_string(nd.tok.index + 1);
        return;
    case Op::lit:
        out += format_number(nd.tok.value);
        return;
    case Op::neg: {
        out += "-";
        bool parens = precedence(t.node(nd.child[0]).tok.op) < precedence(Op::neg) ||
                      (t.node(nd.child[0]).tok.op == Op::lit &&
                       t.node(nd.child[0]).tok.value < 0);
        if (parens) out += "(";
        print_node(t, nd.child[0], out);
        if (parens) out += ")";
        return;
    }
    case Op::sin:
    case Op::cos:
    case Op::exp:
    case Op::log:
    case Op::sqrt:
    case Op::sinh:
    case Op::cosh:
        out += std::string(op_name(op)) + "(";
        print_node(t, nd.child[0], out);
        out += ")";
        return;
    default: {
        int p = precedence(op);
        auto child_prec = [&](int c) {
            const auto& ch = t.node(nd.child[c]);
            // negative literals read like unary minus
            if (ch.tok.op == Op::lit && ch.tok.value < 0) return precedence(Op::neg);
            return precedence(ch.tok.op);
        };
        // Parenthesization keeps the printed form structurally faithful:
        // '^' is right-associative, the rest left-associative.
        bool lp = op == Op::pow ? child_prec(0) <= p : child_prec(0) < p;
        bool rp = op == Op::pow ? child_prec(1) < p : child_prec(1) <= p;
        const char* sym = op == Op::add ? "+" : op == Op::sub ? "-"
                        : op == Op::mul ? "*" : op == Op::div ? "/" : "^";
        if (lp) out += "(";
        print_node(t, nd.child[0], out);
        if (lp) out += ")";
        out += sym;
        if (rp) out += "(";
        print_node(t, nd.child[1], out);
        if (rp) out += ")";
        return;
    }
    }
}

}  // namespace detail

inline ExprTree parse_expression(std::string_view text) {
    return detail::Parser(text).parse();
}

inline std::string to_infix(const ExprTree& t) {
    if (t.empty()) return "";
    std::string out;
    detail::print_node(t, 0, out);
    return out;
}

}  // namespace symreg
