// SPDX-FileCopyrightText: 2026 hmflow contributors
// SPDX-License-Identifier: Apache-2.0

#include "hmflow/expression.hpp"

#include <cctype>
#include <cmath>
#include <functional>
#include <vector>

namespace hmf {

namespace detail {

struct ExprNode {
    enum class Op { constant, var_x, var_y, add, sub, mul, div, pow, neg, call } op;
    double value = 0.0;
    double (*fn)(double) = nullptr;
    std::shared_ptr<const ExprNode> a, b;

    double eval(double x, double y) const {
        switch (op) {
            case Op::constant: return value;
            case Op::var_x: return x;
            case Op::var_y: return y;
            case Op::add: return a->eval(x, y) + b->eval(x, y);
            case Op::sub: return a->eval(x, y) - b->eval(x, y);
            case Op::mul: return a->eval(x, y) * b->eval(x, y);
            case Op::div: return a->eval(x, y) / b->eval(x, y);
            case Op::pow: return std::pow(a->eval(x, y), b->eval(x, y));
            case Op::neg: return -a->eval(x, y);
            case Op::call: return fn(a->eval(x, y));
        }
        return 0.0;
    }
};

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make(ExprNode::Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<ExprNode>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodePtr make_const(double v) {
    auto n = std::make_shared<ExprNode>();
    n->op = ExprNode::Op::constant;
    n->value = v;
    return n;
}

struct Parser {
    const std::string& s;
    size_t pos = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw Error(Errc::config, "expression error at position " + std::to_string(pos) + ": " + msg +
                                      " in '" + s + "'");
    }
    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) pos++;
    }
    bool eat(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) {
            pos++;
            return true;
        }
        return false;
    }

    NodePtr parse_expr() {
        NodePtr lhs = parse_term();
        for (;;) {
            if (eat('+'))
                lhs = make(ExprNode::Op::add, lhs, parse_term());
            else if (eat('-'))
                lhs = make(ExprNode::Op::sub, lhs, parse_term());
            else
                return lhs;
        }
    }
    NodePtr parse_term() {
        NodePtr lhs = parse_factor();
        for (;;) {
            if (eat('*'))
                lhs = make(ExprNode::Op::mul, lhs, parse_factor());
            else if (eat('/'))
                lhs = make(ExprNode::Op::div, lhs, parse_factor());
            else
                return lhs;
        }
    }
    NodePtr parse_factor() {
        NodePtr base = parse_unary();
        if (eat('^')) return make(ExprNode::Op::pow, base, parse_factor()); // right associative
        return base;
    }
    NodePtr parse_unary() {
        if (eat('-')) return make(ExprNode::Op::neg, parse_unary());
        if (eat('+')) return parse_unary();
        return parse_primary();
    }
    NodePtr parse_primary() {
        skip_ws();
        if (pos >= s.size()) fail("unexpected end of input");
        char c = s[pos];
        if (c == '(') {
            pos++;
            NodePtr inner = parse_expr();
            if (!eat(')')) fail("missing ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            size_t endp = 0;
            double v = 0.0;
            try {
                v = std::stod(s.substr(pos), &endp);
            } catch (const std::exception&) {
                fail("malformed number");
            }
            pos += endp;
            return make_const(v);
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos;
            while (pos < s.size() &&
                   (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
                pos++;
            std::string name = s.substr(start, pos - start);
            if (name == "x") return make(ExprNode::Op::var_x);
            if (name == "y") return make(ExprNode::Op::var_y);
            if (name == "pi") return make_const(3.14159265358979323846264338328);
            if (name == "e") return make_const(2.71828182845904523536028747135);
            static const std::pair<const char*, double (*)(double)> fns[] = {
                {"sin", std::sin},   {"cos", std::cos},   {"tan", std::tan},
                {"exp", std::exp},   {"log", std::log},   {"sqrt", std::sqrt},
                {"abs", std::fabs},  {"sinh", std::sinh}, {"cosh", std::cosh},
                {"tanh", std::tanh},
            };
            for (const auto& [fname, fn] : fns) {
                if (name == fname) {
                    if (!eat('(')) fail("function '" + name + "' needs parentheses");
                    NodePtr arg = parse_expr();
                    if (!eat(')')) fail("missing ')' after function argument");
                    auto node = std::make_shared<ExprNode>();
                    node->op = ExprNode::Op::call;
                    node->fn = fn;
                    node->a = arg;
                    return node;
                }
            }
            fail("unknown identifier '" + name + "'");
        }
        fail(std::string("unexpected character '") + c + "'");
    }
};

} // namespace

} // namespace detail

Expression Expression::parse(const std::string& text) {
    detail::Parser p{text};
    Expression out;
    out.text_ = text;
    out.root_ = p.parse_expr();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("trailing input");
    return out;
}

double Expression::eval(double x, double y) const { return root_->eval(x, y); }

} // namespace hmf
