// SPDX-License-Identifier: Apache-2.0

#include "nbasin/expr.hpp"

#include <cctype>
#include <cstdlib>

namespace nbasin {

namespace {

struct Token {
    enum Type { Number, Ident, Op, End } type = End;
    std::string text;
    double number = 0.0;
    size_t pos = 0;
};

class Lexer {
  public:
    explicit Lexer(const std::string& s) : src_(s) { advance(); }

    const Token& peek() const { return tok_; }

    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

    [[noreturn]] void fail(const std::string& msg, size_t pos) const {
        int line = 1, col = 1;
        for (size_t i = 0; i < pos && i < src_.size(); ++i) {
            if (src_[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ParseError(msg, line, col);
    }

    [[noreturn]] void fail_here(const std::string& msg) const { fail(msg, tok_.pos); }

  private:
    void advance() {
        while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) ++i_;
        tok_ = Token{};
        tok_.pos = i_;
        if (i_ >= src_.size()) {
            tok_.type = Token::End;
            return;
        }
        char c = src_[i_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            size_t start = i_;
            while (i_ < src_.size() &&
                   (std::isdigit(static_cast<unsigned char>(src_[i_])) || src_[i_] == '.'))
                ++i_;
            if (i_ < src_.size() && (src_[i_] == 'e' || src_[i_] == 'E')) {
                size_t mark = i_;
                ++i_;
                if (i_ < src_.size() && (src_[i_] == '+' || src_[i_] == '-')) ++i_;
                if (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) {
                    while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_])))
                        ++i_;
                } else {
                    i_ = mark; // 'e' was not an exponent
                }
            }
            tok_.type = Token::Number;
            tok_.text = src_.substr(start, i_ - start);
            char* end = nullptr;
            tok_.number = std::strtod(tok_.text.c_str(), &end);
            if (end != tok_.text.c_str() + tok_.text.size())
                fail("malformed number '" + tok_.text + "'", start);
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = i_;
            while (i_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[i_])) ||
                                        src_[i_] == '_'))
                ++i_;
            tok_.type = Token::Ident;
            tok_.text = src_.substr(start, i_ - start);
            return;
        }
        tok_.type = Token::Op;
        tok_.text = std::string(1, c);
        ++i_;
    }

    const std::string& src_;
    size_t i_ = 0;
    Token tok_;
};

class Parser {
  public:
    explicit Parser(const std::string& text) : lex_(text), text_(text) {}

    ExprPtr run() {
        int32_t root = parse_expr();
        if (lex_.peek().type != Token::End)
            lex_.fail_here("unexpected trailing input '" + lex_.peek().text + "'");
        (void)root;
        return b_.finish(text_);
    }

  private:
    int32_t parse_expr() {
        size_t begin = lex_.peek().pos;
        int32_t acc = parse_term();
        while (lex_.peek().type == Token::Op &&
               (lex_.peek().text == "+" || lex_.peek().text == "-")) {
            std::string op = lex_.take().text;
            int32_t rhs = parse_term();
            acc = (op == "+") ? b_.add(acc, rhs) : b_.sub(acc, rhs);
            set_span(acc, begin);
        }
        return acc;
    }

    int32_t parse_term() {
        size_t begin = lex_.peek().pos;
        int32_t acc = parse_factor();
        while (lex_.peek().type == Token::Op &&
               (lex_.peek().text == "*" || lex_.peek().text == "/")) {
            std::string op = lex_.take().text;
            int32_t rhs = parse_factor();
            acc = (op == "*") ? b_.mul(acc, rhs) : b_.div(acc, rhs);
            set_span(acc, begin);
        }
        return acc;
    }

    int32_t parse_factor() {
        if (lex_.peek().type == Token::Op && lex_.peek().text == "-") {
            size_t begin = lex_.take().pos;
            int32_t a = parse_factor();
            int32_t n = b_.neg(a);
            set_span(n, begin);
            return n;
        }
        if (lex_.peek().type == Token::Op && lex_.peek().text == "+") {
            lex_.take();
            return parse_factor();
        }
        return parse_power();
    }

    int32_t parse_power() {
        size_t begin = lex_.peek().pos;
        int32_t base = parse_atom();
        if (lex_.peek().type == Token::Op && lex_.peek().text == "^") {
            lex_.take();
            Token e = lex_.peek();
            if (e.type != Token::Number)
                lex_.fail_here("exponent must be a nonnegative integer literal");
            for (char c : e.text)
                if (!std::isdigit(static_cast<unsigned char>(c)))
                    lex_.fail("exponent must be a nonnegative integer literal", e.pos);
            lex_.take();
            long k = std::strtol(e.text.c_str(), nullptr, 10);
            int32_t p = b_.pow(base, k);
            set_span(p, begin);
            return p;
        }
        return base;
    }

    int32_t parse_atom() {
        Token t = lex_.peek();
        if (t.type == Token::Number) {
            lex_.take();
            int32_t n = b_.constant({t.number, 0.0});
            set_span2(n, t.pos, t.pos + t.text.size());
            return n;
        }
        if (t.type == Token::Ident) {
            lex_.take();
            if (t.text == "z") {
                int32_t n = b_.variable();
                set_span2(n, t.pos, t.pos + 1);
                return n;
            }
            if (t.text == "i") {
                int32_t n = b_.constant({0.0, 1.0});
                set_span2(n, t.pos, t.pos + 1);
                return n;
            }
            if (t.text == "pi") {
                int32_t n = b_.constant({3.14159265358979323846, 0.0});
                set_span2(n, t.pos, t.pos + 2);
                return n;
            }
            NodeKind kind;
            if (t.text == "exp")
                kind = NodeKind::Exp;
            else if (t.text == "sin")
                kind = NodeKind::Sin;
            else if (t.text == "cos")
                kind = NodeKind::Cos;
            else
                lex_.fail("unknown identifier '" + t.text + "'", t.pos);
            expect("(");
            int32_t arg = parse_expr();
            size_t endpos = expect(")");
            int32_t n = b_.fn(kind, arg);
            set_span2(n, t.pos, endpos + 1);
            return n;
        }
        if (t.type == Token::Op && t.text == "(") {
            lex_.take();
            int32_t inner = parse_expr();
            expect(")");
            return inner;
        }
        lex_.fail_here(t.type == Token::End ? "unexpected end of input"
                                            : "unexpected token '" + t.text + "'");
    }

    size_t expect(const std::string& op) {
        Token t = lex_.peek();
        if (t.type != Token::Op || t.text != op)
            lex_.fail_here("expected '" + op + "'");
        lex_.take();
        return t.pos;
    }

    void set_span(int32_t node, size_t begin) {
        auto& n = b_.expr->nodes[static_cast<size_t>(node)];
        n.src_begin = static_cast<uint32_t>(begin);
        n.src_end = static_cast<uint32_t>(lex_.peek().pos);
        while (n.src_end > n.src_begin &&
               std::isspace(static_cast<unsigned char>(text_[n.src_end - 1])))
            --n.src_end;
    }

    void set_span2(int32_t node, size_t begin, size_t end) {
        auto& n = b_.expr->nodes[static_cast<size_t>(node)];
        n.src_begin = static_cast<uint32_t>(begin);
        n.src_end = static_cast<uint32_t>(end);
    }

    Lexer lex_;
    std::string text_;
    ExprBuilder b_;
};

} // namespace

int32_t ExprBuilder::push(ExprNode n) {
    expr->nodes.push_back(n);
    return static_cast<int32_t>(expr->nodes.size() - 1);
}

int32_t ExprBuilder::constant(Complex c) {
    ExprNode n;
    n.kind = NodeKind::Constant;
    n.value = c;
    return push(n);
}

int32_t ExprBuilder::variable() {
    ExprNode n;
    n.kind = NodeKind::Variable;
    return push(n);
}

int32_t ExprBuilder::add(int32_t a, int32_t b) {
    ExprNode n;
    n.kind = NodeKind::Add;
    n.lhs = a;
    n.rhs = b;
    return push(n);
}

int32_t ExprBuilder::sub(int32_t a, int32_t b) {
    ExprNode n;
    n.kind = NodeKind::Sub;
    n.lhs = a;
    n.rhs = b;
    return push(n);
}

int32_t ExprBuilder::mul(int32_t a, int32_t b) {
    ExprNode n;
    n.kind = NodeKind::Mul;
    n.lhs = a;
    n.rhs = b;
    return push(n);
}

int32_t ExprBuilder::div(int32_t a, int32_t b) {
    ExprNode n;
    n.kind = NodeKind::Div;
    n.lhs = a;
    n.rhs = b;
    return push(n);
}

int32_t ExprBuilder::pow(int32_t a, long k) {
    if (k < 0) throw std::invalid_argument("pow: exponent must be >= 0");
    ExprNode n;
    n.kind = NodeKind::Pow;
    n.lhs = a;
    n.ipow = k;
    return push(n);
}

int32_t ExprBuilder::neg(int32_t a) {
    ExprNode n;
    n.kind = NodeKind::Neg;
    n.lhs = a;
    return push(n);
}

int32_t ExprBuilder::fn(NodeKind kind, int32_t a) {
    ExprNode n;
    n.kind = kind;
    n.lhs = a;
    return push(n);
}

ExprPtr ExprBuilder::finish(std::string source_text) {
    expr->source = std::move(source_text);
    return expr;
}

ExprPtr parse_expression(const std::string& text) {
    return Parser(text).run();
}

Jet2 eval_jet(const Expr& expr, Complex z, EvalScratch& scratch) {
    scratch.slots.resize(expr.nodes.size());
    Jet2* s = scratch.slots.data();
    const size_t n = expr.nodes.size();
    for (size_t idx = 0; idx < n; ++idx) {
        const ExprNode& node = expr.nodes[idx];
        switch (node.kind) {
            case NodeKind::Constant: s[idx] = Jet2::constant(node.value); break;
            case NodeKind::Variable: s[idx] = Jet2::variable(z); break;
            case NodeKind::Add: s[idx] = s[node.lhs] + s[node.rhs]; break;
            case NodeKind::Sub: s[idx] = s[node.lhs] - s[node.rhs]; break;
            case NodeKind::Mul: s[idx] = s[node.lhs] * s[node.rhs]; break;
            case NodeKind::Div: {
                const Jet2& den = s[node.rhs];
                if (den.f.real() == 0.0 && den.f.imag() == 0.0)
                    throw DivisionByZeroAt(z, expr.span_text(node.rhs));
                s[idx] = s[node.lhs] / den;
                break;
            }
            case NodeKind::Pow: s[idx] = pow(s[node.lhs], node.ipow); break;
            case NodeKind::Neg: s[idx] = -s[node.lhs]; break;
            case NodeKind::Exp: s[idx] = exp(s[node.lhs]); break;
            case NodeKind::Sin: s[idx] = sin(s[node.lhs]); break;
            case NodeKind::Cos: s[idx] = cos(s[node.lhs]); break;
        }
    }
    return s[n - 1];
}

Jet2 eval_jet(const Expr& expr, Complex z) {
    EvalScratch scratch;
    return eval_jet(expr, z, scratch);
}

} // namespace nbasin
