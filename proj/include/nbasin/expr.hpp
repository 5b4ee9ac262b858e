// SPDX-License-Identifier: Apache-2.0
//
// Expression trees for entire functions and their jet evaluation.
//
// Grammar of the plain-text mini-language (see README for the full table):
//
//   expr    := term (('+' | '-') term)*
//   term    := factor (('*' | '/') factor)*
//   factor  := '-' factor | power
//   power   := atom ('^' uint)?
//   atom    := number | 'i' | 'pi' | 'z' | name '(' expr ')' | '(' expr ')'
//   name    := 'exp' | 'sin' | 'cos'
//
// Exponents are nonnegative integer literals, so every built-in stays
// entire. Division is accepted (users type f/f'-style expressions) but a
// vanishing denominator is reported at evaluation time, never folded to
// NaN.

#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "nbasin/jet.hpp"

namespace nbasin {

enum class NodeKind : uint8_t {
    Constant,
    Variable,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Neg,
    Exp,
    Sin,
    Cos,
};

struct ExprNode {
    NodeKind kind{};
    int32_t lhs = -1; // child indices; unary ops use lhs only
    int32_t rhs = -1;
    Complex value{};  // Constant payload
    long ipow = 0;    // Pow exponent
    uint32_t src_begin = 0; // span into Expr::source, for diagnostics
    uint32_t src_end = 0;
};

// Flattened tree in topological order (children precede parents, the last
// node is the root). Immutable after construction; shared freely between
// threads.
struct Expr {
    std::vector<ExprNode> nodes;
    std::string source;

    std::string span_text(int32_t node) const {
        const ExprNode& n = nodes[static_cast<size_t>(node)];
        if (n.src_end <= n.src_begin || n.src_end > source.size()) return source;
        return source.substr(n.src_begin, n.src_end - n.src_begin);
    }
};

using ExprPtr = std::shared_ptr<const Expr>;

struct ParseError : std::runtime_error {
    int line;
    int column;
    ParseError(const std::string& msg, int line_, int col_)
        : std::runtime_error(msg + " (line " + std::to_string(line_) + ", column " +
                             std::to_string(col_) + ")"),
          line(line_), column(col_) {}
};

struct DivisionByZeroAt : std::runtime_error {
    Complex at;
    std::string subexpression;
    DivisionByZeroAt(Complex z, std::string sub)
        : std::runtime_error("division by zero: denominator '" + sub +
                             "' vanishes at z = (" + std::to_string(z.real()) + ", " +
                             std::to_string(z.imag()) + ")"),
          at(z), subexpression(std::move(sub)) {}
};

ExprPtr parse_expression(const std::string& text);

// Reusable evaluation workspace; one per thread.
struct EvalScratch {
    std::vector<Jet2> slots;
};

// Value and first two derivatives at z. Throws DivisionByZeroAt when a
// quotient denominator vanishes exactly at z.
Jet2 eval_jet(const Expr& expr, Complex z, EvalScratch& scratch);
Jet2 eval_jet(const Expr& expr, Complex z);

// Programmatic constructors (used by the built-in family).
struct ExprBuilder {
    std::shared_ptr<Expr> expr = std::make_shared<Expr>();
    int32_t constant(Complex c);
    int32_t variable();
    int32_t add(int32_t a, int32_t b);
    int32_t sub(int32_t a, int32_t b);
    int32_t mul(int32_t a, int32_t b);
    int32_t div(int32_t a, int32_t b);
    int32_t pow(int32_t a, long k);
    int32_t neg(int32_t a);
    int32_t fn(NodeKind kind, int32_t a);
    ExprPtr finish(std::string source_text);

  private:
    int32_t push(ExprNode n);
};

} // namespace nbasin
