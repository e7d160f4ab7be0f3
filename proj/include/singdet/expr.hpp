#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "singdet/errors.hpp"

namespace singdet {

// Immutable arithmetic expression in one free variable x.  Supports
// + - * / ^ (right-associative), unary minus, parentheses and the functions
// sin, cos, exp, log, sqrt.  Precedence: ^  >  unary minus  >  * /  >  + -.
class Expr {
public:
    Expr() = default;  // zero expression

    static Expr parse(std::string_view source);  // throws ParseError with byte offset

    double eval(double x) const;  // throws EvalError on domain/finiteness failure
    Expr derivative() const;
    std::string to_string() const;

    bool is_literal_zero() const;
    bool equals(const Expr& other) const;

    // Builders (used to fold spectral shifts and perturbations into V).
    static Expr number(double v);
    static Expr variable();
    static Expr add(Expr a, Expr b);
    static Expr sub(Expr a, Expr b);
    static Expr mul(Expr a, Expr b);
    static Expr div(Expr a, Expr b);

    struct Node;

private:
    explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

}  // namespace singdet
