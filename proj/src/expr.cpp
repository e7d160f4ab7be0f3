#include "singdet/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <utility>
#include <vector>

namespace singdet {

namespace {
enum class Kind { Num, Var, Add, Sub, Mul, Div, Pow, Neg, Call };
enum class Func { Sin, Cos, Exp, Log, Sqrt };

const char* func_name(Func f) {
    switch (f) {
        case Func::Sin: return "sin";
        case Func::Cos: return "cos";
        case Func::Exp: return "exp";
        case Func::Log: return "log";
        case Func::Sqrt: return "sqrt";
    }
    return "?";
}
}  // namespace

struct Expr::Node {
    Kind kind;
    double value = 0.0;  // Num
    Func func = Func::Sin;
    std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr make_num(double v) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = Kind::Num;
    n->value = v;
    return n;
}

NodePtr make_node(Kind k, NodePtr a, NodePtr b = nullptr) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodePtr make_call(Func f, NodePtr a) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = Kind::Call;
    n->func = f;
    n->a = std::move(a);
    return n;
}

bool is_num(const NodePtr& n, double v) { return n->kind == Kind::Num && n->value == v; }

// Light folding so derivatives stay readable and cheap to evaluate.
NodePtr fold_add(NodePtr a, NodePtr b) {
    if (is_num(a, 0.0)) return b;
    if (is_num(b, 0.0)) return a;
    if (a->kind == Kind::Num && b->kind == Kind::Num) return make_num(a->value + b->value);
    return make_node(Kind::Add, std::move(a), std::move(b));
}

NodePtr fold_sub(NodePtr a, NodePtr b) {
    if (is_num(b, 0.0)) return a;
    if (a->kind == Kind::Num && b->kind == Kind::Num) return make_num(a->value - b->value);
    if (is_num(a, 0.0)) return make_node(Kind::Neg, std::move(b));
    return make_node(Kind::Sub, std::move(a), std::move(b));
}

NodePtr fold_mul(NodePtr a, NodePtr b) {
    if (is_num(a, 0.0) || is_num(b, 0.0)) return make_num(0.0);
    if (is_num(a, 1.0)) return b;
    if (is_num(b, 1.0)) return a;
    if (a->kind == Kind::Num && b->kind == Kind::Num) return make_num(a->value * b->value);
    return make_node(Kind::Mul, std::move(a), std::move(b));
}

NodePtr fold_div(NodePtr a, NodePtr b) {
    if (is_num(a, 0.0)) return make_num(0.0);
    if (is_num(b, 1.0)) return a;
    return make_node(Kind::Div, std::move(a), std::move(b));
}

double eval_node(const Expr::Node* n, double x) {
    switch (n->kind) {
        case Kind::Num: return n->value;
        case Kind::Var: return x;
        case Kind::Add: return eval_node(n->a.get(), x) + eval_node(n->b.get(), x);
        case Kind::Sub: return eval_node(n->a.get(), x) - eval_node(n->b.get(), x);
        case Kind::Mul: return eval_node(n->a.get(), x) * eval_node(n->b.get(), x);
        case Kind::Div: {
            double num = eval_node(n->a.get(), x), den = eval_node(n->b.get(), x);
            if (den == 0.0) throw EvalError("division by zero", x);
            return num / den;
        }
        case Kind::Pow: {
            double base = eval_node(n->a.get(), x), e = eval_node(n->b.get(), x);
            double r = std::pow(base, e);
            if (!std::isfinite(r)) throw EvalError("power produced non-finite value", x);
            return r;
        }
        case Kind::Neg: return -eval_node(n->a.get(), x);
        case Kind::Call: {
            double v = eval_node(n->a.get(), x);
            switch (n->func) {
                case Func::Sin: return std::sin(v);
                case Func::Cos: return std::cos(v);
                case Func::Exp: {
                    double r = std::exp(v);
                    if (!std::isfinite(r)) throw EvalError("exp overflow", x);
                    return r;
                }
                case Func::Log:
                    if (v <= 0.0) throw EvalError("log of non-positive argument", x);
                    return std::log(v);
                case Func::Sqrt:
                    if (v < 0.0) throw EvalError("sqrt of negative argument", x);
                    return std::sqrt(v);
            }
        }
    }
    throw EvalError("corrupt expression node", x);
}

NodePtr diff_node(const NodePtr& n);

NodePtr diff_call(const NodePtr& n) {
    const NodePtr& u = n->a;
    NodePtr du = diff_node(u);
    switch (n->func) {
        case Func::Sin: return fold_mul(make_call(Func::Cos, u), du);
        case Func::Cos: return make_node(Kind::Neg, fold_mul(make_call(Func::Sin, u), du));
        case Func::Exp: return fold_mul(make_call(Func::Exp, u), du);
        case Func::Log: return fold_div(du, u);
        case Func::Sqrt:
            return fold_div(du, fold_mul(make_num(2.0), make_call(Func::Sqrt, u)));
    }
    return make_num(0.0);
}

NodePtr diff_node(const NodePtr& n) {
    switch (n->kind) {
        case Kind::Num: return make_num(0.0);
        case Kind::Var: return make_num(1.0);
        case Kind::Add: return fold_add(diff_node(n->a), diff_node(n->b));
        case Kind::Sub: return fold_sub(diff_node(n->a), diff_node(n->b));
        case Kind::Mul:
            return fold_add(fold_mul(diff_node(n->a), n->b), fold_mul(n->a, diff_node(n->b)));
        case Kind::Div:
            return fold_div(
                fold_sub(fold_mul(diff_node(n->a), n->b), fold_mul(n->a, diff_node(n->b))),
                make_node(Kind::Pow, n->b, make_num(2.0)));
        case Kind::Pow: {
            if (n->b->kind == Kind::Num) {
                // d/dx u^c = c u^{c-1} u'
                double c = n->b->value;
                return fold_mul(fold_mul(make_num(c), make_node(Kind::Pow, n->a, make_num(c - 1.0))),
                                diff_node(n->a));
            }
            // general u^v = exp(v log u)
            NodePtr u = n->a, v = n->b;
            NodePtr term = fold_add(fold_mul(diff_node(v), make_call(Func::Log, u)),
                                    fold_div(fold_mul(v, diff_node(u)), u));
            return fold_mul(make_node(Kind::Pow, u, v), term);
        }
        case Kind::Neg: return make_node(Kind::Neg, diff_node(n->a));
        case Kind::Call: return diff_call(n);
    }
    return make_num(0.0);
}

int precedence(Kind k) {
    switch (k) {
        case Kind::Add:
        case Kind::Sub: return 1;
        case Kind::Mul:
        case Kind::Div: return 2;
        case Kind::Neg: return 3;
        case Kind::Pow: return 4;
        default: return 5;
    }
}

void print_node(const Expr::Node* n, std::string& out);

void print_child(const Expr::Node* child, int parent_prec, bool force_paren, std::string& out) {
    bool need = precedence(child->kind) < parent_prec || force_paren;
    if (need) out += '(';
    print_node(child, out);
    if (need) out += ')';
}

std::string format_number(double v) {
    char buf[40];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, p);
}

void print_node(const Expr::Node* n, std::string& out) {
    switch (n->kind) {
        case Kind::Num:
            if (n->value < 0.0) {
                out += '(' + format_number(n->value) + ')';
            } else {
                out += format_number(n->value);
            }
            return;
        case Kind::Var: out += 'x'; return;
        case Kind::Add:
            print_child(n->a.get(), 1, false, out);
            out += " + ";
            print_child(n->b.get(), 1, false, out);
            return;
        case Kind::Sub:
            print_child(n->a.get(), 1, false, out);
            out += " - ";
            // right child of '-' needs parens at equal precedence
            print_child(n->b.get(), 2, false, out);
            return;
        case Kind::Mul:
            print_child(n->a.get(), 2, false, out);
            out += "*";
            print_child(n->b.get(), 2, false, out);
            return;
        case Kind::Div:
            print_child(n->a.get(), 2, false, out);
            out += "/";
            print_child(n->b.get(), 3, false, out);
            return;
        case Kind::Neg:
            out += '-';
            print_child(n->a.get(), 3, false, out);
            return;
        case Kind::Pow:
            // '^' binds tighter than unary minus, so parenthesize both sides
            // unless they are atoms.
            print_child(n->a.get(), 5, false, out);
            out += '^';
            print_child(n->b.get(), 4, false, out);
            return;
        case Kind::Call:
            out += func_name(n->func);
            out += '(';
            print_node(n->a.get(), out);
            out += ')';
            return;
    }
}

bool nodes_equal(const Expr::Node* a, const Expr::Node* b) {
    if (a == b) return true;
    if (!a || !b || a->kind != b->kind) return false;
    switch (a->kind) {
        case Kind::Num: return a->value == b->value;
        case Kind::Var: return true;
        case Kind::Call:
            if (a->func != b->func) return false;
            return nodes_equal(a->a.get(), b->a.get());
        case Kind::Neg: return nodes_equal(a->a.get(), b->a.get());
        default:
            return nodes_equal(a->a.get(), b->a.get()) && nodes_equal(a->b.get(), b->b.get());
    }
}

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    NodePtr run() {
        NodePtr e = parse_expr();
        skip_ws();
        if (pos_ != src_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, pos_); }

    void skip_ws() {
        while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t')) ++pos_;
    }

    bool peek(char c) {
        skip_ws();
        return pos_ < src_.size() && src_[pos_] == c;
    }

    bool accept(char c) {
        if (peek(c)) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr parse_expr() {
        NodePtr left = parse_term();
        for (;;) {
            if (accept('+'))
                left = make_node(Kind::Add, left, parse_term());
            else if (accept('-'))
                left = make_node(Kind::Sub, left, parse_term());
            else
                return left;
        }
    }

    NodePtr parse_term() {
        NodePtr left = parse_unary();
        for (;;) {
            if (accept('*'))
                left = make_node(Kind::Mul, left, parse_unary());
            else if (accept('/'))
                left = make_node(Kind::Div, left, parse_unary());
            else
                return left;
        }
    }

    NodePtr parse_unary() {
        if (accept('-')) return make_node(Kind::Neg, parse_unary());
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_atom();
        if (accept('^')) return make_node(Kind::Pow, base, parse_unary());
        return base;
    }

    NodePtr parse_atom() {
        skip_ws();
        if (pos_ >= src_.size()) fail("unexpected end of expression");
        char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = parse_expr();
            if (!accept(')')) fail("expected ')'");
            return e;
        }
        if ((c >= '0' && c <= '9') || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
        fail(std::string("unexpected character '") + c + "'");
    }

    NodePtr parse_number() {
        const char* begin = src_.data() + pos_;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) fail("malformed number");
        pos_ += static_cast<std::size_t>(end - begin);
        return make_num(v);
    }

    NodePtr parse_ident() {
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        std::string_view name = src_.substr(start, pos_ - start);
        if (name == "x") return make_node(Kind::Var, nullptr);
        Func f;
        if (name == "sin")
            f = Func::Sin;
        else if (name == "cos")
            f = Func::Cos;
        else if (name == "exp")
            f = Func::Exp;
        else if (name == "log")
            f = Func::Log;
        else if (name == "sqrt")
            f = Func::Sqrt;
        else {
            pos_ = start;
            fail("unknown identifier '" + std::string(name) + "'");
        }
        if (!accept('(')) fail("expected '(' after function name");
        NodePtr arg = parse_expr();
        if (!accept(')')) fail("expected ')'");
        return make_call(f, arg);
    }
};

}  // namespace

Expr Expr::parse(std::string_view source) { return Expr(Parser(source).run()); }

double Expr::eval(double x) const {
    if (!node_) return 0.0;
    double v = eval_node(node_.get(), x);
    if (!std::isfinite(v)) throw EvalError("expression evaluated to non-finite value", x);
    return v;
}

Expr Expr::derivative() const {
    if (!node_) return Expr();
    return Expr(diff_node(node_));
}

std::string Expr::to_string() const {
    if (!node_) return "0";
    std::string out;
    print_node(node_.get(), out);
    return out;
}

bool Expr::is_literal_zero() const { return !node_ || is_num(node_, 0.0); }

bool Expr::equals(const Expr& other) const {
    if (!node_ && !other.node_) return true;
    if (!node_ || !other.node_) return is_literal_zero() && other.is_literal_zero();
    return nodes_equal(node_.get(), other.node_.get());
}

Expr Expr::number(double v) { return Expr(make_num(v)); }
Expr Expr::variable() { return Expr(make_node(Kind::Var, nullptr)); }
Expr Expr::add(Expr a, Expr b) {
    if (!a.node_) a = number(0.0);
    if (!b.node_) b = number(0.0);
    return Expr(fold_add(a.node_, b.node_));
}
Expr Expr::sub(Expr a, Expr b) {
    if (!a.node_) a = number(0.0);
    if (!b.node_) b = number(0.0);
    return Expr(fold_sub(a.node_, b.node_));
}
Expr Expr::mul(Expr a, Expr b) {
    if (!a.node_) a = number(0.0);
    if (!b.node_) b = number(0.0);
    return Expr(fold_mul(a.node_, b.node_));
}
Expr Expr::div(Expr a, Expr b) {
    if (!a.node_) a = number(0.0);
    if (!b.node_) b = number(1.0);
    return Expr(fold_div(a.node_, b.node_));
}

}  // namespace singdet
