#include "szego/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>

#include "szego/error.hpp"

namespace szego {

using Kind = Expr::Kind;
using Func = Expr::Func;

// ---------------------------------------------------------------------------
// construction

namespace {

std::shared_ptr<Expr::Node> make_node(Kind kind) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = kind;
    return n;
}

bool is_number(const Expr& e, double v) { return e.kind() == Kind::Number && e.node().value == v; }

}  // namespace

Expr Expr::number(double v) {
    auto n = make_node(Kind::Number);
    n->value = v;
    return Expr(std::move(n));
}

Expr Expr::constant(Const c) {
    auto n = make_node(Kind::Constant);
    n->constant = c;
    return Expr(std::move(n));
}

Expr Expr::variable(int index) {
    auto n = make_node(Kind::Variable);
    n->variable = index;
    return Expr(std::move(n));
}

Expr Expr::negate(Expr a) {
    auto n = make_node(Kind::Negate);
    n->args.push_back(std::move(a));
    return Expr(std::move(n));
}

Expr Expr::binary(Kind kind, Expr a, Expr b) {
    auto n = make_node(kind);
    n->args.push_back(std::move(a));
    n->args.push_back(std::move(b));
    return Expr(std::move(n));
}

Expr Expr::call(Func f, std::vector<Expr> args, int flat_order) {
    auto n = make_node(Kind::Call);
    n->func = f;
    n->flat_order = flat_order;
    n->args = std::move(args);
    return Expr(std::move(n));
}

// ---------------------------------------------------------------------------
// parsing

namespace {

struct FuncInfo {
    const char* name;
    Func func;
    std::size_t arity;
};

constexpr FuncInfo kFunctions[] = {
    {"exp", Func::Exp, 1},   {"log", Func::Log, 1},   {"sin", Func::Sin, 1},  {"cos", Func::Cos, 1},
    {"sqrt", Func::Sqrt, 1}, {"bump", Func::Bump, 3}, {"flat", Func::Flat, 1},
};

class Parser {
public:
    Parser(std::string_view text, int dim) : text_(text), dim_(dim) {}

    Expr parse_all() {
        Expr e = parse_expr();
        skip_space();
        if (pos_ != text_.size()) throw SyntaxError(std::string("unexpected '") + text_[pos_] + "'", pos_);
        return e;
    }

private:
    std::string_view text_;
    int dim_;
    std::size_t pos_ = 0;

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            if (pos_ >= text_.size()) throw SyntaxError(std::string("expected '") + c + "' but input ended", pos_);
            throw SyntaxError(std::string("expected '") + c + "'", pos_);
        }
    }

    Expr parse_expr() {
        Expr lhs = parse_term();
        for (;;) {
            if (accept('+'))
                lhs = Expr::binary(Kind::Add, lhs, parse_term());
            else if (accept('-'))
                lhs = Expr::binary(Kind::Sub, lhs, parse_term());
            else
                return lhs;
        }
    }

    Expr parse_term() {
        Expr lhs = parse_unary();
        for (;;) {
            if (accept('*'))
                lhs = Expr::binary(Kind::Mul, lhs, parse_unary());
            else if (accept('/'))
                lhs = Expr::binary(Kind::Div, lhs, parse_unary());
            else
                return lhs;
        }
    }

    Expr parse_unary() {
        if (accept('-')) return Expr::negate(parse_unary());
        return parse_power();
    }

    Expr parse_power() {
        Expr base = parse_primary();
        if (accept('^')) return Expr::binary(Kind::Pow, base, parse_unary());
        return base;
    }

    Expr parse_primary() {
        skip_space();
        if (pos_ >= text_.size()) throw SyntaxError("unexpected end of input", pos_);
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Expr inner = parse_expr();
            expect(')');
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        throw SyntaxError(std::string("unexpected '") + c + "'", pos_);
    }

    Expr parse_number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            std::size_t n = 0;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_, ++n;
            return n;
        };
        std::size_t count = digits();
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            count += digits();
        }
        if (count == 0) throw SyntaxError("malformed number", start);
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            // Only treat as exponent if digits follow; otherwise "2e" would swallow the constant e.
            std::size_t save = pos_++;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (digits() == 0) pos_ = save;
        }
        const std::string literal(text_.substr(start, pos_ - start));
        return Expr::number(std::strtod(literal.c_str(), nullptr));
    }

    Expr parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        const std::string name(text_.substr(start, pos_ - start));

        skip_space();
        if (pos_ < text_.size() && text_[pos_] == '(') return parse_call(name, start);

        if (name == "pi") return Expr::constant(Expr::Const::Pi);
        if (name == "e") return Expr::constant(Expr::Const::E);
        if (name.size() > 1 && name[0] == 't' &&
            name.find_first_not_of("0123456789", 1) == std::string::npos && name[1] != '0') {
            const int index = std::atoi(name.c_str() + 1);
            if (index >= 1 && index <= dim_) return Expr::variable(index - 1);
        }
        throw UnknownVariable("unknown identifier '" + name + "' (variables are t1..t" + std::to_string(dim_) +
                              ") at byte " + std::to_string(start));
    }

    Expr parse_call(const std::string& name, std::size_t start) {
        Func func{};
        std::size_t arity = 0;
        int flat_order = 0;
        bool found = false;
        for (const auto& f : kFunctions) {
            if (name == f.name) {
                func = f.func;
                arity = f.arity;
                found = true;
            }
        }
        if (!found && name.rfind("flat_", 0) == 0 && name.size() > 5 &&
            name.find_first_not_of("0123456789", 5) == std::string::npos) {
            func = Func::Flat;
            arity = 1;
            flat_order = std::atoi(name.c_str() + 5);
            found = true;
        }
        if (!found) throw SyntaxError("unknown function '" + name + "'", start);

        expect('(');
        std::vector<Expr> args;
        args.push_back(parse_expr());
        while (accept(',')) args.push_back(parse_expr());
        expect(')');
        if (args.size() != arity)
            throw SyntaxError(name + " takes " + std::to_string(arity) + " argument(s), got " +
                                  std::to_string(args.size()),
                              start);
        return Expr::call(func, std::move(args), flat_order);
    }
};

}  // namespace

Expr parse(std::string_view text, int dim) {
    if (dim < 0) throw InvalidArgument("expression dimension must be non-negative");
    return Parser(text, dim).parse_all();
}

// ---------------------------------------------------------------------------
// printing

namespace {

const char* func_name(Func f) {
    for (const auto& info : kFunctions)
        if (info.func == f) return info.name;
    return "?";
}

void print_to(const Expr& e, std::string& out) {
    const auto& n = e.node();
    switch (n.kind) {
        case Kind::Number: {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", std::fabs(n.value));
            if (std::signbit(n.value))
                out += std::string("(-") + buf + ")";
            else
                out += buf;
            return;
        }
        case Kind::Constant:
            out += n.constant == Expr::Const::Pi ? "pi" : "e";
            return;
        case Kind::Variable:
            out += "t" + std::to_string(n.variable + 1);
            return;
        case Kind::Negate:
            out += "(-";
            print_to(n.args[0], out);
            out += ")";
            return;
        case Kind::Add:
        case Kind::Sub:
        case Kind::Mul:
        case Kind::Div:
        case Kind::Pow: {
            static constexpr char ops[] = {'+', '-', '*', '/', '^'};
            const char op = ops[static_cast<int>(n.kind) - static_cast<int>(Kind::Add)];
            out += "(";
            print_to(n.args[0], out);
            out += op;
            print_to(n.args[1], out);
            out += ")";
            return;
        }
        case Kind::Call:
            if (n.func == Func::Flat && n.flat_order > 0)
                out += "flat_" + std::to_string(n.flat_order);
            else
                out += func_name(n.func);
            out += "(";
            for (std::size_t i = 0; i < n.args.size(); ++i) {
                if (i) out += ",";
                print_to(n.args[i], out);
            }
            out += ")";
            return;
    }
}

}  // namespace

std::string print(const Expr& e) {
    std::string out;
    print_to(e, out);
    return out;
}

bool structurally_equal(const Expr& a, const Expr& b) {
    const auto& x = a.node();
    const auto& y = b.node();
    if (x.kind != y.kind) return false;
    switch (x.kind) {
        case Kind::Number:
            return x.value == y.value;
        case Kind::Constant:
            return x.constant == y.constant;
        case Kind::Variable:
            return x.variable == y.variable;
        case Kind::Call:
            if (x.func != y.func || x.flat_order != y.flat_order) return false;
            break;
        default:
            break;
    }
    if (x.args.size() != y.args.size()) return false;
    for (std::size_t i = 0; i < x.args.size(); ++i)
        if (!structurally_equal(x.args[i], y.args[i])) return false;
    return true;
}

int max_variable(const Expr& e) {
    const auto& n = e.node();
    int m = n.kind == Kind::Variable ? n.variable : -1;
    for (const auto& a : n.args) m = std::max(m, max_variable(a));
    return m;
}

// ---------------------------------------------------------------------------
// evaluation

namespace {

// exp(-1/x) P_k(1/x), the k-th derivative of flat(x), with P_0 = 1 and
// P_{k+1}(y) = y^2 (P_k(y) - P_k'(y)).
double flat_derivative(int order, double x) {
    if (!(x > 0)) return 0.0;
    const double y = 1.0 / x;
    if (y > 700.0) return 0.0;
    std::vector<double> p{1.0};
    for (int k = 0; k < order; ++k) {
        std::vector<double> next(p.size() + 2, 0.0);
        for (std::size_t i = 0; i < p.size(); ++i) {
            next[i + 2] += p[i];
            if (i > 0) next[i + 1] -= static_cast<double>(i) * p[i];
        }
        p = std::move(next);
    }
    double poly = 0.0;
    for (std::size_t i = p.size(); i-- > 0;) poly = poly * y + p[i];
    return std::exp(-y) * poly;
}

double smooth_step(double x) {
    const double f = flat_derivative(0, x);
    const double g = flat_derivative(0, 1.0 - x);
    return f / (f + g);
}

double eval_node(const Expr& e, std::span<const double> t) {
    const auto& n = e.node();
    auto arg = [&](std::size_t i) { return eval_node(n.args[i], t); };
    auto fail = [&](const char* what) -> double { throw DomainError(what, print(e)); };
    switch (n.kind) {
        case Kind::Number:
            return n.value;
        case Kind::Constant:
            return n.constant == Expr::Const::Pi ? std::numbers::pi : std::numbers::e;
        case Kind::Variable:
            if (static_cast<std::size_t>(n.variable) >= t.size())
                throw InvalidArgument("point has " + std::to_string(t.size()) + " components but expression uses t" +
                                      std::to_string(n.variable + 1));
            return t[static_cast<std::size_t>(n.variable)];
        case Kind::Negate:
            return -arg(0);
        case Kind::Add:
            return arg(0) + arg(1);
        case Kind::Sub:
            return arg(0) - arg(1);
        case Kind::Mul:
            return arg(0) * arg(1);
        case Kind::Div: {
            const double den = arg(1);
            if (den == 0.0) return fail("division by zero");
            return arg(0) / den;
        }
        case Kind::Pow: {
            const double base = arg(0);
            const double ex = arg(1);
            if (base < 0 && ex != std::floor(ex)) return fail("negative base with non-integer exponent");
            if (base == 0 && ex < 0) return fail("zero raised to a negative power");
            const double v = std::pow(base, ex);
            if (!std::isfinite(v)) return fail("overflow");
            return v;
        }
        case Kind::Call:
            break;
    }
    switch (n.func) {
        case Func::Exp: {
            const double v = std::exp(arg(0));
            if (!std::isfinite(v)) return fail("overflow");
            return v;
        }
        case Func::Log: {
            const double x = arg(0);
            if (!(x > 0)) return fail("log of non-positive value");
            return std::log(x);
        }
        case Func::Sin:
            return std::sin(arg(0));
        case Func::Cos:
            return std::cos(arg(0));
        case Func::Sqrt: {
            const double x = arg(0);
            if (x < 0) return fail("sqrt of negative value");
            return std::sqrt(x);
        }
        case Func::Flat:
            return flat_derivative(n.flat_order, arg(0));
        case Func::Bump: {
            const double x = arg(0);
            const double a = arg(1);
            const double b = arg(2);
            if (!(b > a)) return fail("bump needs lower < upper");
            const double h = 0.25 * (b - a);
            return smooth_step((x - a) / h) * smooth_step((b - x) / h);
        }
    }
    return fail("unknown node");
}

}  // namespace

double eval(const Expr& e, std::span<const double> t) {
    if (!e.valid()) throw InvalidArgument("evaluating an empty expression");
    const double v = eval_node(e, t);
    if (!std::isfinite(v)) throw DomainError("non-finite result", print(e));
    return v;
}

// ---------------------------------------------------------------------------
// differentiation

namespace {

Expr num(double v) { return Expr::number(v); }

Expr add(Expr a, Expr b) {
    if (is_number(a, 0)) return b;
    if (is_number(b, 0)) return a;
    return Expr::binary(Kind::Add, std::move(a), std::move(b));
}

Expr sub(Expr a, Expr b) {
    if (is_number(b, 0)) return a;
    if (is_number(a, 0)) return Expr::negate(std::move(b));
    return Expr::binary(Kind::Sub, std::move(a), std::move(b));
}

Expr mul(Expr a, Expr b) {
    if (is_number(a, 0) || is_number(b, 0)) return num(0);
    if (is_number(a, 1)) return b;
    if (is_number(b, 1)) return a;
    return Expr::binary(Kind::Mul, std::move(a), std::move(b));
}

Expr div(Expr a, Expr b) {
    if (is_number(a, 0)) return num(0);
    if (is_number(b, 1)) return a;
    return Expr::binary(Kind::Div, std::move(a), std::move(b));
}

Expr neg(Expr a) {
    if (is_number(a, 0)) return a;
    return Expr::negate(std::move(a));
}

Expr fn(Func f, Expr a, int order = 0) { return Expr::call(f, {std::move(a)}, order); }

// bump(x, a, b) = step((x-a)/h) * step((b-x)/h), h = (b-a)/4, step(u) = flat(u)/(flat(u)+flat(1-u)).
Expr expand_bump(const Expr& e) {
    const auto& args = e.node().args;
    const Expr h = Expr::binary(Kind::Div, Expr::binary(Kind::Sub, args[2], args[1]), num(4));
    auto step = [](const Expr& u) {
        const Expr f = fn(Func::Flat, u);
        const Expr g = fn(Func::Flat, Expr::binary(Kind::Sub, num(1), u));
        return Expr::binary(Kind::Div, f, Expr::binary(Kind::Add, f, g));
    };
    const Expr lo = Expr::binary(Kind::Div, Expr::binary(Kind::Sub, args[0], args[1]), h);
    const Expr hi = Expr::binary(Kind::Div, Expr::binary(Kind::Sub, args[2], args[0]), h);
    return Expr::binary(Kind::Mul, step(lo), step(hi));
}

}  // namespace

Expr derive(const Expr& e, int var) {
    const auto& n = e.node();
    switch (n.kind) {
        case Kind::Number:
        case Kind::Constant:
            return num(0);
        case Kind::Variable:
            return num(n.variable == var ? 1 : 0);
        case Kind::Negate:
            return neg(derive(n.args[0], var));
        case Kind::Add:
            return add(derive(n.args[0], var), derive(n.args[1], var));
        case Kind::Sub:
            return sub(derive(n.args[0], var), derive(n.args[1], var));
        case Kind::Mul: {
            const Expr& a = n.args[0];
            const Expr& b = n.args[1];
            return add(mul(derive(a, var), b), mul(a, derive(b, var)));
        }
        case Kind::Div: {
            const Expr& a = n.args[0];
            const Expr& b = n.args[1];
            const Expr num_part = sub(mul(derive(a, var), b), mul(a, derive(b, var)));
            return div(num_part, Expr::binary(Kind::Pow, b, num(2)));
        }
        case Kind::Pow: {
            const Expr& base = n.args[0];
            const Expr& ex = n.args[1];
            const Expr dbase = derive(base, var);
            if (max_variable(ex) < 0) {
                const Expr lowered = ex.kind() == Kind::Number ? num(ex.node().value - 1) : sub(ex, num(1));
                return mul(mul(ex, Expr::binary(Kind::Pow, base, lowered)), dbase);
            }
            const Expr dex = derive(ex, var);
            // base^ex * (ex' log(base) + ex base'/base)
            const Expr inner = add(mul(dex, fn(Func::Log, base)), div(mul(ex, dbase), base));
            return mul(e, inner);
        }
        case Kind::Call:
            break;
    }
    if (n.func == Func::Bump) return derive(expand_bump(e), var);

    const Expr& u = n.args[0];
    const Expr du = derive(u, var);
    if (is_number(du, 0)) return num(0);
    switch (n.func) {
        case Func::Exp:
            return mul(e, du);
        case Func::Log:
            return div(du, u);
        case Func::Sin:
            return mul(fn(Func::Cos, u), du);
        case Func::Cos:
            return neg(mul(fn(Func::Sin, u), du));
        case Func::Sqrt:
            return div(du, mul(num(2), e));
        case Func::Flat:
            return mul(fn(Func::Flat, u, n.flat_order + 1), du);
        case Func::Bump:
            break;
    }
    throw Error("unreachable derivative case");
}

}  // namespace szego
