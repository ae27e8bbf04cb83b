#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace szego {

/**
 Immutable AST of the amplitude / chart-coordinate language.

 Grammar, loosest to tightest binding:

     expr   := term (('+' | '-') term)*
     term   := unary (('*' | '/') unary)*
     unary  := '-' unary | power
     power  := primary ('^' unary)?          (right-associative)
     primary:= number | 'pi' | 'e' | 't1'..'td' | func '(' args ')' | '(' expr ')'

 Functions: exp, log, sin, cos, sqrt (one argument), bump(t, a, b) and flat(x).
 bump is a C-infinity cutoff supported in (a, b) and equal to 1 on the inner half
 [a + (b-a)/4, b - (b-a)/4]. flat(x) = exp(-1/x) for x > 0 and 0 otherwise; its k-th
 derivative prints as flat_k(x).

 Nodes are shared and never mutated, so an Expr can be evaluated and differentiated
 from several threads at once.
 */
class Expr {
public:
    enum class Kind { Number, Constant, Variable, Negate, Add, Sub, Mul, Div, Pow, Call };
    enum class Func { Exp, Log, Sin, Cos, Sqrt, Bump, Flat };
    enum class Const { Pi, E };

    struct Node {
        Kind kind{};
        double value = 0.0;         // Number
        Const constant = Const::Pi;  // Constant
        int variable = 0;            // Variable, 0-based
        Func func = Func::Exp;       // Call
        int flat_order = 0;          // Call with Func::Flat
        std::vector<Expr> args;      // operands / call arguments
    };

    Expr() = default;
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

    static Expr number(double v);
    static Expr constant(Const c);
    static Expr variable(int index);
    static Expr negate(Expr a);
    static Expr binary(Kind kind, Expr a, Expr b);
    static Expr call(Func f, std::vector<Expr> args, int flat_order = 0);

    bool valid() const noexcept { return static_cast<bool>(node_); }
    const Node& node() const { return *node_; }
    Kind kind() const { return node_->kind; }

private:
    std::shared_ptr<const Node> node_;
};

/// Parses `text` with variables t1..t`dim`. Throws SyntaxError (with byte offset) or
/// UnknownVariable.
Expr parse(std::string_view text, int dim);

/// IEEE double evaluation at the point t. Throws DomainError instead of producing NaN.
double eval(const Expr& e, std::span<const double> t);

/// Symbolic partial derivative with respect to the 0-based variable index `var`.
Expr derive(const Expr& e, int var);

/// Fully parenthesized text that parses back to a structurally equal tree.
std::string print(const Expr& e);

bool structurally_equal(const Expr& a, const Expr& b);

/// Largest 0-based variable index used, or -1 for constant expressions.
int max_variable(const Expr& e);

}  // namespace szego
