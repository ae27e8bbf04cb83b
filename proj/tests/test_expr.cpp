#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "szego/error.hpp"
#include "szego/expr.hpp"

using namespace szego;

namespace {

double ev(const std::string& s, std::vector<double> t = {}) {
    const int d = std::max<int>(1, static_cast<int>(t.size()));
    return eval(parse(s, d), t);
}

double central(const Expr& e, std::vector<double> t, int var, double h = 1e-5) {
    auto tp = t;
    auto tm = t;
    tp[static_cast<std::size_t>(var)] += h;
    tm[static_cast<std::size_t>(var)] -= h;
    return (eval(e, tp) - eval(e, tm)) / (2 * h);
}

}  // namespace

TEST_CASE("parse and evaluate") {
    CHECK(ev("1") == 1.0);
    CHECK(ev("2+3*4") == 14.0);
    CHECK(std::abs(ev("sin(pi)")) <= 1e-15);
    CHECK(ev("2^3^2") == 512.0);
    CHECK(ev("-2^2") == -4.0);
    CHECK(ev("2^-1") == 0.5);
    CHECK(ev("(1-2)-3") == -4.0);
    CHECK(ev("8/4/2") == 1.0);
    CHECK(ev("e") == doctest::Approx(std::numbers::e));
    CHECK(ev("1e2 + 2.5E-1") == 100.25);
    CHECK(ev("exp(-t1^2)*cos(t2)", {0.5, 0.3}) == doctest::Approx(std::exp(-0.25) * std::cos(0.3)));
    CHECK(ev("t1*e", {2.0}) == doctest::Approx(2 * std::numbers::e));
    CHECK(ev("sqrt(t1) + log(t1)", {4.0}) == doctest::Approx(2.0 + std::log(4.0)));
}

TEST_CASE("parse errors") {
    CHECK_THROWS_AS(parse("t3", 2), UnknownVariable);
    CHECK_THROWS_AS(parse("foo", 2), UnknownVariable);
    CHECK_THROWS_AS(parse("t0", 2), UnknownVariable);
    CHECK_THROWS_AS(parse("1 +", 1), SyntaxError);
    CHECK_THROWS_AS(parse("(1", 1), SyntaxError);
    CHECK_THROWS_AS(parse("1 2", 1), SyntaxError);
    CHECK_THROWS_AS(parse("sin(1, 2)", 1), SyntaxError);
    CHECK_THROWS_AS(parse("bump(t1)", 1), SyntaxError);
    CHECK_THROWS_AS(parse("", 1), SyntaxError);
    try {
        parse("1 + * 2", 1);
        FAIL("expected a syntax error");
    } catch (const SyntaxError& e) {
        CHECK(e.offset() == 4);
    }
}

TEST_CASE("domain errors are reported, not propagated") {
    CHECK_THROWS_AS(ev("log(0)"), DomainError);
    CHECK_THROWS_AS(ev("sqrt(-1)"), DomainError);
    CHECK_THROWS_AS(ev("1/0"), DomainError);
    CHECK_THROWS_AS(ev("(-2)^0.5"), DomainError);
    CHECK_THROWS_AS(ev("exp(1000)"), DomainError);
    try {
        ev("1 + log(t1 - 1)", {1.0});
        FAIL("expected a domain error");
    } catch (const DomainError& e) {
        CHECK(e.subexpression().find("log") != std::string::npos);
    }
    CHECK(ev("(-2)^3") == -8.0);
}

TEST_CASE("bump and flat") {
    CHECK(ev("bump(t1, 0, 4)", {2.0}) == 1.0);
    CHECK(ev("bump(t1, 0, 4)", {1.0}) == 1.0);
    CHECK(ev("bump(t1, 0, 4)", {0.0}) == 0.0);
    CHECK(ev("bump(t1, 0, 4)", {5.0}) == 0.0);
    const double mid = ev("bump(t1, 0, 4)", {0.5});
    CHECK(mid > 0.0);
    CHECK(mid < 1.0);
    CHECK(ev("bump(t1, 0, 4)", {0.5}) == doctest::Approx(ev("bump(t1, 0, 4)", {3.5})));
    CHECK(ev("flat(t1)", {0.5}) == doctest::Approx(std::exp(-2.0)));
    CHECK(ev("flat(t1)", {-0.5}) == 0.0);
    CHECK_THROWS_AS(ev("bump(t1, 1, 1)", {0.5}), DomainError);
}

TEST_CASE("derivatives") {
    const Expr sq = parse("t1^2", 1);
    for (double x : {-1.3, 0.2, 2.0}) CHECK(eval(derive(sq, 0), std::vector<double>{x}) == doctest::Approx(2 * x));
    CHECK(eval(derive(parse("exp(-t1^2)", 1), 0), std::vector<double>{1.0}) ==
          doctest::Approx(-2 * std::exp(-1.0)).epsilon(1e-14));
    CHECK(eval(derive(parse("t1", 2), 1), std::vector<double>{0.3, 0.4}) == 0.0);

    const std::vector<std::string> exprs{"sin(t1*t2) + t2^3/t1",   "exp(cos(t1))*sqrt(t2)",
                                         "log(1 + t1^2) * t2^t1",  "bump(t1, -1, 2) * t2",
                                         "2^(t1*t2) - (t1 - t2)^4", "flat(t1) * flat(t2 + 1)",
                                         "t1 / (1 + t2^2)^0.5",     "-(t1 + pi) * -t2"};
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.2, 1.5);
    for (const auto& s : exprs) {
        const Expr e = parse(s, 2);
        for (int trial = 0; trial < 20; ++trial) {
            const std::vector<double> t{u(rng), u(rng)};
            for (int var = 0; var < 2; ++var) {
                const double exact = eval(derive(e, var), t);
                const double fd = central(e, t, var);
                CHECK(std::abs(exact - fd) <= 1e-6 * std::max(1.0, std::abs(exact)));
            }
        }
    }
}

TEST_CASE("linearity and product rule as evaluated functions") {
    const Expr f = parse("sin(t1) * t2^2", 2);
    const Expr g = parse("exp(t1 - t2) + 3", 2);
    const Expr sum = Expr::binary(Expr::Kind::Add, f, g);
    const Expr prod = Expr::binary(Expr::Kind::Mul, f, g);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        const std::vector<double> t{u(rng), u(rng)};
        for (int v = 0; v < 2; ++v) {
            const double df = eval(derive(f, v), t);
            const double dg = eval(derive(g, v), t);
            const double ds = eval(derive(sum, v), t);
            const double dp = eval(derive(prod, v), t);
            const double pr = df * eval(g, t) + eval(f, t) * dg;
            CHECK(std::abs(ds - (df + dg)) <= 1e-9 * std::max(1.0, std::abs(ds)));
            CHECK(std::abs(dp - pr) <= 1e-9 * std::max(1.0, std::abs(dp)));
        }
    }
}

TEST_CASE("print round trip") {
    const std::vector<std::string> texts{"1",         "-t1",           "2^3^2",        "-2^2",
                                         "t1 - (t2 - 3)", "exp(-t1^2)*cos(t2)", "bump(t1, -1.5, 2.25)",
                                         "1e-3 * pi / e", "flat(t1) + 0.1",     "sqrt(log(t1 + 2))"};
    for (const auto& s : texts) {
        const Expr a = parse(s, 2);
        const Expr b = parse(print(a), 2);
        CHECK_MESSAGE(structurally_equal(a, b), s << " -> " << print(a));
        CHECK(print(b) == print(a));
    }
    const Expr d = derive(parse("flat(t1^2)", 1), 0);
    CHECK(structurally_equal(parse(print(d), 1), d));
    CHECK(max_variable(parse("t2 + 1", 3)) == 1);
    CHECK(max_variable(parse("pi", 3)) == -1);
}
