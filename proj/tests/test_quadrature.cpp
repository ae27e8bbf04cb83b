#include <cmath>
#include <numbers>

#include "doctest.h"
#include "szego/quadrature_rules.hpp"

using namespace szego;

namespace {

double integrate(const Rule1D& r, auto f) {
    double s = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * f(r.nodes[i]);
    return s;
}

}  // namespace

TEST_CASE("Gauss-Legendre exactness") {
    for (int n : {1, 2, 3, 5, 8, 16, 33}) {
        const Rule1D r = gauss_legendre(n);
        for (int deg = 0; deg <= 2 * n - 1; ++deg) {
            const double exact = deg % 2 == 1 ? 0.0 : 2.0 / (deg + 1);
            CHECK(integrate(r, [deg](double x) { return std::pow(x, deg); }) ==
                  doctest::Approx(exact).epsilon(1e-13).scale(1.0));
        }
    }
    const Rule1D c = composite_gauss_legendre(0.0, 3.0, 5, 4);
    CHECK(integrate(c, [](double x) { return x * x * x * x * x * x * x; }) ==
          doctest::Approx(std::pow(3.0, 8) / 8).epsilon(1e-13));
}

TEST_CASE("periodic trapezoid") {
    const Rule1D r = periodic_trapezoid(0.0, 2 * std::numbers::pi, 16);
    CHECK(integrate(r, [](double) { return 1.0; }) == doctest::Approx(2 * std::numbers::pi).epsilon(1e-14));
    for (int m = 1; m < 16; ++m) CHECK(std::abs(integrate(r, [m](double x) { return std::cos(m * x); })) < 1e-13);
    CHECK(integrate(r, [](double x) { return std::cos(16 * x); }) != doctest::Approx(0.0));
}

TEST_CASE("generalized Gauss-Laguerre moments") {
    for (double a : {-0.5, 0.0, 0.5, 1.0, 2.5}) {
        const Rule1D r = gauss_laguerre(20, a);
        for (int m = 0; m <= 10; ++m) {
            const double exact = std::tgamma(a + m + 1.0);
            CHECK(integrate(r, [m](double x) { return std::pow(x, m); }) == doctest::Approx(exact).epsilon(1e-11));
        }
    }
}
