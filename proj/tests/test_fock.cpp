#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "doctest.h"
#include "szego/error.hpp"
#include "szego/fock.hpp"

using namespace szego;
using std::numbers::pi;

namespace {

double binomial(int n, int k) { return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0))); }

AmbientPoint pt(std::initializer_list<Complex> zs) {
    AmbientPoint z(static_cast<Eigen::Index>(zs.size()));
    Eigen::Index i = 0;
    for (auto v : zs) z[i++] = v;
    return z;
}

// Direct (overflow-prone) kernel for small arguments.
Complex naive_kernel(double k, const AmbientPoint& z, const AmbientPoint& w) {
    Complex dot = 0.0;
    for (Eigen::Index j = 0; j < z.size(); ++j) dot += z[j] * std::conj(w[j]);
    return std::pow(k / pi, static_cast<double>(z.size())) *
           std::exp(k * dot - 0.5 * k * z.squaredNorm() - 0.5 * k * w.squaredNorm());
}

}  // namespace

TEST_CASE("basis size and ordering") {
    for (int N : {1, 2, 3})
        for (int M : {0, 1, 5, 12}) CHECK(FockTruncation(N, 1.0, M).size() == binomial(M + N, N));

    FockTruncation t(2, 1.0, 2);
    const std::vector<MultiIndex> expected{{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
    CHECK(t.basis() == expected);
    CHECK(t.position({1, 1}).value() == 4);
    CHECK_FALSE(t.position({3, 0}).has_value());
    CHECK(FockTruncation(2, 1.0, 2).basis() == t.basis());
    CHECK_THROWS_AS(FockTruncation(0, 1.0, 2), InvalidArgument);
    CHECK_THROWS_AS(FockTruncation(1, -1.0, 2), InvalidArgument);
}

TEST_CASE("basis norms") {
    CHECK(basis_norm(FockTruncation(1, 1.0, 3), {0}) == doctest::Approx(std::sqrt(pi)).epsilon(1e-14));
    CHECK(basis_norm(FockTruncation(1, 1.0, 3), {1}) == doctest::Approx(std::sqrt(pi)).epsilon(1e-14));
    CHECK(basis_norm(FockTruncation(2, 2.0, 3), {0, 0}) == doctest::Approx(pi / 2).epsilon(1e-14));
    // sqrt(pi^N n! / k^{|n|+N}) for a mixed index
    const double expect = std::sqrt(pi * pi * 2.0 * 6.0 / std::pow(3.0, 7.0));
    CHECK(basis_norm(FockTruncation(2, 3.0, 6), {2, 3}) == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("reproducing kernel") {
    FockTruncation t1(1, 3.0, 4);
    CHECK(std::abs(reproducing_kernel(t1, pt({0.0}), pt({0.0})) - 3.0 / pi) < 1e-15);

    FockTruncation u(1, 1.0, 4);
    const Complex v = reproducing_kernel(u, pt({1.0}), pt({Complex(0, 1)}));
    CHECK(std::abs(v) == doctest::Approx(std::exp(-1.0) / pi).epsilon(1e-14));

    std::mt19937 rng(7);
    std::normal_distribution<double> g;
    FockTruncation t2(2, 2.5, 4);
    for (int trial = 0; trial < 50; ++trial) {
        const AmbientPoint z = pt({Complex(g(rng), g(rng)), Complex(g(rng), g(rng))});
        const AmbientPoint w = pt({Complex(g(rng), g(rng)), Complex(g(rng), g(rng))});
        const Complex a = reproducing_kernel(t2, z, w);
        const Complex b = reproducing_kernel(t2, w, z);
        CHECK(std::abs(a - std::conj(b)) <= 1e-14 * std::abs(a) + 1e-300);
        const Complex ref = naive_kernel(2.5, z, w);
        CHECK(std::abs(a - ref) <= 1e-12 * std::abs(ref));
        // phase identity with omega = Im(z.conj(w))
        Complex dot = 0.0;
        for (int j = 0; j < 2; ++j) dot += z[j] * std::conj(w[j]);
        const Complex phase = std::pow(2.5 / pi, 2) * std::exp(-1.25 * (z - w).squaredNorm()) *
                              std::polar(1.0, 2.5 * dot.imag());
        CHECK(std::abs(a - phase) <= 1e-12 * std::abs(phase));
        const AmbientPoint zz = z;
        CHECK(std::abs(reproducing_kernel(t2, zz, zz).imag()) < 1e-15);
        CHECK(reproducing_kernel(t2, zz, zz).real() == doctest::Approx(std::pow(2.5 / pi, 2)).epsilon(1e-14));
    }

    // Large k|z||w| stays finite.
    FockTruncation big(1, 400.0, 4);
    const Complex far = reproducing_kernel(big, pt({Complex(30, 1)}), pt({Complex(30, 1.01)}));
    CHECK(std::isfinite(far.real()));
    CHECK(std::abs(far) == doctest::Approx(400.0 / pi * std::exp(-200.0 * 1e-4)).epsilon(1e-12));
}

TEST_CASE("basis evaluation") {
    FockTruncation t(1, 1.0, 5);
    CHECK(eval_basis(t, {0}, pt({0.0})).real() == doctest::Approx(1.0 / std::sqrt(pi)).epsilon(1e-14));
    CHECK(std::abs(eval_basis(t, {1}, pt({0.0}))) == 0.0);

    // |e_n| along a ray peaks at |z|^2 = n/k.
    FockTruncation t2(1, 4.0, 10);
    const int n = 6;
    const double rstar = std::sqrt(n / 4.0);
    const double peak = std::abs(eval_basis(t2, {n}, pt({rstar})));
    for (double dr : {-0.05, -0.01, 0.01, 0.05}) CHECK(std::abs(eval_basis(t2, {n}, pt({rstar + dr}))) < peak);

    // direct formula z^n e^{-k|z|^2/2} / norm
    const Complex z(0.3, -0.7);
    const Complex direct = std::pow(z, 3) * std::exp(-2.0 * std::norm(z)) / basis_norm(t2, {3});
    CHECK(std::abs(eval_basis(t2, {3}, pt({z})) - direct) < 1e-14);

    // eval_basis_all agrees with single evaluations in basis order
    FockTruncation t3(2, 1.7, 4);
    const AmbientPoint w = pt({Complex(0.4, 0.1), Complex(-0.2, 0.9)});
    const Eigen::VectorXcd all = eval_basis_all(t3, w);
    for (std::size_t i = 0; i < t3.size(); ++i)
        CHECK(std::abs(all[static_cast<Eigen::Index>(i)] - eval_basis(t3, t3.index(i), w)) < 1e-14);

    // no overflow at large k
    FockTruncation t4(1, 400.0, 1600);
    const Eigen::VectorXcd v = eval_basis_all(t4, pt({Complex(0.6, 0.8)}));
    CHECK(v.allFinite());
}

TEST_CASE("coherent states and truncated completeness") {
    FockTruncation t(1, 1.0, 30);
    const Eigen::VectorXcd c0 = coherent_state_coeffs(t, pt({0.0}));
    CHECK(std::abs(c0[0]) > 0.0);
    CHECK(c0.tail(c0.size() - 1).norm() == 0.0);

    const Eigen::VectorXcd c1 = coherent_state_coeffs(t, pt({1.0}));
    for (int n = 0; n <= 10; ++n)
        CHECK(std::norm(c1[n]) == doctest::Approx(std::exp(-1.0) / std::tgamma(n + 1.0) / pi).epsilon(1e-12));
    CHECK(c1.squaredNorm() <= 1.0 / pi + 1e-15);
    CHECK(c1.squaredNorm() == doctest::Approx(1.0 / pi).epsilon(1e-12));

    for (int N : {1, 2}) {
        const double k = 3.0;
        const int M = 48;
        FockTruncation tr(N, k, M);
        std::mt19937 rng(11 + N);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        const double rmax = std::sqrt(M / (4.0 * k));
        for (int trial = 0; trial < 10; ++trial) {
            AmbientPoint z(N);
            AmbientPoint w(N);
            for (int j = 0; j < N; ++j) {
                z[j] = Complex(u(rng), u(rng));
                w[j] = Complex(u(rng), u(rng));
            }
            z *= rmax / std::max(rmax, z.norm()) * 0.99;
            w *= rmax / std::max(rmax, w.norm()) * 0.99;
            Complex sum = 0.0;
            const Eigen::VectorXcd ez = eval_basis_all(tr, z);
            const Eigen::VectorXcd ew = eval_basis_all(tr, w);
            for (Eigen::Index i = 0; i < ez.size(); ++i) sum += ez[i] * std::conj(ew[i]);
            CHECK(std::abs(sum - reproducing_kernel(tr, z, w)) <= 1e-8 * std::pow(k / pi, N));
        }
    }
}

TEST_CASE("symplectic form") {
    const AmbientPoint z = pt({Complex(1, 0)});
    const AmbientPoint w = pt({Complex(0, 1)});
    // Im(1 * conj(i)) = -1
    CHECK(symplectic_form(z, w) == doctest::Approx(-1.0));
    CHECK(symplectic_form(w, z) == doctest::Approx(1.0));
    CHECK(symplectic_form(z, z) == 0.0);
}
