#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "doctest.h"
#include "szego/error.hpp"
#include "szego/operators.hpp"

using namespace szego;
using std::numbers::pi;

namespace {

struct Setup {
    ChartedSubmanifold sub;
    FockTruncation trunc;
    std::vector<QuadNode> nodes;
};

Setup circle_setup(double k, int M, int points = 0) {
    auto sub = circle(1.0);
    QuadratureOptions q = default_quadrature(sub, k, 1.0, M);
    if (points) q.periodic_points = points;
    auto nodes = quadrature(sub, q);
    return {sub, FockTruncation(1, k, M), nodes};
}

double poisson_eigenvalue(double k, int n) { return 2 * k * std::exp(n * std::log(k) - k - std::lgamma(n + 1.0)); }

}  // namespace

TEST_CASE("default truncation and quadrature") {
    CHECK(default_max_degree(10, 1.0) == 40);
    CHECK(default_max_degree(2.5, 0.5) == 3);
    CHECK(default_max_degree(1e-6, 0.0) == 1);
    const auto c = circle(1.0);
    CHECK(default_quadrature(c, 100, 1.0, 400).periodic_points == 402);
    CHECK(default_quadrature(c, 4, 1.0, 16).periodic_points == 64);
    CHECK(default_quadrature(c, 400, 1.0, 40).periodic_points == 160);
}

TEST_CASE("circle operator is diagonal with Poisson entries") {
    const double k = 12;
    auto s = circle_setup(k, 48);
    const HermitianOperator T = assemble_T(s.trunc, s.sub, Amplitude::constant(1.0), s.nodes);
    CHECK(T.hermitian);
    CHECK(T.dim == 1);
    const double maxdiag = T.matrix.diagonal().real().maxCoeff();
    double off = 0.0;
    for (Eigen::Index i = 0; i < T.matrix.rows(); ++i)
        for (Eigen::Index j = 0; j < T.matrix.cols(); ++j)
            if (i != j) off = std::max(off, std::abs(T.matrix(i, j)));
    CHECK(off <= 1e-10 * maxdiag);
    for (int n = 0; n <= 48; ++n)
        CHECK(T.matrix(n, n).real() == doctest::Approx(poisson_eigenvalue(k, n)).epsilon(1e-10));
    CHECK_FALSE(T.truncation_warning);
}

TEST_CASE("radial amplitude on a torus keeps the operator diagonal") {
    const auto sub = torus_product({1.0, 0.6}, 2);
    const double k = 5;
    auto nodes = quadrature(sub, default_quadrature(sub, k, 1.17, 24));
    FockTruncation trunc(2, k, 24);
    const HermitianOperator T = assemble_T(trunc, sub, Amplitude::constant(0.5), nodes);
    const double maxdiag = T.matrix.diagonal().real().maxCoeff();
    const Eigen::MatrixXcd off = T.matrix - Eigen::MatrixXcd(T.matrix.diagonal().asDiagonal());
    CHECK(off.cwiseAbs().maxCoeff() <= 1e-10 * maxdiag);
}

TEST_CASE("trace identity with a varying amplitude") {
    const auto sub = torus_product({1.0, 0.7}, 2);
    const double k = 4;
    const Amplitude a = Amplitude::parse_real("2 + cos(t1) * sin(2*t2)", 2);
    auto nodes = quadrature(sub, default_quadrature(sub, k, 1.23, default_max_degree(k, 1.23)));
    FockTruncation trunc(2, k, default_max_degree(k, 1.23));
    const HermitianOperator T = assemble_T(trunc, sub, a, nodes);
    const TraceCheck tc = exact_trace(T);
    CHECK(tc.relative_gap <= 1e-6);
    CHECK(tc.prediction.real() == doctest::Approx(std::pow(k / pi, 2) * 2 * 4 * pi * pi * 0.7).epsilon(1e-10));
}

TEST_CASE("covariant symbol on the circle matches the Bessel integral") {
    const double k = 7;
    auto s = circle_setup(k, 28);
    const std::vector<Complex> a(s.nodes.size(), Complex(1.0));
    AmbientPoint z(1);
    z << Complex(std::cos(0.3), std::sin(0.3));
    const Complex got = covariant_symbol(s.trunc, s.nodes, a, z);
    const double want = (k / pi) * 2 * pi * std::exp(-2 * k) * std::cyl_bessel_i(0.0, 2 * k);
    CHECK(got.real() == doctest::Approx(want).epsilon(1e-10));
    CHECK(std::abs(got.imag()) < 1e-12);
}

TEST_CASE("multi-fold traces agree with matrix products") {
    const double k = 6;
    auto s = circle_setup(k, 24);
    const Amplitude a = Amplitude::parse_real("1 + cos(t1)", 1);
    const Amplitude b = Amplitude::parse_real("2 + sin(2*t1)", 1);
    const Amplitude c = Amplitude::parse_real("3 - cos(3*t1)", 1);
    const auto Ta = assemble_T(s.trunc, s.sub, a, s.nodes);
    const auto Tb = assemble_T(s.trunc, s.sub, b, s.nodes);
    const auto Tc = assemble_T(s.trunc, s.sub, c, s.nodes);
    const auto av = evaluate(a, s.nodes), bv = evaluate(b, s.nodes), cv = evaluate(c, s.nodes);

    const Complex tr2 = (Ta.matrix * Tb.matrix).trace();
    CHECK(std::abs(pair_trace_integral(k, 1, s.nodes, av, bv) - tr2) <= 1e-8 * std::abs(tr2));
    CHECK(std::abs(nfold_trace_integral(k, 1, s.nodes, {av, bv}) - tr2) <= 1e-8 * std::abs(tr2));

    const Complex tr3 = (Ta.matrix * Tb.matrix * Tc.matrix).trace();
    CHECK(std::abs(nfold_trace_integral(k, 1, s.nodes, {av, bv, cv}) - tr3) <= 1e-8 * std::abs(tr3));
    CHECK_THROWS_AS(nfold_trace_integral(k, 1, s.nodes, {av, bv, cv}, 10.0), CostLimit);
}

TEST_CASE("complex amplitudes give non-Hermitian operators with adjoint symmetry") {
    const double k = 5;
    auto s = circle_setup(k, 20);
    const Amplitude a = Amplitude::parse_complex("cos(t1)", "sin(t1)", 1);
    const Amplitude abar = Amplitude::parse_complex("cos(t1)", "-sin(t1)", 1);
    const auto Ta = assemble_T(s.trunc, s.sub, a, s.nodes);
    const auto Tb = assemble_T(s.trunc, s.sub, abar, s.nodes);
    CHECK_FALSE(Ta.hermitian);
    CHECK((Ta.matrix.adjoint() - Tb.matrix).cwiseAbs().maxCoeff() < 1e-12);
    // e^{it} raises the degree by one: only the first subdiagonal is populated.
    CHECK(std::abs(Ta.matrix(1, 0)) > 1e-3);
    CHECK(std::abs(Ta.matrix(0, 1)) < 1e-12);
}

TEST_CASE("S scaling") {
    auto s = circle_setup(10, 40);
    const auto T = assemble_T(s.trunc, s.sub, Amplitude::constant(1.0), s.nodes);
    const auto S = scale_to_S(T, 1);
    CHECK(S.normalization == Normalization::ScaledS);
    CHECK(S.factor == doctest::Approx(std::pow(2.0, -0.5) * std::sqrt(pi / 10)));
    CHECK(s_factor(2, 2, 2, 3.0) == doctest::Approx(0.5 * pi / 3));
    CHECK_THROWS_AS(scale_to_S(S, 1), DoubleScaling);
    CHECK(to_string(Normalization::RawT) == "raw_T");
    CHECK(to_string(Normalization::ScaledS) == "scaled_S");
}

TEST_CASE("polynomial Toeplitz operators and mixed traces") {
    const double k = 9;
    auto s = circle_setup(k, 45);
    const Polynomial h{{Complex(1.0), {1}, {1}}};
    const Eigen::MatrixXcd TH = toeplitz_polynomial_matrix(s.trunc, h);
    for (int n = 0; n < 10; ++n) CHECK(TH(n, n).real() == doctest::Approx((n + 1) / k).epsilon(1e-12));
    CHECK(std::abs(TH(0, 1)) == 0.0);

    const Polynomial zbar{{Complex(1.0), {0}, {1}}};
    const Eigen::MatrixXcd TZ = toeplitz_polynomial_matrix(s.trunc, zbar);
    // T_{conj z} is the annihilator: e_{n+1} -> sqrt((n+1)/k) e_n.
    CHECK(TZ(2, 3).real() == doctest::Approx(std::sqrt(3 / k)).epsilon(1e-12));

    const auto T = assemble_T(s.trunc, s.sub, Amplitude::constant(1.0), s.nodes);
    const auto av = evaluate(Amplitude::constant(1.0), s.nodes);
    const MixedTrace m = mixed_trace_polynomial_H(T, h, s.nodes, av);
    CHECK(m.trace.real() == doctest::Approx(2 * k + 2).epsilon(1e-9));
    CHECK(m.prediction.real() == doctest::Approx(2 * k).epsilon(1e-10));
    CHECK(eval_polynomial(h, s.nodes[5].z).real() == doctest::Approx(1.0));
}

TEST_CASE("binary matrix export round trip") {
    auto s = circle_setup(3, 6);
    const auto T = assemble_T(s.trunc, s.sub, Amplitude::parse_complex("1", "sin(t1)", 1), s.nodes);
    const auto path = (std::filesystem::temp_directory_path() / "szego_matrix_test.bin").string();
    write_matrix_binary(T, path);
    CHECK(std::filesystem::file_size(path) == 16 + 7 * 7 * 16);
    const BinaryMatrix b = read_matrix_binary(path);
    CHECK(b.dim == 7);
    CHECK(b.ambient_dim == 1);
    CHECK(b.max_degree == 6);
    CHECK(b.k == 3.0);
    CHECK((b.matrix - T.matrix).cwiseAbs().maxCoeff() == 0.0);

    std::ifstream in(path, std::ios::binary);
    unsigned char head[4];
    in.read(reinterpret_cast<char*>(head), 4);
    CHECK(head[0] == 7);
    CHECK(head[1] == 0);
    std::filesystem::remove(path);
    CHECK_THROWS(read_matrix_binary(path));
}

TEST_CASE("triple trace on the circle against the Poisson spectrum") {
    const double k = 5;
    auto s = circle_setup(k, 20);
    const std::vector<Complex> one(s.nodes.size(), Complex(1.0));
    double want = 0.0;
    for (int n = 0; n <= 60; ++n) want += std::pow(poisson_eigenvalue(k, n), 3);
    const Complex got = nfold_trace_integral(k, 1, s.nodes, {one, one, one});
    CHECK(got.real() == doctest::Approx(want).epsilon(1e-8));
    CHECK(std::abs(got.imag()) <= 1e-10 * want);
    const std::vector<Complex> zero(s.nodes.size(), Complex(0.0));
    CHECK(std::abs(pair_trace_integral(k, 1, s.nodes, one, zero)) == 0.0);
}

TEST_CASE("covariant symbol decay and total mass") {
    const double k = 6;
    auto s = circle_setup(k, 24);
    const auto a = evaluate(Amplitude::parse_real("1 + cos(t1)", 1), s.nodes);
    AmbientPoint far(1);
    far << Complex(1.0 + std::sqrt(40 / k), 0.0);
    CHECK(std::abs(covariant_symbol(s.trunc, s.nodes, a, far)) <= 1e-15 * k / pi);

    // int_C symbol dL = int a dsigma, by Fubini against the normalized Gaussian.
    const double h = 0.02;
    Complex mass = 0.0;
    AmbientPoint z(1);
    for (double x = -3; x <= 3; x += h)
        for (double y = -3; y <= 3; y += h) {
            z << Complex(x, y);
            mass += covariant_symbol(s.trunc, s.nodes, a, z) * h * h;
        }
    CHECK(mass.real() == doctest::Approx(2 * pi).epsilon(1e-6));
}
