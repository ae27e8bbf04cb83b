#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "szego/error.hpp"
#include "szego/spectral.hpp"

using namespace szego;
using std::numbers::pi;

namespace {

HermitianOperator circle_operator(double k, const std::string& a = "1") {
    const auto sub = circle(1.0);
    const int M = default_max_degree(k, 1.0);
    auto nodes = quadrature(sub, default_quadrature(sub, k, 1.0, M));
    return assemble_T(FockTruncation(1, k, M), sub, Amplitude::parse_real(a, 1), nodes);
}

SpectralSummary summary(std::vector<double> ev) {
    SpectralSummary s;
    s.eigenvalues = std::move(ev);
    return s;
}

}  // namespace

TEST_CASE("Hermitian eigenvalues of a known matrix") {
    Eigen::MatrixXcd m(2, 2);
    m << 2.0, Complex(0, 1), Complex(0, -1), 2.0;
    const Eigen::VectorXd ev = hermitian_eigenvalues(m);
    CHECK(ev[0] == doctest::Approx(1.0));
    CHECK(ev[1] == doctest::Approx(3.0));
}

TEST_CASE("eigensolve on the circle") {
    const double k = 30;
    const auto T = circle_operator(k);
    const SpectralSummary s = eigensolve(T, 1);
    CHECK(std::is_sorted(s.eigenvalues.rbegin(), s.eigenvalues.rend()));
    CHECK(s.eigenvalues.back() >= -1e-10 * s.max());
    CHECK(s.max_residual < 1e-8);
    CHECK(s.d_prime == 1);
    CHECK(s.max_degree == 120);

    int mode = 0;
    for (int n = 0; n <= 120; ++n)
        if (T.matrix(n, n).real() > T.matrix(mode, mode).real()) mode = n;
    CHECK((mode == 29 || mode == 30));
    CHECK(s.max() / std::sqrt(2 * k / pi) == doctest::Approx(1.0).epsilon(1.0 / k));

    CHECK(trace_phi(s, TestFunction::power(1)) == doctest::Approx(T.matrix.trace().real()).epsilon(1e-10));
    CHECK(schatten_sum(T, 1) == doctest::Approx(T.matrix.trace().real()).epsilon(1e-10));
    CHECK(weyl_count(s, 0.5, 2.0) + weyl_count(s, std::nextafter(2.0, 3.0), 6.0) == weyl_count(s, 0.5, 6.0));
}

TEST_CASE("complex amplitudes are rejected by eigensolve") {
    const auto sub = circle(1.0);
    auto nodes = quadrature(sub, {});
    const auto T = assemble_T(FockTruncation(1, 4, 8), sub, Amplitude::parse_complex("1", "cos(t1)", 1), nodes);
    CHECK_THROWS_AS(eigensolve(T), InvalidArgument);
    CHECK(schatten_sum(T, 2) == doctest::Approx(T.matrix.squaredNorm()).epsilon(1e-10));
}

TEST_CASE("clamping and test functions") {
    const auto c = clamped({1.0, 0.5, -1e-12});
    CHECK(c.back() == 0.0);
    CHECK_THROWS_AS(clamped({1.0, -1e-3}), NegativeEigenvalue);

    const auto e = TestFunction::entropy();
    CHECK(e(0.0) == 0.0);
    CHECK(e(0.5) == doctest::Approx(0.5 * std::log(0.5)));
    CHECK(e.exponent == 0.5);
    const auto tz = TestFunction::trapezoid(0.1, 0.2, 0.4, 0.8);
    CHECK(tz(0.05) == 0.0);
    CHECK(tz(0.15) == doctest::Approx(0.5));
    CHECK(tz(0.3) == 1.0);
    CHECK(tz(0.6) == doctest::Approx(0.5));
    CHECK(tz(0.9) == 0.0);
    CHECK_THROWS_AS(TestFunction::trapezoid(0.2, 0.1, 0.4, 0.8), InvalidArgument);
    CHECK_THROWS_AS(TestFunction::power(0), InvalidArgument);
}

TEST_CASE("Weyl counts use closed intervals") {
    const auto s = summary({0.9, 0.5, 0.5, 0.2, 0.1});
    CHECK(weyl_count(s, 0.2, 0.5) == 3);
    CHECK(weyl_count(s, 0.2, 0.9) == 4);
    CHECK(weyl_count(s, 0.3, 0.4) == 0);
    CHECK_THROWS_AS(weyl_count(s, 0.0, 0.5), InvalidArgument);
}

TEST_CASE("Schatten sums from singular values") {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
    m(0, 1) = 2.0;
    CHECK(schatten_sum(m, false, 1) == doctest::Approx(2.0));
    CHECK(schatten_sum(m, false, 3) == doctest::Approx(8.0));
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(2, 2);
    d(0, 0) = 3.0;
    d(1, 1) = -1.0;
    CHECK(schatten_sum(d, true, 1) == doctest::Approx(4.0));
    CHECK_THROWS_AS(schatten_sum(d, true, 0), InvalidArgument);
}

TEST_CASE("entropy of probability vectors") {
    CHECK(entropy(std::vector<double>{0.25, 0.25, 0.25, 0.25}) == doctest::Approx(std::log(4.0)));
    CHECK(entropy(std::vector<double>{1.0, 0.0}) == 0.0);
    CHECK_THROWS_AS(entropy(std::vector<double>{0.5, 0.4}), NormalizationError);
}

TEST_CASE("trace distance") {
    const auto a = circle_operator(5, "1/(2*pi)");
    const auto b = circle_operator(5, "(1 + cos(t1))/(2*pi)");
    CHECK(trace_distance(a, a) == doctest::Approx(0.0));
    const double t = trace_distance(a, b);
    CHECK(t > 0.0);
    CHECK(t == doctest::Approx(trace_distance(b, a)));
    CHECK(t <= schatten_sum(a, 1) + schatten_sum(b, 1));
}

TEST_CASE("rate regression") {
    const std::vector<double> ks{10, 20, 40, 80};
    std::vector<double> v;
    for (double k : ks) v.push_back(2.0 + 3.0 / k);
    const RateFit f = rate_regression(ks, v, 2.0);
    CHECK(f.slope == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(f.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    CHECK(f.points == 4);
    CHECK_FALSE(f.below_noise_floor);

    const RateFit flat = rate_regression(ks, {2.0, 2.0, 2.0, 2.0}, 2.0);
    CHECK(flat.below_noise_floor);
    CHECK_THROWS_AS(rate_regression({10, 20}, {1, 2}, 0.0), DegenerateSweep);
    CHECK_THROWS_AS(rate_regression({10, 10, 10, 10}, {1, 2, 3, 4}, 0.0), DegenerateSweep);
}

TEST_CASE("CSV output carries provenance and is deterministic") {
    const auto T = circle_operator(4);
    const auto s = eigensolve(T, 1);
    std::ostringstream a, b;
    write_eigenvalue_csv(a, s, "p64");
    write_eigenvalue_csv(b, s, "p64");
    CHECK(a.str() == b.str());
    std::istringstream in(a.str());
    std::string header, first;
    std::getline(in, header);
    std::getline(in, first);
    CHECK(header == "index,eigenvalue,k,normalization,N,d,d_prime,M,quad_order");
    CHECK(first.rfind("0,", 0) == 0);
    CHECK(first.find(",4,raw_T,1,1,1,16,p64") != std::string::npos);
    for (double x : {0.1, 1.0 / 3.0, 6.02e23, -2.5e-300}) CHECK(std::stod(format_double(x)) == x);
}
