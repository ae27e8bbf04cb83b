#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "szego/error.hpp"
#include "szego/manifold.hpp"

using namespace szego;
using std::numbers::pi;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double a : v) x[i++] = a;
    return x;
}

ChartedSubmanifold two_chart_circle() {
    CustomChartSpec a{{"cos(t1)", "sin(t1)"}, {false}, {{-0.5, pi + 0.5}}, std::nullopt};
    CustomChartSpec b{{"cos(t1)", "sin(t1)"}, {false}, {{pi - 0.5, 2 * pi + 0.5}}, std::nullopt};
    return custom_manifold(1, 1, {a, b});
}

}  // namespace

TEST_CASE("frames of catalog manifolds") {
    const auto c = circle(2.0);
    const GeometryFrame f = frame_at(c.chart(0), vec({0.7}));
    CHECK(f.G(0, 0) == doctest::Approx(4.0));
    CHECK(f.H(0, 0) == 0.0);
    CHECK(f.half_rank == 0);
    CHECK(f.lambdas.empty());
    CHECK(f.vol_density == doctest::Approx(2.0));

    const auto p = parabola_patch({-2, 2}, {-2, 2});
    for (double x1 : {0.0, 1.0, -1.7}) {
        const GeometryFrame g = frame_at(p.chart(0), vec({x1, 0.3}));
        Eigen::Matrix2d w;
        w << 0, -1 / (1 + x1 * x1), 1, 0;
        CHECK((g.W - w).norm() < 1e-14);
        REQUIRE(g.half_rank == 1);
        CHECK(g.lambdas[0] == doctest::Approx(1 / std::sqrt(1 + x1 * x1)).epsilon(1e-13));
    }

    const auto plane = plane_patch({{-1, 1}, {-1, 1}, {-1, 1}, {-1, 1}});
    const GeometryFrame q = frame_at(plane.chart(0), vec({0.1, 0.2, 0.3, 0.4}));
    CHECK(q.half_rank == 2);
    for (double l : q.lambdas) CHECK(l == doctest::Approx(1.0).epsilon(1e-14));

    CHECK_THROWS_AS(frame_from(Eigen::Matrix2d::Zero(), Eigen::Matrix2d::Zero()), SingularMetric);
    Eigen::Matrix2d bad;
    bad << 1, 0, 0, 1e-14;
    CHECK_THROWS_AS(frame_from(bad, Eigen::Matrix2d::Zero()), SingularMetric);
}

TEST_CASE("frame invariants on random metrics") {
    std::mt19937 rng(17);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 40; ++trial) {
        const int d = 1 + trial % 5;
        Eigen::MatrixXd A(d, d);
        Eigen::MatrixXd B(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                A(i, j) = g(rng);
                B(i, j) = g(rng);
            }
        const Eigen::MatrixXd G = A.transpose() * A + 0.1 * Eigen::MatrixXd::Identity(d, d);
        const Eigen::MatrixXd H = 0.5 * (B - B.transpose());
        const GeometryFrame f = frame_from(G, H);
        CHECK(d - 2 * f.half_rank >= 0);
        Eigen::EigenSolver<Eigen::MatrixXd> es(f.W);
        const Eigen::VectorXcd ev = es.eigenvalues();
        int zeros = 0;
        for (Eigen::Index i = 0; i < ev.size(); ++i) {
            CHECK(std::abs(ev[i].real()) < 1e-10 * (1 + std::abs(ev[i])));
            if (std::abs(ev[i]) < 1e-8) ++zeros;
            double best = 1e300;
            for (Eigen::Index j = 0; j < ev.size(); ++j) best = std::min(best, std::abs(ev[j] + ev[i]));
            CHECK(best < 1e-10 * (1 + std::abs(ev[i])));
        }
        CHECK(zeros == d - 2 * f.half_rank);
        for (double l : f.lambdas) {
            double best = 1e300;
            for (Eigen::Index j = 0; j < ev.size(); ++j) best = std::min(best, std::abs(ev[j] - Complex(0, l)));
            CHECK(best < 1e-9 * (1 + l));
        }
    }
}

TEST_CASE("projected complex structure is a contraction") {
    auto s = sphere3(1.3);
    for (const auto& [c, t] : sample_nodes(s)) {
        const GeometryFrame f = frame_at(s.chart(c), t);
        for (double l : f.lambdas) {
            CHECK(l > 0.0);
            CHECK(l <= 1.0 + 1e-12);
        }
    }
    auto p = parabola_patch({-3, 3}, {-1, 1});
    for (const auto& [c, t] : sample_nodes(p)) {
        const GeometryFrame f = frame_at(p.chart(c), t);
        for (double l : f.lambdas) CHECK(l <= 1.0 + 1e-12);
    }
}

TEST_CASE("classification") {
    CHECK(classify(circle(1.0)).tag == SubmanifoldClass::Lagrangian);
    CHECK(classify(torus_product({1.0, 2.0}, 2)).tag == SubmanifoldClass::Lagrangian);
    CHECK(classify(torus_product({1.0}, 2)).tag == SubmanifoldClass::Isotropic);
    CHECK(classify(sphere3(1.0)).tag == SubmanifoldClass::Coisotropic);
    CHECK(classify(parabola_patch({-1, 1}, {-1, 1})).tag == SubmanifoldClass::Symplectic);
    CHECK(classify(plane_patch({{-1, 1}, {-1, 1}})).tag == SubmanifoldClass::Coisotropic);

    const auto iso = classify(torus_product({1.0, 0.5}, 3));
    CHECK(iso.tag == SubmanifoldClass::Isotropic);
    CHECK(iso.max_abs_H <= 1e-12);

    const auto generic = custom_manifold(3, 3, {{{"t1", "t2", "t3", "0", "0", "0"}, {false, false, false},
                                                 {{-1, 1}, {-1, 1}, {-1, 1}}, std::nullopt}});
    CHECK(classify(generic).tag == SubmanifoldClass::Generic);

    const auto mixed = custom_manifold(2, 2, {{{"t1", "t1*t2", "t2", "0"}, {false, false}, {{-1, 1}, {-1, 1}}, std::nullopt}});
    std::vector<std::pair<std::size_t, Eigen::VectorXd>> samples{{0, vec({0.5, 0.2})}, {0, vec({0.0, 0.2})}};
    CHECK_THROWS_AS(classify(mixed, samples), InconsistentClassification);

    CHECK(d_prime(circle(1.0)) == 1);
    CHECK(d_prime(sphere3(1.0)) == 1);
    CHECK(d_prime(plane_patch({{-1, 1}, {-1, 1}, {-1, 1}, {-1, 1}})) == 0);
    CHECK(d_prime(torus_product({1.0}, 2)) == 1);
    CHECK_THROWS_AS(d_prime(parabola_patch({-1, 1}, {-1, 1})), NotApplicable);
}

TEST_CASE("Delta_n") {
    GeometryFrame iso = frame_from(Eigen::MatrixXd::Identity(1, 1), Eigen::MatrixXd::Zero(1, 1));
    CHECK(delta_n(iso, 2) == doctest::Approx(std::sqrt(2.0)));

    Eigen::Matrix2d H;
    H << 0, 1, -1, 0;
    const GeometryFrame rot = frame_from(Eigen::Matrix2d::Identity(), H);
    CHECK(delta_n(rot, 3) == doctest::Approx(4.0));

    for (int N : {1, 2, 3}) {
        std::vector<std::pair<double, double>> r(static_cast<std::size_t>(2 * N), {-1.0, 1.0});
        const auto plane = plane_patch(r);
        const GeometryFrame f = frame_at(plane.chart(0), Eigen::VectorXd::Zero(2 * N));
        for (int n = 1; n <= 6; ++n) CHECK(delta_n(f, n) == doctest::Approx(std::pow(2.0, N * (n - 1))).epsilon(1e-13));
    }

    std::mt19937 rng(2);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::Matrix3d A;
        Eigen::Matrix3d B;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                A(i, j) = g(rng);
                B(i, j) = g(rng);
            }
        const GeometryFrame f = frame_from(A.transpose() * A + 0.1 * Eigen::Matrix3d::Identity(), 0.5 * (B - B.transpose()));
        CHECK(delta_n(f, 1) == doctest::Approx(1.0).epsilon(1e-14));
    }

    for (double l : {1e-9, 1e-4, 0.1, 0.5, 0.9, 1.0}) {
        for (int n = 1; n <= 12; ++n) {
            const double lhs = delta_factor(l, n) * 2 * l;
            const double rhs = std::pow(1 + l, n) - std::pow(1 - l, n);
            if (l >= 1e-4) CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(rhs));
            CHECK(delta_factor(l, n) >= n - 1e-12);
        }
    }
    CHECK(delta_factor(0.0, 7) == 7.0);
}

TEST_CASE("quadrature weights") {
    for (int order : {1, 3, 16, 64}) {
        QuadratureOptions o;
        o.periodic_points = order;
        CHECK(total_weight(quadrature(circle(1.7), o)) == doctest::Approx(2 * pi * 1.7).epsilon(1e-12));
    }
    CHECK(total_weight(quadrature(torus_product({0.5, 2.0}, 2), {})) == doctest::Approx(4 * pi * pi).epsilon(1e-12));
    QuadratureOptions s;
    s.panels = 1;
    s.gauss_order = 4;
    s.periodic_points = 8;
    CHECK(total_weight(quadrature(sphere3(1.5), s)) == doctest::Approx(2 * pi * pi * std::pow(1.5, 3)).epsilon(1e-12));

    // Gauss-Legendre of order p is exact for degree 2p-1 on a box chart.
    const auto plane = plane_patch({{0, 1}, {-1, 2}});
    QuadratureOptions o;
    o.panels = 1;
    o.gauss_order = 3;
    double sum = 0.0;
    for (const auto& n : quadrature(plane, o)) sum += n.weight * std::pow(n.t[0], 5) * std::pow(n.t[1], 4);
    CHECK(sum == doctest::Approx((1.0 / 6) * (32.0 + 1.0) / 5).epsilon(1e-13));
}

TEST_CASE("Jacobians match finite differences") {
    const std::vector<ChartedSubmanifold> subs{circle(1.2), torus_product({1.0, 0.4}, 3), parabola_patch({-2, 2}, {-1, 1}),
                                               plane_patch({{-1, 1}, {0, 2}}), sphere3(0.8),
                                               custom_manifold(1, 2, {{{"cos(t1)", "sin(t1)", "t1^2/3", "exp(-t1)"}, {false}, {{-1, 1}}, std::nullopt}})};
    for (const auto& s : subs) {
        std::vector<Eigen::VectorXd> pts;
        for (const auto& [c, t] : sample_nodes(s)) pts.push_back(t);
        CHECK(s.chart(0).jacobian_defect(pts) <= 1e-6);
    }
}

TEST_CASE("overlapping charts") {
    const auto s = two_chart_circle();
    auto samples = sample_nodes(s, 9);
    CHECK(s.partition_defect(samples) <= 1e-10);
    QuadratureOptions o;
    o.panels = 24;
    o.gauss_order = 10;
    CHECK(total_weight(quadrature(s, o)) == doctest::Approx(2 * pi).epsilon(1e-8));
    const auto loc = s.locate(1, vec({std::cos(4.0), std::sin(4.0)}));
    REQUIRE(loc.has_value());
    CHECK((*loc)[0] == doctest::Approx(4.0).epsilon(1e-10));
    CHECK_FALSE(s.locate(0, vec({std::cos(4.5), std::sin(4.5)})).has_value());
}

TEST_CASE("manifold JSON") {
    using nlohmann::json;
    CHECK(manifold_from_json(json::parse(R"J({"kind":"circle","radius":2})J")).kind() == "circle");
    const auto t = manifold_from_json(json::parse(R"J({"kind":"torus_product","radii":[1,2],"ambient_dim":3})J"));
    CHECK(t.dim() == 2);
    CHECK(t.ambient_dim() == 3);
    CHECK(manifold_from_json(json::parse(R"J({"kind":"parabola_patch","x1_range":[-1,1],"y1_range":[0,1]})J")).dim() == 2);
    CHECK(manifold_from_json(json::parse(R"J({"kind":"plane_patch","ranges":[[0,1],[0,1]]})J")).ambient_dim() == 1);
    CHECK(manifold_from_json(json::parse(R"J({"kind":"sphere3","radius":1})J")).dim() == 3);
    const auto c = manifold_from_json(json::parse(
        R"J({"kind":"custom","dim":1,"ambient_dim":1,"coords":["2*cos(t1)","2*sin(t1)"],"periodic":[true],"domain":[[0,6.283185307179586]]})J"));
    CHECK(total_weight(quadrature(c, {})) == doctest::Approx(4 * pi).epsilon(1e-12));
    CHECK(classify(c).tag == SubmanifoldClass::Lagrangian);

    CHECK_THROWS_AS(manifold_from_json(json::parse(R"J({"radius":1})J")), ConfigError);
    CHECK_THROWS_AS(manifold_from_json(json::parse(R"J({"kind":"blob"})J")), ConfigError);
    CHECK_THROWS_AS(manifold_from_json(json::parse(R"J({"kind":"circle","radius":"x"})J")), ConfigError);
    CHECK_THROWS_AS(manifold_from_json(json::parse(R"J({"kind":"circle","radius":-1})J")), ConfigError);
    CHECK_THROWS_AS(manifold_from_json(json::parse(R"J({"kind":"custom","dim":1,"ambient_dim":1,"coords":["t1"],"periodic":[true],"domain":[[0,1]]})J")),
                    ConfigError);
    CHECK_THROWS_AS(manifold_from_json(json::parse(R"J({"kind":"custom","dim":1,"ambient_dim":1,"coords":["t2","t1"],"periodic":[true],"domain":[[0,1]]})J")),
                    UnknownVariable);
}
