#include "szego/quadrature_rules.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "szego/error.hpp"

namespace szego {

Rule1D gauss_legendre(int n) {
    if (n < 1) throw InvalidArgument("Gauss-Legendre order must be at least 1");
    Rule1D rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Tricomi initial guess, then Newton on P_n.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-16) break;
        }
        // Recompute derivative at the converged node for the weight.
        double p0 = 1.0;
        double p1 = x;
        for (int j = 2; j <= n; ++j) {
            const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
            p0 = p1;
            p1 = p2;
        }
        dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        const auto lo = static_cast<std::size_t>(i);
        const auto hi = static_cast<std::size_t>(n - 1 - i);
        rule.nodes[lo] = -x;
        rule.nodes[hi] = x;
        rule.weights[lo] = w;
        rule.weights[hi] = w;
    }
    if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
    return rule;
}

Rule1D composite_gauss_legendre(double lo, double hi, int panels, int order) {
    if (!(hi > lo)) throw InvalidArgument("quadrature interval must have positive length");
    if (panels < 1) throw InvalidArgument("panel count must be at least 1");
    const Rule1D base = gauss_legendre(order);
    const double h = (hi - lo) / panels;
    Rule1D rule;
    rule.nodes.reserve(static_cast<std::size_t>(panels * order));
    rule.weights.reserve(rule.nodes.capacity());
    for (int p = 0; p < panels; ++p) {
        const double mid = lo + (p + 0.5) * h;
        for (std::size_t i = 0; i < base.nodes.size(); ++i) {
            rule.nodes.push_back(mid + 0.5 * h * base.nodes[i]);
            rule.weights.push_back(0.5 * h * base.weights[i]);
        }
    }
    return rule;
}

Rule1D periodic_trapezoid(double lo, double hi, int points) {
    if (!(hi > lo)) throw InvalidArgument("quadrature interval must have positive length");
    if (points < 1) throw InvalidArgument("trapezoid rule needs at least one point");
    const double h = (hi - lo) / points;
    Rule1D rule;
    for (int j = 0; j < points; ++j) {
        rule.nodes.push_back(lo + (j + 0.5) * h);
        rule.weights.push_back(h);
    }
    return rule;
}

Rule1D gauss_laguerre(int n, double a) {
    if (n < 1) throw InvalidArgument("Gauss-Laguerre order must be at least 1");
    if (!(a > -1.0)) throw InvalidArgument("Gauss-Laguerre exponent must exceed -1");
    Eigen::VectorXd diag(n);
    Eigen::VectorXd off(std::max(n - 1, 0));
    for (int i = 0; i < n; ++i) diag[i] = 2.0 * i + a + 1.0;
    for (int i = 1; i < n; ++i) off[i - 1] = std::sqrt(i * (i + a));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) throw ConvergenceFailure("Golub-Welsch eigensolve failed");

    const double mu0 = std::tgamma(a + 1.0);
    Rule1D rule;
    for (int i = 0; i < n; ++i) {
        const double v0 = solver.eigenvectors()(0, i);
        rule.nodes.push_back(solver.eigenvalues()[i]);
        rule.weights.push_back(mu0 * v0 * v0);
    }
    return rule;
}

}  // namespace szego
