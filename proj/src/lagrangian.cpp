#include "szego/lagrangian.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "szego/error.hpp"

namespace szego {

namespace {

double eval_at(const Expr& e, const Eigen::VectorXd& t) {
    return eval(e, std::span<const double>(t.data(), static_cast<std::size_t>(t.size())));
}

}  // namespace

BohrSommerfeldData circle_bohr_sommerfeld(double radius, const std::string& alpha) {
    std::ostringstream os;
    os.precision(17);
    os << radius * radius << "*t1";
    return {parse(os.str(), 1), parse(alpha, 1)};
}

double eta(const Eigen::VectorXd& x, const Eigen::VectorXd& v) {
    double s = 0.0;
    for (Eigen::Index j = 0; j + 1 < x.size(); j += 2) s += x[j] * v[j + 1] - x[j + 1] * v[j];
    return s;
}

BohrSommerfeldReport check_bohr_sommerfeld(const ChartedSubmanifold& sub, const BohrSommerfeldData& bs, double k,
                                           double tol) {
    BohrSommerfeldReport r;
    std::vector<Expr> dtheta;
    for (int j = 0; j < sub.dim(); ++j) dtheta.push_back(derive(bs.theta, j));
    for (const auto& [c, t] : sample_nodes(sub, 5)) {
        const Chart& ch = sub.chart(c);
        const Eigen::VectorXd x = ch.gamma(t);
        const Eigen::MatrixXd J = ch.jacobian(t);
        for (int j = 0; j < ch.dim; ++j) {
            const double lhs = eval_at(dtheta[static_cast<std::size_t>(j)], t);
            const double rhs = eta(x, J.col(j));
            r.max_derivative_defect = std::max(r.max_derivative_defect, std::abs(lhs - rhs));
            if (!ch.periodic[static_cast<std::size_t>(j)]) continue;
            Eigen::VectorXd t2 = t;
            t2[j] += ch.upper[j] - ch.lower[j];
            const double turns = k * (eval_at(bs.theta, t2) - eval_at(bs.theta, t)) / (2.0 * std::numbers::pi);
            r.max_closure_defect = std::max(r.max_closure_defect, std::abs(turns - std::round(turns)));
        }
    }
    r.ok = r.max_derivative_defect <= tol && r.max_closure_defect <= tol;
    return r;
}

Eigen::VectorXcd build_test_state(const FockTruncation& trunc, const ChartedSubmanifold& sub,
                                  const BohrSommerfeldData& bs, const std::vector<QuadNode>& nodes) {
    if (classify(sub).tag != SubmanifoldClass::Lagrangian)
        throw NotApplicable("Bohr-Sommerfeld states are built on Lagrangian submanifolds");
    const double k = trunc.k();
    const BohrSommerfeldReport rep = check_bohr_sommerfeld(sub, bs, k);
    if (!rep.ok) {
        std::ostringstream os;
        os << "Bohr-Sommerfeld condition fails: derivative defect " << rep.max_derivative_defect
           << ", phase closure defect " << rep.max_closure_defect;
        throw BohrSommerfeldViolation(os.str());
    }
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(trunc.size()));
    for (const auto& n : nodes) {
        const double alpha = eval_at(bs.alpha, n.t);
        if (alpha == 0.0) continue;
        const Complex f = n.weight * alpha * std::polar(1.0, k * eval_at(bs.theta, n.t));
        c += f * eval_basis_all(trunc, n.z).conjugate();
    }
    return c;
}

NormReport norm_asymptotics_check(const std::vector<double>& ks, const std::vector<double>& squared_norms,
                                  int ambient_dim, double alpha_l2, double slope_tol) {
    if (ks.size() != squared_norms.size()) throw DimensionMismatch("sweep and norms differ in length");
    NormReport r;
    r.ks = ks;
    r.target = alpha_l2;
    for (std::size_t i = 0; i < ks.size(); ++i)
        r.ratios.push_back(squared_norms[i] / std::pow(2.0 * ks[i] / std::numbers::pi, 0.5 * ambient_dim));
    r.fit = rate_regression(ks, r.ratios, alpha_l2, 3);
    r.pass = r.fit.below_noise_floor || r.fit.slope <= -1.0 + slope_tol;
    return r;
}

double rayleigh_lower_bound(const HermitianOperator& op, const Eigen::VectorXcd& psi) {
    if (psi.size() != op.matrix.rows()) throw DimensionMismatch("state and operator use different truncations");
    const double n2 = psi.squaredNorm();
    if (!(n2 > 0.0)) throw ZeroState("the test state vanishes");
    return psi.dot(op.matrix * psi).real() / n2;
}

double rayleigh_prediction(double k, int ambient_dim, const std::vector<QuadNode>& nodes,
                           const std::vector<double>& alpha_values, const std::vector<Complex>& a_values) {
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        s += nodes[i].weight * alpha_values[i] * alpha_values[i] * a_values[i].real();
    return std::pow(2.0 * k / std::numbers::pi, 0.5 * ambient_dim) * s;
}

}  // namespace szego
