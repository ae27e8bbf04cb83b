#include "szego/spectral.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <numeric>
#include <ostream>
#include <sstream>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "szego/error.hpp"

namespace szego {

namespace {

struct Eigh {
    Eigen::VectorXd values;
    Eigen::MatrixXcd vectors;
};

Eigh eigh(const Eigen::MatrixXcd& a, bool vectors) {
    const auto n = static_cast<lapack_int>(a.rows());
    if (a.cols() != a.rows()) throw DimensionMismatch("eigensolve needs a square matrix");
    Eigh out;
    out.vectors = a;
    out.values.resize(n);
    if (n == 0) return out;
    const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, vectors ? 'V' : 'N', 'U', n, out.vectors.data(), n,
                                           out.values.data());
    if (info != 0) {
        std::ostringstream os;
        os << "zheevd failed with info=" << info << " on a " << n << "x" << n << " matrix";
        throw ConvergenceFailure(os.str());
    }
    return out;
}

}  // namespace

Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& a) { return eigh(a, false).values; }

SpectralSummary eigensolve(const HermitianOperator& op, int d_prime) {
    if (!op.hermitian) throw InvalidArgument("eigensolve needs a Hermitian operator; use schatten_sum for complex amplitudes");
    const Eigh e = eigh(op.matrix, true);
    SpectralSummary s;
    s.k = op.trunc.k();
    s.ambient_dim = op.trunc.ambient_dim();
    s.dim = op.dim;
    s.d_prime = d_prime;
    s.max_degree = op.trunc.max_degree();
    s.normalization = op.normalization;
    s.eigenvalues.assign(e.values.data(), e.values.data() + e.values.size());
    std::reverse(s.eigenvalues.begin(), s.eigenvalues.end());

    const double norm = std::max(std::abs(e.values[0]), std::abs(e.values[e.values.size() - 1]));
    if (norm > 0.0) {
        const Eigen::Index n = e.values.size();
        for (Eigen::Index i : {Eigen::Index{0}, n / 2, n - 1}) {
            const Eigen::VectorXcd v = e.vectors.col(i);
            const double r = (op.matrix * v - e.values[i] * v).norm() / norm;
            s.max_residual = std::max(s.max_residual, r);
        }
        if (s.max_residual > 1e-8) {
            std::ostringstream os;
            os << "eigenpair residual " << s.max_residual << " exceeds 1e-8 relative";
            throw ConvergenceFailure(os.str());
        }
    }
    return s;
}

TestFunction TestFunction::power(double n) {
    if (!(n > 0.0)) throw InvalidArgument("power test function needs a positive exponent");
    std::ostringstream name;
    name << "power:" << n;
    return {name.str(), [n](double s) { return std::pow(s, n); }, n};
}

TestFunction TestFunction::entropy() {
    return {"entropy", [](double s) { return s > 0.0 ? s * std::log(s) : 0.0; }, 0.5};
}

TestFunction TestFunction::trapezoid(double l1, double l2, double m1, double m2) {
    if (!(0.0 < l1 && l1 < l2 && l2 <= m1 && m1 < m2))
        throw InvalidArgument("trapezoid needs 0 < l1 < l2 <= m1 < m2");
    std::ostringstream name;
    name << "trapezoid:" << l1 << "," << l2 << "," << m1 << "," << m2;
    return {name.str(),
            [=](double s) {
                if (s <= l1 || s >= m2) return 0.0;
                if (s < l2) return (s - l1) / (l2 - l1);
                if (s <= m1) return 1.0;
                return (m2 - s) / (m2 - m1);
            },
            1.0};
}

TestFunction TestFunction::custom(std::string name, std::function<double(double)> phi, double exponent) {
    return {std::move(name), std::move(phi), exponent};
}

std::vector<double> clamped(const std::vector<double>& eigenvalues) {
    double mx = 0.0;
    for (double v : eigenvalues) mx = std::max(mx, std::abs(v));
    std::vector<double> out = eigenvalues;
    for (double& v : out) {
        if (v >= 0.0) continue;
        if (v >= -1e-10 * mx) {
            v = 0.0;
        } else {
            std::ostringstream os;
            os << "eigenvalue " << v << " is negative beyond round-off (max " << mx << ")";
            throw NegativeEigenvalue(os.str());
        }
    }
    return out;
}

double trace_phi(const SpectralSummary& spec, const TestFunction& phi) {
    double s = 0.0;
    for (double v : clamped(spec.eigenvalues)) s += phi(v);
    return s;
}

long weyl_count(const SpectralSummary& spec, double lo, double hi) {
    if (!(lo > 0.0) || hi < lo) throw InvalidArgument("Weyl interval needs 0 < lo <= hi");
    return std::count_if(spec.eigenvalues.begin(), spec.eigenvalues.end(),
                         [&](double v) { return v >= lo && v <= hi; });
}

double schatten_sum(const Eigen::MatrixXcd& m, bool hermitian, double p) {
    if (!(p > 0.0)) throw InvalidArgument("Schatten exponent must be positive");
    double s = 0.0;
    if (hermitian) {
        const Eigen::VectorXd ev = hermitian_eigenvalues(m);
        for (Eigen::Index i = 0; i < ev.size(); ++i) s += std::pow(std::abs(ev[i]), p);
        return s;
    }
    const Eigen::MatrixXcd gram = m.adjoint() * m;
    const Eigen::VectorXd ev = hermitian_eigenvalues(gram);
    std::vector<double> sq(ev.data(), ev.data() + ev.size());
    for (double v : clamped(sq)) s += std::pow(std::sqrt(v), p);
    return s;
}

double schatten_sum(const HermitianOperator& op, double p) { return schatten_sum(op.matrix, op.hermitian, p); }

double entropy(const std::vector<double>& probabilities) {
    const double total = std::accumulate(probabilities.begin(), probabilities.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-6) {
        std::ostringstream os;
        os << "density matrix has trace " << total << ", expected 1";
        throw NormalizationError(os.str());
    }
    double h = 0.0;
    for (double p : clamped(probabilities))
        if (p > 0.0) h -= p * std::log(p);
    return h;
}

double entropy(const SpectralSummary& rho) { return entropy(rho.eigenvalues); }

double trace_distance(const HermitianOperator& a, const HermitianOperator& b) {
    if (a.matrix.rows() != b.matrix.rows() || a.matrix.cols() != b.matrix.cols())
        throw DimensionMismatch("trace distance needs operators on the same truncation");
    return schatten_sum(a.matrix - b.matrix, a.hermitian && b.hermitian, 1.0);
}

RateFit rate_regression(const std::vector<double>& ks, const std::vector<double>& values, double target,
                        std::size_t min_points) {
    if (ks.size() != values.size()) throw DimensionMismatch("sweep and values differ in length");
    if (ks.size() < min_points) throw DegenerateSweep("rate regression needs more sweep points");
    RateFit fit;
    fit.points = ks.size();
    const double floor = 1e-14 * std::max(1.0, std::abs(target));
    std::vector<double> x;
    std::vector<double> y;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        if (!(ks[i] > 0.0)) throw DegenerateSweep("sweep values must be positive");
        const double gap = std::abs(values[i] - target);
        if (gap <= floor) continue;
        x.push_back(std::log(ks[i]));
        y.push_back(std::log(gap));
    }
    if (x.empty()) {
        fit.below_noise_floor = true;
        return fit;
    }
    if (x.size() < 2) throw DegenerateSweep("too few sweep points above the noise floor");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx <= 0.0) throw DegenerateSweep("sweep needs at least two distinct k");
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    return fit;
}

std::string format_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, r.ptr);
}

Provenance provenance_of(const SpectralSummary& spec, const std::string& quad_order) {
    return {spec.k, spec.ambient_dim, spec.dim, spec.d_prime, spec.max_degree, quad_order};
}

void write_eigenvalue_csv(std::ostream& os, const SpectralSummary& spec, const std::string& quad_order,
                          bool header) {
    if (header) os << "index,eigenvalue,k,normalization,N,d,d_prime,M,quad_order\n";
    for (std::size_t i = 0; i < spec.eigenvalues.size(); ++i) {
        os << i << ',' << format_double(spec.eigenvalues[i]) << ',' << format_double(spec.k) << ','
           << to_string(spec.normalization) << ',' << spec.ambient_dim << ',' << spec.dim << ','
           << spec.d_prime << ',' << spec.max_degree << ',' << quad_order << '\n';
    }
}

}  // namespace szego
