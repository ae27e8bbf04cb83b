#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "szego/operators.hpp"

namespace szego {

struct SpectralSummary {
    std::vector<double> eigenvalues;  // descending
    double k = 0.0;
    int ambient_dim = 0;
    int dim = 0;
    int d_prime = -1;  // -1 when not applicable
    int max_degree = 0;
    Normalization normalization = Normalization::RawT;
    double max_residual = 0.0;  // worst ||Av - lambda v|| / ||A|| over the spot-checked pairs

    double max() const { return eigenvalues.empty() ? 0.0 : eigenvalues.front(); }
};

/// Ascending eigenvalues of a Hermitian matrix (upper triangle referenced).
Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& a);

SpectralSummary eigensolve(const HermitianOperator& op, int d_prime = -1);

/// phi on [0, R] with phi(s) / s^p continuous and phi(0) = 0.
struct TestFunction {
    std::string name;
    std::function<double(double)> phi;
    double exponent = 1.0;

    double operator()(double s) const { return phi(s); }

    static TestFunction power(double n);
    /// s log s with 0 log 0 = 0, declared exponent 1/2.
    static TestFunction entropy();
    /// 0 below l1, linear up to 1 on [l2, m1], linear down to 0 at m2.
    static TestFunction trapezoid(double l1, double l2, double m1, double m2);
    static TestFunction custom(std::string name, std::function<double(double)> phi, double exponent);
};

/// Eigenvalues with round-off negatives in [-1e-10 max, 0) set to 0; throws below that.
std::vector<double> clamped(const std::vector<double>& eigenvalues);

double trace_phi(const SpectralSummary& spec, const TestFunction& phi);

/// Number of eigenvalues in the closed interval [lo, hi].
long weyl_count(const SpectralSummary& spec, double lo, double hi);

/// sum_j s_j^p over singular values.
double schatten_sum(const HermitianOperator& op, double p);
double schatten_sum(const Eigen::MatrixXcd& m, bool hermitian, double p);

/// -sum p log p of a density matrix spectrum.
double entropy(const SpectralSummary& rho);
double entropy(const std::vector<double>& probabilities);

/// || rho_a - rho_b ||_1.
double trace_distance(const HermitianOperator& a, const HermitianOperator& b);

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    bool below_noise_floor = false;  // every |value - target| at round-off level
    std::size_t points = 0;
};

/// Least-squares fit of log|value - target| against log k.
RateFit rate_regression(const std::vector<double>& ks, const std::vector<double>& values, double target,
                        std::size_t min_points = 4);

struct Provenance {
    double k = 0.0;
    int ambient_dim = 0;
    int dim = 0;
    int d_prime = -1;
    int max_degree = 0;
    std::string quad_order;
};

Provenance provenance_of(const SpectralSummary& spec, const std::string& quad_order);

/// index,eigenvalue,k,normalization followed by the provenance columns.
void write_eigenvalue_csv(std::ostream& os, const SpectralSummary& spec, const std::string& quad_order,
                          bool header = true);

/// Shortest decimal that round-trips, for stable text output.
std::string format_double(double v);

}  // namespace szego
