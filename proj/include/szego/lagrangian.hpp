#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "szego/amplitude.hpp"
#include "szego/manifold.hpp"
#include "szego/operators.hpp"
#include "szego/spectral.hpp"

namespace szego {

/**
 Phase theta and amplitude alpha of a Bohr-Sommerfeld test state on a Lagrangian chart.

 Conventions: the symplectic form is Omega = -2 omega with primitive
 eta = (i/2) sum_j (z_j dz̄_j - z̄_j dz_j), so eta[v] = Im(sum_j conj(z_j) v_j). theta must satisfy
 d theta = gamma^* eta, and k times its increment over each period must be a multiple of 2 pi.
 With this primitive the test-state kernel coincides with the operator kernel.
 */
struct BohrSommerfeldData {
    Expr theta;
    Expr alpha;
};

/// theta(t) = r^2 t on the circle of radius r.
BohrSommerfeldData circle_bohr_sommerfeld(double radius, const std::string& alpha = "1");

/// eta(x)[v] for interleaved real vectors.
double eta(const Eigen::VectorXd& x, const Eigen::VectorXd& v);

struct BohrSommerfeldReport {
    double max_derivative_defect = 0.0;  // max |d theta/dt_j - eta[gamma_j]|
    double max_closure_defect = 0.0;     // distance of k * period increment / 2pi to an integer
    bool ok = false;
};

BohrSommerfeldReport check_bohr_sommerfeld(const ChartedSubmanifold& sub, const BohrSommerfeldData& bs, double k,
                                           double tol = 1e-6);

/// c_n = int conj(e_n(w)) e^{ik theta(w)} alpha(w) dsigma(w).
Eigen::VectorXcd build_test_state(const FockTruncation& trunc, const ChartedSubmanifold& sub,
                                  const BohrSommerfeldData& bs, const std::vector<QuadNode>& nodes);

struct NormReport {
    std::vector<double> ks;
    std::vector<double> ratios;  // ||psi_k||^2 / (2k/pi)^{N/2}
    double target = 0.0;         // int |alpha|^2 dsigma
    RateFit fit;
    bool pass = false;
};

/// ||psi_k||^2 / (2k/pi)^{N/2} against int |alpha|^2; the gap must decay at rate -1 (within `slope_tol`).
NormReport norm_asymptotics_check(const std::vector<double>& ks, const std::vector<double>& squared_norms,
                                  int ambient_dim, double alpha_l2, double slope_tol = 0.1);

/// <T psi, psi> / ||psi||^2.
double rayleigh_lower_bound(const HermitianOperator& op, const Eigen::VectorXcd& psi);

/// (2k/pi)^{N/2} int |alpha|^2 a dsigma.
double rayleigh_prediction(double k, int ambient_dim, const std::vector<QuadNode>& nodes,
                           const std::vector<double>& alpha_values, const std::vector<Complex>& a_values);

}  // namespace szego
