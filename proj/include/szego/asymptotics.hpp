#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "szego/manifold.hpp"
#include "szego/spectral.hpp"

namespace szego {

/// O_{-alpha}(phi)(t) = (1/Gamma(alpha)) int_0^t phi(s) log(t/s)^{alpha-1} ds/s; phi(t) at alpha = 0.
double mellin_log(const TestFunction& phi, double alpha, double t, int nodes = 64);

/// 2^{d'/2} (pi/k)^{d/2}: turns Tr phi(S) into the quantity with a finite limit.
double szego_scale(int d_prime, int dim, double k);

struct SzegoPrediction {
    double value = 0.0;
    int d_prime = 0;
    int dim = 0;

    double scale(double k) const { return szego_scale(d_prime, dim, k); }
};

/// int O_{-d'/2}(phi)(a(w)) dsigma(w).
SzegoPrediction szego_functional(const ChartedSubmanifold& sub, const std::vector<QuadNode>& nodes,
                                 const std::vector<Complex>& a_values, const TestFunction& phi);
SzegoPrediction szego_functional(int d_prime, int dim, const std::vector<QuadNode>& nodes,
                                 const std::vector<Complex>& a_values, const TestFunction& phi);

/// D_a(s) = (1/(Gamma(d'/2) s)) int_{a >= s} log(a/s)^{d'/2-1} dsigma.
double limiting_density(int d_prime, const std::vector<QuadNode>& nodes, const std::vector<Complex>& a_values,
                        double s);

/// |Gamma| / Gamma(1 + d'/2) [(-log lo)^{d'/2} - (-log hi)^{d'/2}].
double weyl_prediction(double volume, int d_prime, double lo, double hi);

/// int_lo^hi D_a(s) ds = sum_w [log(a/lo)_+^{d'/2} - log(a/hi)_+^{d'/2}] / Gamma(1 + d'/2).
double weyl_prediction(int d_prime, const std::vector<QuadNode>& nodes, const std::vector<Complex>& a_values,
                       double lo, double hi);

/// [2^{d/2}(k/pi)^{N-d/2}]^n (k/2pi)^{d/2} int prod a_j / Delta_n dsigma with Delta_n taken per node.
double moment_prediction(const ChartedSubmanifold& sub, const std::vector<QuadNode>& nodes,
                         const std::vector<std::vector<Complex>>& amplitudes, double k);

/// int |a|^p / p^{d'/2} dsigma.
double schatten_prediction(const ChartedSubmanifold& sub, const std::vector<QuadNode>& nodes,
                           const std::vector<Complex>& a_values, double p);

struct EntropyPrediction {
    double value = 0.0;  // limit of H(rho_a) + log(C_d k^{-d/2})
    double c_d = 0.0;    // 2^{d'/2} pi^{d/2}
};

EntropyPrediction entropy_prediction(const ChartedSubmanifold& sub, const std::vector<QuadNode>& nodes,
                                     const std::vector<Complex>& a_values);

struct DensityCurve {
    std::vector<double> s;
    std::vector<double> density;
    std::vector<std::size_t> jumps;  // indices i where the curve jumps between s[i-1] and s[i]
};

/// D_a sampled on an even grid over (0, max a); jumps above `jump_ratio` relative are flagged.
DensityCurve density_curve(int d_prime, const std::vector<QuadNode>& nodes, const std::vector<Complex>& a_values,
                           int samples, double jump_ratio = 0.5);

void write_density_csv(std::ostream& os, const DensityCurve& curve, const Provenance& prov);

/// Line plot of one or more density curves.
void write_density_svg(std::ostream& os, const std::vector<std::pair<std::string, DensityCurve>>& curves);

}  // namespace szego
