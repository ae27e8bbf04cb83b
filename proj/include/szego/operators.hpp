#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "szego/amplitude.hpp"
#include "szego/fock.hpp"
#include "szego/manifold.hpp"

namespace szego {

enum class Normalization { RawT, ScaledS };

std::string to_string(Normalization n);

/// Dense matrix of T_{a dsigma} (or its rescaling S) in a truncated monomial basis.
struct HermitianOperator {
    Eigen::MatrixXcd matrix;
    FockTruncation trunc;
    Normalization normalization = Normalization::RawT;
    double factor = 1.0;         // scale applied on top of the raw Gram matrix
    int dim = 0;                 // d of the submanifold
    bool hermitian = true;       // false for complex amplitudes
    Complex amplitude_integral;  // quadrature value of int a dsigma
    double boundary_fraction = 0.0;  // share of |trace| carried by degree-M basis elements
    bool truncation_warning = false;

    HermitianOperator(Eigen::MatrixXcd m, FockTruncation t) : matrix(std::move(m)), trunc(std::move(t)) {}
};

/// Largest basis assemble_T accepts.
inline constexpr std::size_t kMaxBasis = 5000;

/// Above this share of the trace in the top degree the truncation is flagged.
inline constexpr double kTruncationWarning = 1e-8;

/// max |w| over nodes where a does not vanish.
double support_radius(const std::vector<QuadNode>& nodes, const std::vector<Complex>& a_values);

/// M = ceil(4 k R^2), at least 1.
int default_max_degree(double k, double support_radius);

/// Quadrature sized for the kernel oscillation at k and for exact integration of the
/// trigonometric entries up to degree M on periodic axes.
QuadratureOptions default_quadrature(const ChartedSubmanifold& sub, double k, double support_radius, int max_degree);

/// T_mn = sum_q w_q a(w_q) conj(e_m(w_q)) e_n(w_q).
HermitianOperator assemble_T(const FockTruncation& trunc, const ChartedSubmanifold& sub, const Amplitude& a,
                             const std::vector<QuadNode>& nodes);

/// S = 2^{-d'/2} (pi/k)^{N-d/2} T.
HermitianOperator scale_to_S(const HermitianOperator& op, int d_prime);
double s_factor(int ambient_dim, int dim, int d_prime, double k);

/// (k/pi)^N int e^{-k|z-w|^2} a(w) dsigma(w).
Complex covariant_symbol(const FockTruncation& trunc, const std::vector<QuadNode>& nodes,
                         const std::vector<Complex>& a_values, const AmbientPoint& z);

struct TraceCheck {
    Complex trace;
    Complex prediction;
    double relative_gap = 0.0;
};

/// Matrix trace against (k/pi)^N int a dsigma.
TraceCheck exact_trace(const HermitianOperator& op);

/// (k/pi)^{2N} double integral of e^{-k|z-w|^2} a(z) b(w) over the quadrature.
Complex pair_trace_integral(double k, int ambient_dim, const std::vector<QuadNode>& nodes,
                            const std::vector<Complex>& a_values, const std::vector<Complex>& b_values);

/// Tr(T_{a_1} ... T_{a_n}) as the direct n-fold kernel integral over the quadrature.
/// Throws CostLimit when nodes^n exceeds `budget`.
Complex nfold_trace_integral(double k, int ambient_dim, const std::vector<QuadNode>& nodes,
                             const std::vector<std::vector<Complex>>& amplitudes, double budget = 1e10);

/// One term c z^alpha conj(z)^beta of a polynomial H(z, conj z).
struct PolyTerm {
    Complex coeff;
    MultiIndex alpha;
    MultiIndex beta;
};
using Polynomial = std::vector<PolyTerm>;

Complex eval_polynomial(const Polynomial& h, const AmbientPoint& z);

/// Matrix of the ordinary Toeplitz operator T_H in the truncated basis, from exact
/// Gaussian moments.
Eigen::MatrixXcd toeplitz_polynomial_matrix(const FockTruncation& trunc, const Polynomial& h);

struct MixedTrace {
    Complex trace;
    Complex prediction;  // (k/pi)^N int H a dsigma
    double relative_gap = 0.0;
};

MixedTrace mixed_trace_polynomial_H(const HermitianOperator& t_a, const Polynomial& h,
                                    const std::vector<QuadNode>& nodes, const std::vector<Complex>& a_values);

/// 16-byte little-endian header (u32 dim, u16 N, u16 M, f64 k) then dim*dim row-major
/// complex doubles (re, im).
void write_matrix_binary(const HermitianOperator& op, const std::string& path);

struct BinaryMatrix {
    std::uint32_t dim = 0;
    std::uint16_t ambient_dim = 0;
    std::uint16_t max_degree = 0;
    double k = 0.0;
    Eigen::MatrixXcd matrix;
};

BinaryMatrix read_matrix_binary(const std::string& path);

}  // namespace szego
