#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace szego {

/// Element of the commutative ring generated by W: a polynomial of degree < d in W.
struct RingElement {
    std::vector<double> coeffs;  // c_0 I + c_1 W + ... + c_{d-1} W^{d-1}
    Eigen::MatrixXd matrix;      // realized value
};

/// Arithmetic in R[W] with Cayley-Hamilton reduction.
class WRing {
public:
    explicit WRing(Eigen::MatrixXd W);

    int dim() const { return static_cast<int>(W_.rows()); }
    const Eigen::MatrixXd& W() const { return W_; }
    /// Monic characteristic polynomial x^d + p_{d-1} x^{d-1} + ... + p_0, as (p_0, ..., p_{d-1}).
    const std::vector<double>& charpoly() const { return charpoly_; }

    /// Reduces an arbitrary polynomial in W and realizes it.
    RingElement element(std::vector<double> coeffs) const;
    RingElement identity(double c = 1.0) const { return element({c}); }

    RingElement add(const RingElement& a, const RingElement& b) const;
    RingElement scale(const RingElement& a, double c) const;
    RingElement mul(const RingElement& a, const RingElement& b) const;

private:
    Eigen::MatrixXd W_;
    std::vector<double> charpoly_;
};

/// The q x q block tri-diagonal phase Hessian with blocks 2G (diagonal), -G - iH (super)
/// and -G + iH (sub).
struct BlockTridiagonal {
    int q = 0;
    Eigen::MatrixXd G;
    Eigen::MatrixXd H;

    Eigen::MatrixXcd dense() const;
};

BlockTridiagonal build_hessian(const Eigen::MatrixXd& G, const Eigen::MatrixXd& H, int q);

/// D_1 = 2I, D_2 = 3I - W^2, D_{q+1} = 2 D_q - (I + W^2) D_{q-1}, with W = G^{-1} H.
RingElement det_recursion(const Eigen::MatrixXd& G, const Eigen::MatrixXd& H, int q);

/// sum_j binom(q+1, 2j+1) (-1)^j W^{2j}.
RingElement det_closed_form(const Eigen::MatrixXd& W, int q);

struct SqrtDetReport {
    int dim = 0;
    int q = 0;
    std::complex<double> det_dense;  // LU determinant of the dense Hessian
    double det_ring = 0.0;           // det(G)^q det(D_q)
    double sqrt_det_dq = 0.0;        // sqrt(det D_q)
    double delta = 0.0;              // Delta_{q+1} from the lambdas of W
    double recursion_vs_closed = 0.0;  // max-entry relative difference of the two ring values
    double dense_vs_ring = 0.0;
    double sqrt_vs_delta = 0.0;
    bool pass = false;
};

SqrtDetReport verify_sqrt_det(const Eigen::MatrixXd& G, const Eigen::MatrixXd& H, int q, double tol = 1e-8);

/// G = A^T A + 0.1 I with standard normal A, H = (B - B^T)/2.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> random_metric_pair(int d, std::uint64_t seed);

struct HessianCheckRow {
    int dim = 0;
    int q = 0;
    int trials = 0;
    int failures = 0;
    double worst_recursion = 0.0;
    double worst_dense = 0.0;
    double worst_sqrt = 0.0;
};

/// Batch of random instances over every (d, q); trial t of (d, q) uses its own seed.
std::vector<HessianCheckRow> hessian_check(const std::vector<int>& dims, const std::vector<int>& qs, int trials,
                                           std::uint64_t seed, double tol = 1e-8);

}  // namespace szego
