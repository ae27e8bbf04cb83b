#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace szego {

using Complex = std::complex<double>;

/// A point of C^N, stored as N complex coordinates z_j = x_j + i y_j.
using AmbientPoint = Eigen::VectorXcd;

/// Exponents (n_1, ..., n_N) of a monomial z^n.
using MultiIndex = std::vector<int>;

inline int total_degree(const MultiIndex& n) {
    int s = 0;
    for (int v : n) s += v;
    return s;
}

/**
 Truncation of the weighted Bargmann space B_k to monomials of total degree <= M.

 The basis is the normalized family z^n e^{-k|z|^2/2} / ||z^n e^{-k|z|^2/2}||, ordered
 graded-lexicographically: by total degree, then by exponents in decreasing
 lexicographic order, so (1,0) precedes (0,1).
 */
class FockTruncation {
public:
    FockTruncation(int ambient_dim, double k, int max_degree);

    int ambient_dim() const noexcept { return ambient_dim_; }
    double k() const noexcept { return k_; }
    int max_degree() const noexcept { return max_degree_; }

    std::size_t size() const noexcept { return basis_.size(); }
    const MultiIndex& index(std::size_t i) const { return basis_.at(i); }
    const std::vector<MultiIndex>& basis() const noexcept { return basis_; }

    /// Position of n in the basis, or nullopt if n is not a member.
    std::optional<std::size_t> position(const MultiIndex& n) const;

    /// log of sqrt(k^n / n!) * sqrt(k/pi) for a single coordinate, n <= M.
    double log_factor(int n) const { return log_factor_[static_cast<std::size_t>(n)]; }

private:
    int ambient_dim_;
    double k_;
    int max_degree_;
    std::vector<MultiIndex> basis_;
    std::vector<double> log_factor_;
};

/// ||z^n e^{-k|z|^2/2}|| = sqrt(pi^N n! / k^{|n|+N}).
double basis_norm(const FockTruncation& trunc, const MultiIndex& n);

/// omega(z, w) = (1/2i)(z.conj(w) - conj(z).w) = Im(sum_j z_j conj(w_j)).
double symplectic_form(const AmbientPoint& z, const AmbientPoint& w);

/// Pi_k(z, conj(w)) = (k/pi)^N e^{k z.conj(w)} e^{-k|z|^2/2} e^{-k|w|^2/2}, assembled as
/// (k/pi)^N e^{-k|z-w|^2/2} e^{i k omega(z,w)} so that large k|z||w| cannot overflow.
Complex reproducing_kernel(const FockTruncation& trunc, const AmbientPoint& z, const AmbientPoint& w);

/// Log-magnitude of the reproducing kernel.
double log_abs_reproducing_kernel(const FockTruncation& trunc, const AmbientPoint& z, const AmbientPoint& w);

/// Normalized basis element n evaluated at z.
Complex eval_basis(const FockTruncation& trunc, const MultiIndex& n, const AmbientPoint& z);

/// All normalized basis elements at z, in basis order.
Eigen::VectorXcd eval_basis_all(const FockTruncation& trunc, const AmbientPoint& z);

/// Coefficients of the coherent state e_w(z) = Pi_k(z, conj(w)) in the normalized basis,
/// c_n = conj(eval_basis(n, w)).
Eigen::VectorXcd coherent_state_coeffs(const FockTruncation& trunc, const AmbientPoint& w);

}  // namespace szego
