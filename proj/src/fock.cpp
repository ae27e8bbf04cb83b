#include "szego/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "szego/error.hpp"

namespace szego {

namespace {

// Appends all exponent tuples of the given total degree in decreasing lexicographic order.
void enumerate_degree(int dims, int degree, MultiIndex& prefix, std::vector<MultiIndex>& out) {
    if (dims == 1) {
        prefix.push_back(degree);
        out.push_back(prefix);
        prefix.pop_back();
        return;
    }
    for (int first = degree; first >= 0; --first) {
        prefix.push_back(first);
        enumerate_degree(dims - 1, degree - first, prefix, out);
        prefix.pop_back();
    }
}

void check_point(const FockTruncation& trunc, const AmbientPoint& z) {
    if (z.size() != trunc.ambient_dim())
        throw DimensionMismatch("ambient point has " + std::to_string(z.size()) + " coordinates, expected " +
                                std::to_string(trunc.ambient_dim()));
}

}  // namespace

FockTruncation::FockTruncation(int ambient_dim, double k, int max_degree)
    : ambient_dim_(ambient_dim), k_(k), max_degree_(max_degree) {
    if (ambient_dim < 1) throw InvalidArgument("ambient dimension must be positive");
    if (!(k > 0) || !std::isfinite(k)) throw InvalidArgument("semiclassical parameter k must be positive");
    if (max_degree < 0) throw InvalidArgument("max degree must be non-negative");

    MultiIndex prefix;
    prefix.reserve(static_cast<std::size_t>(ambient_dim));
    for (int deg = 0; deg <= max_degree; ++deg) enumerate_degree(ambient_dim, deg, prefix, basis_);

    log_factor_.resize(static_cast<std::size_t>(max_degree) + 1);
    const double base = 0.5 * std::log(k / std::numbers::pi);
    for (int n = 0; n <= max_degree; ++n)
        log_factor_[static_cast<std::size_t>(n)] = base + 0.5 * (n * std::log(k) - std::lgamma(n + 1.0));
}

std::optional<std::size_t> FockTruncation::position(const MultiIndex& n) const {
    if (static_cast<int>(n.size()) != ambient_dim_) return std::nullopt;
    if (std::any_of(n.begin(), n.end(), [](int v) { return v < 0; })) return std::nullopt;
    const int deg = total_degree(n);
    if (deg > max_degree_) return std::nullopt;
    // Degrees below `deg` occupy binomial(deg-1+N, N) slots; search within the degree block.
    auto first = std::lower_bound(basis_.begin(), basis_.end(), deg,
                                  [](const MultiIndex& m, int d) { return total_degree(m) < d; });
    auto it = std::find(first, basis_.end(), n);
    if (it == basis_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - basis_.begin());
}

double basis_norm(const FockTruncation& trunc, const MultiIndex& n) {
    if (!trunc.position(n)) throw InvalidArgument("multi-index is not in the truncated basis");
    double log_norm = 0.0;
    for (int nj : n) log_norm -= trunc.log_factor(nj);
    return std::exp(log_norm);
}

double symplectic_form(const AmbientPoint& z, const AmbientPoint& w) {
    if (z.size() != w.size()) throw DimensionMismatch("symplectic form of points with different dimensions");
    double s = 0.0;
    for (Eigen::Index j = 0; j < z.size(); ++j) s += std::imag(z[j] * std::conj(w[j]));
    return s;
}

double log_abs_reproducing_kernel(const FockTruncation& trunc, const AmbientPoint& z, const AmbientPoint& w) {
    check_point(trunc, z);
    check_point(trunc, w);
    const double k = trunc.k();
    return trunc.ambient_dim() * std::log(k / std::numbers::pi) - 0.5 * k * (z - w).squaredNorm();
}

Complex reproducing_kernel(const FockTruncation& trunc, const AmbientPoint& z, const AmbientPoint& w) {
    const double log_mag = log_abs_reproducing_kernel(trunc, z, w);
    return std::polar(std::exp(log_mag), trunc.k() * symplectic_form(z, w));
}

Complex eval_basis(const FockTruncation& trunc, const MultiIndex& n, const AmbientPoint& z) {
    check_point(trunc, z);
    if (!trunc.position(n)) throw InvalidArgument("multi-index is not in the truncated basis");
    double log_mag = -0.5 * trunc.k() * z.squaredNorm();
    double phase = 0.0;
    for (std::size_t j = 0; j < n.size(); ++j) {
        const Complex zj = z[static_cast<Eigen::Index>(j)];
        log_mag += trunc.log_factor(n[j]);
        if (n[j] == 0) continue;
        if (zj == Complex(0.0)) return Complex(0.0);
        log_mag += n[j] * std::log(std::abs(zj));
        phase += n[j] * std::arg(zj);
    }
    return std::polar(std::exp(log_mag), phase);
}

Eigen::VectorXcd eval_basis_all(const FockTruncation& trunc, const AmbientPoint& z) {
    check_point(trunc, z);
    const int dims = trunc.ambient_dim();
    const int max_deg = trunc.max_degree();
    const auto width = static_cast<std::size_t>(max_deg) + 1;

    // Per-coordinate log-magnitude and phase of the 1-D normalized factors.
    std::vector<double> log_mag(static_cast<std::size_t>(dims) * width);
    std::vector<double> phase(log_mag.size());
    std::vector<bool> vanishes(log_mag.size(), false);
    for (int j = 0; j < dims; ++j) {
        const Complex zj = z[j];
        const double abs_z = std::abs(zj);
        const double log_abs = abs_z > 0 ? std::log(abs_z) : 0.0;
        const double arg_z = abs_z > 0 ? std::arg(zj) : 0.0;
        const double gauss = -0.5 * trunc.k() * abs_z * abs_z;
        for (int n = 0; n <= max_deg; ++n) {
            const auto slot = static_cast<std::size_t>(j) * width + static_cast<std::size_t>(n);
            log_mag[slot] = gauss + trunc.log_factor(n) + n * log_abs;
            phase[slot] = n * arg_z;
            vanishes[slot] = (abs_z == 0.0 && n > 0);
        }
    }

    Eigen::VectorXcd out(static_cast<Eigen::Index>(trunc.size()));
    for (std::size_t i = 0; i < trunc.size(); ++i) {
        const MultiIndex& n = trunc.index(i);
        double lm = 0.0;
        double ph = 0.0;
        bool zero = false;
        for (int j = 0; j < dims; ++j) {
            const auto slot = static_cast<std::size_t>(j) * width + static_cast<std::size_t>(n[static_cast<std::size_t>(j)]);
            zero = zero || vanishes[slot];
            lm += log_mag[slot];
            ph += phase[slot];
        }
        out[static_cast<Eigen::Index>(i)] = zero ? Complex(0.0) : std::polar(std::exp(lm), ph);
    }
    return out;
}

Eigen::VectorXcd coherent_state_coeffs(const FockTruncation& trunc, const AmbientPoint& w) {
    return eval_basis_all(trunc, w).conjugate();
}

}  // namespace szego
