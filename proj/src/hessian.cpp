#include "szego/hessian.hpp"

#include <cmath>
#include <random>

#include "szego/error.hpp"
#include "szego/manifold.hpp"

namespace szego {

namespace {

double binom(int n, int k) {
    return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)));
}

double rel_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    const double scale = std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
    return scale > 0.0 ? (a - b).cwiseAbs().maxCoeff() / scale : 0.0;
}

}  // namespace

WRing::WRing(Eigen::MatrixXd W) : W_(std::move(W)) {
    const int d = static_cast<int>(W_.rows());
    if (W_.cols() != d || d < 1) throw DimensionMismatch("W must be a non-empty square matrix");
    // Faddeev-LeVerrier: M_1 = I, c_{d-1} = -tr(W); M_k = W M_{k-1} + c_{d-k+1} I, c_{d-k} = -tr(W M_k)/k.
    std::vector<double> c(static_cast<std::size_t>(d) + 1, 0.0);
    c[static_cast<std::size_t>(d)] = 1.0;
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(d, d);
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
    for (int k = 1; k <= d; ++k) {
        M = W_ * M + c[static_cast<std::size_t>(d - k + 1)] * I;
        c[static_cast<std::size_t>(d - k)] = -(W_ * M).trace() / k;
    }
    charpoly_.assign(c.begin(), c.begin() + d);
}

RingElement WRing::element(std::vector<double> coeffs) const {
    const int d = dim();
    // W^m = -sum_i p_i W^{m-d+i} for m >= d.
    for (int m = static_cast<int>(coeffs.size()) - 1; m >= d; --m) {
        const double top = coeffs[static_cast<std::size_t>(m)];
        coeffs[static_cast<std::size_t>(m)] = 0.0;
        if (top == 0.0) continue;
        for (int i = 0; i < d; ++i) coeffs[static_cast<std::size_t>(m - d + i)] -= top * charpoly_[static_cast<std::size_t>(i)];
    }
    coeffs.resize(static_cast<std::size_t>(d), 0.0);
    RingElement e;
    e.coeffs = coeffs;
    e.matrix = Eigen::MatrixXd::Zero(d, d);
    Eigen::MatrixXd P = Eigen::MatrixXd::Identity(d, d);
    for (int i = 0; i < d; ++i) {
        e.matrix += coeffs[static_cast<std::size_t>(i)] * P;
        P = (P * W_).eval();
    }
    return e;
}

RingElement WRing::add(const RingElement& a, const RingElement& b) const {
    std::vector<double> c(std::max(a.coeffs.size(), b.coeffs.size()), 0.0);
    for (std::size_t i = 0; i < a.coeffs.size(); ++i) c[i] += a.coeffs[i];
    for (std::size_t i = 0; i < b.coeffs.size(); ++i) c[i] += b.coeffs[i];
    return element(std::move(c));
}

RingElement WRing::scale(const RingElement& a, double s) const {
    std::vector<double> c = a.coeffs;
    for (double& v : c) v *= s;
    return element(std::move(c));
}

RingElement WRing::mul(const RingElement& a, const RingElement& b) const {
    std::vector<double> c(a.coeffs.size() + b.coeffs.size(), 0.0);
    for (std::size_t i = 0; i < a.coeffs.size(); ++i)
        for (std::size_t j = 0; j < b.coeffs.size(); ++j) c[i + j] += a.coeffs[i] * b.coeffs[j];
    return element(std::move(c));
}

Eigen::MatrixXcd BlockTridiagonal::dense() const {
    const Eigen::Index d = G.rows();
    const Eigen::Index n = q * d;
    Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(n, n);
    const std::complex<double> i(0.0, 1.0);
    const Eigen::MatrixXcd Gc = G.cast<std::complex<double>>();
    const Eigen::MatrixXcd Hc = H.cast<std::complex<double>>();
    for (int b = 0; b < q; ++b) {
        S.block(b * d, b * d, d, d) = 2.0 * Gc;
        if (b + 1 < q) {
            S.block(b * d, (b + 1) * d, d, d) = -Gc - i * Hc;
            S.block((b + 1) * d, b * d, d, d) = -Gc + i * Hc;
        }
    }
    return S;
}

BlockTridiagonal build_hessian(const Eigen::MatrixXd& G, const Eigen::MatrixXd& H, int q) {
    if (q < 1) throw InvalidArgument("the Hessian needs q >= 1 blocks");
    if (G.rows() != G.cols() || H.rows() != G.rows() || H.cols() != G.cols())
        throw DimensionMismatch("G and H must be square of equal size");
    if ((G - G.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + G.cwiseAbs().maxCoeff()))
        throw InvalidArgument("G must be symmetric");
    if ((H + H.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + H.cwiseAbs().maxCoeff()))
        throw InvalidArgument("H must be skew-symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(G);
    if (llt.info() != Eigen::Success) throw InvalidArgument("G must be positive definite");
    return {q, G, H};
}

RingElement det_recursion(const Eigen::MatrixXd& G, const Eigen::MatrixXd& H, int q) {
    if (q < 1) throw InvalidArgument("q must be at least 1");
    const WRing ring(G.ldlt().solve(H));
    const RingElement Z = ring.element({1.0, 0.0, 1.0});
    RingElement prev = ring.identity(2.0);
    if (q == 1) return prev;
    RingElement cur = ring.element({3.0, 0.0, -1.0});
    for (int m = 2; m < q; ++m) {
        RingElement next = ring.add(ring.scale(cur, 2.0), ring.scale(ring.mul(Z, prev), -1.0));
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

RingElement det_closed_form(const Eigen::MatrixXd& W, int q) {
    if (q < 1) throw InvalidArgument("q must be at least 1");
    const WRing ring(W);
    std::vector<double> c(static_cast<std::size_t>(q) + 1, 0.0);
    for (int j = 0; 2 * j <= q; ++j) c[static_cast<std::size_t>(2 * j)] = binom(q + 1, 2 * j + 1) * ((j % 2) ? -1.0 : 1.0);
    return ring.element(std::move(c));
}

SqrtDetReport verify_sqrt_det(const Eigen::MatrixXd& G, const Eigen::MatrixXd& H, int q, double tol) {
    const BlockTridiagonal S = build_hessian(G, H, q);
    SqrtDetReport r;
    r.dim = static_cast<int>(G.rows());
    r.q = q;
    const RingElement rec = det_recursion(G, H, q);
    const RingElement closed = det_closed_form(G.ldlt().solve(H), q);
    r.recursion_vs_closed = rel_diff(rec.matrix, closed.matrix);

    r.det_dense = S.dense().partialPivLu().determinant();
    const double det_dq = rec.matrix.determinant();
    r.det_ring = std::pow(G.determinant(), q) * det_dq;
    r.dense_vs_ring = std::abs(r.det_dense - r.det_ring) / std::abs(r.det_ring);

    r.sqrt_det_dq = std::sqrt(det_dq);
    r.delta = delta_n(frame_from(G, H), q + 1);
    r.sqrt_vs_delta = std::abs(r.sqrt_det_dq - r.delta) / r.delta;
    r.pass = det_dq > 0.0 && r.recursion_vs_closed <= tol && r.dense_vs_ring <= tol && r.sqrt_vs_delta <= tol;
    return r;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> random_metric_pair(int d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Eigen::MatrixXd A(d, d);
    Eigen::MatrixXd B(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) A(i, j) = g(rng);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) B(i, j) = g(rng);
    return {A.transpose() * A + 0.1 * Eigen::MatrixXd::Identity(d, d), 0.5 * (B - B.transpose())};
}

std::vector<HessianCheckRow> hessian_check(const std::vector<int>& dims, const std::vector<int>& qs, int trials,
                                           std::uint64_t seed, double tol) {
    std::vector<HessianCheckRow> rows;
    for (int d : dims) {
        for (int q : qs) {
            HessianCheckRow row;
            row.dim = d;
            row.q = q;
            row.trials = trials;
            for (int t = 0; t < trials; ++t) {
                const std::uint64_t s = seed ^ (static_cast<std::uint64_t>(d) << 48) ^
                                        (static_cast<std::uint64_t>(q) << 32) ^ static_cast<std::uint64_t>(t);
                const auto [G, H] = random_metric_pair(d, s);
                const SqrtDetReport r = verify_sqrt_det(G, H, q, tol);
                row.worst_recursion = std::max(row.worst_recursion, r.recursion_vs_closed);
                row.worst_dense = std::max(row.worst_dense, r.dense_vs_ring);
                row.worst_sqrt = std::max(row.worst_sqrt, r.sqrt_vs_delta);
                if (!r.pass) ++row.failures;
            }
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace szego
