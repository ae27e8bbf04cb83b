#include "szego/operators.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "szego/error.hpp"

namespace szego {

namespace {

constexpr std::size_t kChunk = 1024;

}  // namespace

std::string to_string(Normalization n) { return n == Normalization::RawT ? "raw_T" : "scaled_S"; }

double support_radius(const std::vector<QuadNode>& nodes, const std::vector<Complex>& a_values) {
    double r = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (a_values[i] != Complex(0.0)) r = std::max(r, nodes[i].z.norm());
    return r;
}

int default_max_degree(double k, double support_radius) {
    return std::max(1, static_cast<int>(std::ceil(4.0 * k * support_radius * support_radius)));
}

QuadratureOptions default_quadrature(const ChartedSubmanifold& sub, double k, double support_radius,
                                     int max_degree) {
    QuadratureOptions o;
    const double sk = std::ceil(std::sqrt(k));
    o.periodic_points = std::max({64, static_cast<int>(std::ceil(8.0 * sk * support_radius)), max_degree + 2});
    double longest = 0.0;
    for (const auto& c : sub.charts())
        for (int j = 0; j < c.dim; ++j)
            if (!c.periodic[static_cast<std::size_t>(j)]) longest = std::max(longest, c.upper[j] - c.lower[j]);
    o.panels = std::max(4, static_cast<int>(std::ceil(longest * std::sqrt(k))));
    o.gauss_order = 8;
    return o;
}

HermitianOperator assemble_T(const FockTruncation& trunc, const ChartedSubmanifold& sub, const Amplitude& a,
                             const std::vector<QuadNode>& nodes) {
    if (trunc.ambient_dim() != sub.ambient_dim())
        throw DimensionMismatch("truncation and submanifold disagree on the ambient dimension");
    if (trunc.size() > kMaxBasis) {
        std::ostringstream os;
        os << "basis of " << trunc.size() << " monomials exceeds the dense limit " << kMaxBasis
           << "; lower --max-degree or k";
        throw CostLimit(os.str());
    }
    const auto dim = static_cast<Eigen::Index>(trunc.size());
    Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(dim, dim);
    const std::vector<Complex> av = evaluate(a, nodes);
    Complex integral = 0.0;

    Eigen::MatrixXcd E;
    Eigen::MatrixXcd B;
    for (std::size_t start = 0; start < nodes.size(); start += kChunk) {
        const std::size_t stop = std::min(nodes.size(), start + kChunk);
        std::size_t rows = 0;
        for (std::size_t q = start; q < stop; ++q)
            if (av[q] != Complex(0.0) && nodes[q].weight != 0.0) ++rows;
        if (rows == 0) continue;
        E.resize(static_cast<Eigen::Index>(rows), dim);
        B.resize(static_cast<Eigen::Index>(rows), dim);
        Eigen::Index r = 0;
        for (std::size_t q = start; q < stop; ++q) {
            const Complex wa = nodes[q].weight * av[q];
            if (wa == Complex(0.0)) continue;
            integral += wa;
            E.row(r) = eval_basis_all(trunc, nodes[q].z).transpose();
            B.row(r) = wa * E.row(r);
            ++r;
        }
        T.noalias() += E.adjoint() * B;
    }

    HermitianOperator op(std::move(T), trunc);
    op.dim = sub.dim();
    op.amplitude_integral = integral;
    op.hermitian = a.is_real();
    if (op.hermitian) op.matrix = 0.5 * (op.matrix + op.matrix.adjoint()).eval();

    double total = 0.0;
    double top = 0.0;
    for (Eigen::Index i = 0; i < dim; ++i) {
        const double v = std::abs(op.matrix(i, i));
        total += v;
        if (total_degree(trunc.index(static_cast<std::size_t>(i))) == trunc.max_degree()) top += v;
    }
    op.boundary_fraction = total > 0.0 ? top / total : 0.0;
    op.truncation_warning = op.boundary_fraction > kTruncationWarning;
    return op;
}

double s_factor(int ambient_dim, int dim, int d_prime, double k) {
    return std::pow(2.0, -0.5 * d_prime) * std::pow(std::numbers::pi / k, ambient_dim - 0.5 * dim);
}

HermitianOperator scale_to_S(const HermitianOperator& op, int d_prime) {
    if (op.normalization != Normalization::RawT) throw DoubleScaling("operator is already scaled");
    HermitianOperator out = op;
    const double f = s_factor(op.trunc.ambient_dim(), op.dim, d_prime, op.trunc.k());
    out.matrix *= f;
    out.factor = op.factor * f;
    out.normalization = Normalization::ScaledS;
    return out;
}

Complex covariant_symbol(const FockTruncation& trunc, const std::vector<QuadNode>& nodes,
                         const std::vector<Complex>& a_values, const AmbientPoint& z) {
    const double k = trunc.k();
    Complex s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double d2 = (nodes[i].z - z).squaredNorm();
        s += nodes[i].weight * a_values[i] * std::exp(-k * d2);
    }
    return std::pow(k / std::numbers::pi, trunc.ambient_dim()) * s;
}

TraceCheck exact_trace(const HermitianOperator& op) {
    if (op.normalization != Normalization::RawT) throw InvalidArgument("trace identity is stated for the raw T");
    TraceCheck c;
    c.trace = op.matrix.trace();
    c.prediction = std::pow(op.trunc.k() / std::numbers::pi, op.trunc.ambient_dim()) * op.amplitude_integral;
    const double scale = std::abs(c.prediction);
    c.relative_gap = scale > 0.0 ? std::abs(c.trace - c.prediction) / scale : std::abs(c.trace);
    return c;
}

Complex pair_trace_integral(double k, int ambient_dim, const std::vector<QuadNode>& nodes,
                            const std::vector<Complex>& a_values, const std::vector<Complex>& b_values) {
    if (a_values.size() != nodes.size() || b_values.size() != nodes.size())
        throw DimensionMismatch("amplitude values must match the quadrature");
    // e^{-k|z-w|^2} < e^{-36} beyond this distance; bucket the nodes on a grid of that size.
    const double cutoff2 = 36.0 / k;
    const double cell = std::sqrt(cutoff2);
    const int n2 = 2 * ambient_dim;

    std::map<std::vector<long>, std::vector<std::size_t>> grid;
    auto key_of = [&](const AmbientPoint& z) {
        std::vector<long> key(static_cast<std::size_t>(n2));
        for (int j = 0; j < ambient_dim; ++j) {
            key[static_cast<std::size_t>(2 * j)] = static_cast<long>(std::floor(z[j].real() / cell));
            key[static_cast<std::size_t>(2 * j + 1)] = static_cast<long>(std::floor(z[j].imag() / cell));
        }
        return key;
    };
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (b_values[i] != Complex(0.0)) grid[key_of(nodes[i].z)].push_back(i);

    int neighbours = 1;
    for (int j = 0; j < n2; ++j) neighbours *= 3;

    std::map<std::vector<long>, std::vector<std::size_t>> sources;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (a_values[i] != Complex(0.0)) sources[key_of(nodes[i].z)].push_back(i);

    Complex total = 0.0;
    std::vector<long> nb(static_cast<std::size_t>(n2));
    for (const auto& [key, members] : sources) {
        Complex cell_sum = 0.0;
        for (int code = 0; code < neighbours; ++code) {
            int rem = code;
            for (int j = 0; j < n2; ++j) {
                nb[static_cast<std::size_t>(j)] = key[static_cast<std::size_t>(j)] + (rem % 3) - 1;
                rem /= 3;
            }
            auto it = grid.find(nb);
            if (it == grid.end()) continue;
            for (std::size_t i : members) {
                Complex row = 0.0;
                for (std::size_t j : it->second) {
                    const double d2 = (nodes[i].z - nodes[j].z).squaredNorm();
                    if (d2 > cutoff2) continue;
                    row += nodes[j].weight * b_values[j] * std::exp(-k * d2);
                }
                cell_sum += nodes[i].weight * a_values[i] * row;
            }
        }
        total += cell_sum;
    }
    return std::pow(k / std::numbers::pi, 2 * ambient_dim) * total;
}

Complex nfold_trace_integral(double k, int ambient_dim, const std::vector<QuadNode>& nodes,
                             const std::vector<std::vector<Complex>>& amplitudes, double budget) {
    const std::size_t n = amplitudes.size();
    if (n < 1) throw InvalidArgument("n-fold trace needs at least one amplitude");
    for (const auto& a : amplitudes)
        if (a.size() != nodes.size()) throw DimensionMismatch("amplitude values must match the quadrature");
    const double m = static_cast<double>(nodes.size());
    const double cost = std::pow(m, static_cast<double>(n));
    if (cost > budget) {
        std::ostringstream os;
        os << "n-fold trace integral would need " << cost << " node tuples (budget " << budget << ")";
        throw CostLimit(os.str());
    }
    if (nodes.size() > 6000) throw CostLimit("n-fold trace integral needs a dense kernel matrix; too many nodes");

    const FockTruncation trunc(ambient_dim, k, 0);
    const auto mm = static_cast<Eigen::Index>(nodes.size());
    Eigen::MatrixXcd K(mm, mm);
    for (Eigen::Index i = 0; i < mm; ++i)
        for (Eigen::Index j = 0; j < mm; ++j)
            K(i, j) = reproducing_kernel(trunc, nodes[static_cast<std::size_t>(i)].z, nodes[static_cast<std::size_t>(j)].z);

    // Tr(D_1 K D_2 K ... D_n K) with D_i = diag(w a_i).
    auto weights = [&](std::size_t i) {
        Eigen::VectorXcd d(mm);
        for (Eigen::Index q = 0; q < mm; ++q)
            d[q] = nodes[static_cast<std::size_t>(q)].weight * amplitudes[i][static_cast<std::size_t>(q)];
        return d;
    };
    Eigen::MatrixXcd P = weights(0).asDiagonal() * K;
    for (std::size_t i = 1; i < n; ++i) {
        const Eigen::MatrixXcd DK = weights(i).asDiagonal() * K;
        P = (P * DK).eval();
    }
    return P.trace();
}

Complex eval_polynomial(const Polynomial& h, const AmbientPoint& z) {
    Complex s = 0.0;
    for (const auto& t : h) {
        Complex v = t.coeff;
        for (Eigen::Index j = 0; j < z.size(); ++j) {
            v *= std::pow(z[j], t.alpha[static_cast<std::size_t>(j)]) *
                 std::pow(std::conj(z[j]), t.beta[static_cast<std::size_t>(j)]);
        }
        s += v;
    }
    return s;
}

Eigen::MatrixXcd toeplitz_polynomial_matrix(const FockTruncation& trunc, const Polynomial& h) {
    const int N = trunc.ambient_dim();
    const double k = trunc.k();
    const double lpi = std::log(std::numbers::pi);
    const double lk = std::log(k);
    auto log_norm = [&](const MultiIndex& n) {
        double s = N * lpi - (total_degree(n) + N) * lk;
        for (int v : n) s += std::lgamma(v + 1.0);
        return 0.5 * s;
    };
    const auto dim = static_cast<Eigen::Index>(trunc.size());
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto& term : h) {
        if (static_cast<int>(term.alpha.size()) != N || static_cast<int>(term.beta.size()) != N)
            throw DimensionMismatch("polynomial exponents must have N entries");
        for (std::size_t col = 0; col < trunc.size(); ++col) {
            const MultiIndex& n = trunc.index(col);
            MultiIndex m(static_cast<std::size_t>(N));
            bool ok = true;
            for (int j = 0; j < N; ++j) {
                const auto ju = static_cast<std::size_t>(j);
                m[ju] = n[ju] + term.alpha[ju] - term.beta[ju];
                if (m[ju] < 0) ok = false;
            }
            if (!ok) continue;
            const auto row = trunc.position(m);
            if (!row) continue;
            // int z^{alpha+n} conj(z)^{beta+m} e^{-k|z|^2} = pi^N prod (alpha+n)! / k^{|alpha+n|+N}
            double lv = N * lpi;
            int deg = 0;
            for (int j = 0; j < N; ++j) {
                const int e = term.alpha[static_cast<std::size_t>(j)] + n[static_cast<std::size_t>(j)];
                lv += std::lgamma(e + 1.0);
                deg += e;
            }
            lv -= (deg + N) * lk;
            lv -= log_norm(n) + log_norm(m);
            out(static_cast<Eigen::Index>(*row), static_cast<Eigen::Index>(col)) += term.coeff * std::exp(lv);
        }
    }
    return out;
}

MixedTrace mixed_trace_polynomial_H(const HermitianOperator& t_a, const Polynomial& h,
                                    const std::vector<QuadNode>& nodes, const std::vector<Complex>& a_values) {
    if (t_a.normalization != Normalization::RawT) throw InvalidArgument("mixed trace expects the raw T");
    if (a_values.size() != nodes.size()) throw DimensionMismatch("amplitude values must match the quadrature");
    const Eigen::MatrixXcd th = toeplitz_polynomial_matrix(t_a.trunc, h);
    MixedTrace out;
    out.trace = th.cwiseProduct(t_a.matrix.transpose()).sum();
    Complex integral = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        integral += nodes[i].weight * eval_polynomial(h, nodes[i].z) * a_values[i];
    out.prediction = std::pow(t_a.trunc.k() / std::numbers::pi, t_a.trunc.ambient_dim()) * integral;
    const double scale = std::abs(out.prediction);
    out.relative_gap = scale > 0.0 ? std::abs(out.trace - out.prediction) / scale : std::abs(out.trace);
    return out;
}

namespace {

template <typename T>
void put_le(std::ostream& os, T v) {
    std::array<unsigned char, sizeof(T)> bytes{};
    std::memcpy(bytes.data(), &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    os.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
    std::array<unsigned char, sizeof(T)> bytes{};
    is.read(reinterpret_cast<char*>(bytes.data()), sizeof(T));
    if (!is) throw InvalidArgument("matrix file is truncated");
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    T v;
    std::memcpy(&v, bytes.data(), sizeof(T));
    return v;
}

}  // namespace

void write_matrix_binary(const HermitianOperator& op, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InvalidArgument("cannot open " + path + " for writing");
    const auto dim = static_cast<std::uint32_t>(op.matrix.rows());
    put_le<std::uint32_t>(os, dim);
    put_le<std::uint16_t>(os, static_cast<std::uint16_t>(op.trunc.ambient_dim()));
    put_le<std::uint16_t>(os, static_cast<std::uint16_t>(std::min(op.trunc.max_degree(), 0xFFFF)));
    put_le<double>(os, op.trunc.k());
    for (Eigen::Index i = 0; i < op.matrix.rows(); ++i) {
        for (Eigen::Index j = 0; j < op.matrix.cols(); ++j) {
            put_le<double>(os, op.matrix(i, j).real());
            put_le<double>(os, op.matrix(i, j).imag());
        }
    }
}

BinaryMatrix read_matrix_binary(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InvalidArgument("cannot open " + path);
    BinaryMatrix m;
    m.dim = get_le<std::uint32_t>(is);
    m.ambient_dim = get_le<std::uint16_t>(is);
    m.max_degree = get_le<std::uint16_t>(is);
    m.k = get_le<double>(is);
    const auto n = static_cast<Eigen::Index>(m.dim);
    m.matrix.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double re = get_le<double>(is);
            const double im = get_le<double>(is);
            m.matrix(i, j) = Complex(re, im);
        }
    }
    return m;
}

}  // namespace szego
