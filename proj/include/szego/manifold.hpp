#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "szego/fock.hpp"

namespace szego {

/**
 A parametrization gamma: box in R^d -> R^{2N}.

 Ambient vectors are interleaved as (x_1, y_1, ..., x_N, y_N) with z_j = x_j + i y_j.
 Periodic axes are integrated with the trapezoid rule, the others with composite
 Gauss-Legendre.
 */
struct Chart {
    int dim = 0;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
    std::vector<bool> periodic;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gamma;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jacobian;  // 2N x d, columns gamma_j
    /// Unnormalized partition-of-unity weight; only consulted when charts overlap.
    std::function<double(const Eigen::VectorXd&)> raw_weight;

    Eigen::VectorXd center() const { return 0.5 * (lower + upper); }
    bool contains(const Eigen::VectorXd& t) const;

    /// Largest deviation ||(gamma(t+h e_j) - gamma(t-h e_j))/2h - gamma_j(t)|| over the samples.
    double jacobian_defect(const std::vector<Eigen::VectorXd>& samples, double h = 1e-5) const;
};

enum class SubmanifoldClass { Isotropic, Coisotropic, Lagrangian, Symplectic, Generic };

std::string to_string(SubmanifoldClass c);
std::optional<SubmanifoldClass> class_from_string(const std::string& s);

class ChartedSubmanifold {
public:
    ChartedSubmanifold(std::string kind, int ambient_dim, std::vector<Chart> charts,
                       std::optional<SubmanifoldClass> declared = std::nullopt);

    const std::string& kind() const noexcept { return kind_; }
    int ambient_dim() const noexcept { return ambient_dim_; }
    int dim() const noexcept { return charts_.front().dim; }
    const std::vector<Chart>& charts() const noexcept { return charts_; }
    const Chart& chart(std::size_t i) const { return charts_.at(i); }
    std::optional<SubmanifoldClass> declared_class() const noexcept { return declared_; }

    /// Parameters of the ambient point x in chart c, if x lies in that chart.
    std::optional<Eigen::VectorXd> locate(std::size_t c, const Eigen::VectorXd& x) const;

    /// Normalized partition-of-unity factor of chart c at its parameter t.
    double pou(std::size_t c, const Eigen::VectorXd& t) const;

    /// Largest |sum_c pou_c - 1| over sample points (chart, t) covered by some weight.
    double partition_defect(const std::vector<std::pair<std::size_t, Eigen::VectorXd>>& samples) const;

private:
    std::string kind_;
    int ambient_dim_;
    std::vector<Chart> charts_;
    std::optional<SubmanifoldClass> declared_;
};

/// Interleaved real vector -> complex coordinates.
AmbientPoint to_complex(const Eigen::VectorXd& x);

/// Metric and symplectic data of one tangent space, in the basis {gamma_j(t)}.
struct GeometryFrame {
    Eigen::MatrixXd G;               // gamma_i . gamma_j
    Eigen::MatrixXd H;               // omega(gamma_i, gamma_j)
    Eigen::MatrixXd W;               // G^{-1} H, the matrix of K = Pi o J
    std::vector<double> lambdas;     // positive, ascending: eig(W) = {+-i lambda} u {0}
    int half_rank = 0;
    double vol_density = 0.0;        // sqrt(det G)

    int dim() const { return static_cast<int>(G.rows()); }
};

/// Eigenvalues below this count as zero (kernel of K).
inline constexpr double kLambdaThreshold = 1e-8;

GeometryFrame frame_at(const Chart& chart, const Eigen::VectorXd& t);

/// Frame built directly from a metric and a skew matrix (used by the Hessian oracle).
GeometryFrame frame_from(const Eigen::MatrixXd& G, const Eigen::MatrixXd& H);

struct Classification {
    SubmanifoldClass tag = SubmanifoldClass::Generic;
    int dim = 0;
    int ambient_dim = 0;
    int half_rank = 0;               // r (constant across samples when the tag is consistent)
    double max_abs_H = 0.0;          // isotropy witness
    double max_lambda_defect = 0.0;  // max |lambda - 1|, co-isotropy witness
    double min_lambda = 0.0;         // symplectic witness (0 when r = 0)
    std::vector<int> half_rank_per_node;
};

/// Default classification samples: interior Gauss points of every chart.
std::vector<std::pair<std::size_t, Eigen::VectorXd>> sample_nodes(const ChartedSubmanifold& sub, int per_axis = 4);

Classification classify(const ChartedSubmanifold& sub,
                        const std::vector<std::pair<std::size_t, Eigen::VectorXd>>& samples);
Classification classify(const ChartedSubmanifold& sub);

/// d' = d for isotropic, 2N - d for co-isotropic submanifolds.
int d_prime(const Classification& c);
int d_prime(const ChartedSubmanifold& sub);

/// n^{d/2-r} prod_l [(1+lambda_l)^n - (1-lambda_l)^n] / (2 lambda_l), evaluated through the
/// positive series sum_j binom(n, 2j+1) lambda^{2j} so small lambda is harmless.
double delta_n(const GeometryFrame& frame, int n);

/// (1+lambda)^n - (1-lambda)^n over 2 lambda, with the limit n at lambda = 0.
double delta_factor(double lambda, int n);

struct QuadNode {
    std::size_t chart = 0;
    Eigen::VectorXd t;
    AmbientPoint z;
    double weight = 0.0;  // axis weights * pou * sqrt(det G)
};

struct QuadratureOptions {
    int periodic_points = 64;  // trapezoid points per periodic axis
    int gauss_order = 8;       // Gauss-Legendre points per panel
    int panels = 4;            // panels per non-periodic axis
};

std::vector<QuadNode> quadrature(const ChartedSubmanifold& sub, const QuadratureOptions& opts);

/// Sum of weights, i.e. the measure of the region covered by the quadrature.
double total_weight(const std::vector<QuadNode>& nodes);

// --- catalog ---

ChartedSubmanifold circle(double radius);
ChartedSubmanifold torus_product(const std::vector<double>& radii, int ambient_dim);
ChartedSubmanifold parabola_patch(std::pair<double, double> x1_range, std::pair<double, double> y1_range);
ChartedSubmanifold plane_patch(const std::vector<std::pair<double, double>>& ranges);
ChartedSubmanifold sphere3(double radius);

struct CustomChartSpec {
    std::vector<std::string> coords;  // 2N expressions in t1..td
    std::vector<bool> periodic;
    std::vector<std::pair<double, double>> domain;
    std::optional<std::string> weight;  // defaults to a product of bumps over non-periodic axes
};

ChartedSubmanifold custom_manifold(int dim, int ambient_dim, const std::vector<CustomChartSpec>& charts,
                                   std::optional<SubmanifoldClass> declared = std::nullopt);

/// Builds a submanifold from the manifold spec JSON ({"kind": "circle", ...}).
ChartedSubmanifold manifold_from_json(const nlohmann::json& spec);

}  // namespace szego
