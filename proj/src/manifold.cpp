#include "szego/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "szego/error.hpp"
#include "szego/expr.hpp"
#include "szego/quadrature_rules.hpp"

namespace szego {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap(double x, double lo, double hi) {
    const double len = hi - lo;
    double y = std::fmod(x - lo, len);
    if (y < 0) y += len;
    return lo + y;
}

Chart box_chart(int dim, const std::vector<std::pair<double, double>>& domain, std::vector<bool> periodic) {
    Chart c;
    c.dim = dim;
    c.lower.resize(dim);
    c.upper.resize(dim);
    for (int j = 0; j < dim; ++j) {
        c.lower[j] = domain[static_cast<std::size_t>(j)].first;
        c.upper[j] = domain[static_cast<std::size_t>(j)].second;
        if (!(c.upper[j] > c.lower[j])) throw InvalidArgument("chart domain must have positive length on every axis");
    }
    c.periodic = std::move(periodic);
    c.raw_weight = [](const Eigen::VectorXd&) { return 1.0; };
    return c;
}

}  // namespace

bool Chart::contains(const Eigen::VectorXd& t) const {
    if (t.size() != dim) return false;
    for (int j = 0; j < dim; ++j) {
        if (periodic[static_cast<std::size_t>(j)]) continue;
        const double slack = 1e-12 * (upper[j] - lower[j]);
        if (t[j] < lower[j] - slack || t[j] > upper[j] + slack) return false;
    }
    return true;
}

double Chart::jacobian_defect(const std::vector<Eigen::VectorXd>& samples, double h) const {
    double worst = 0.0;
    for (const auto& t : samples) {
        const Eigen::MatrixXd J = jacobian(t);
        for (int j = 0; j < dim; ++j) {
            Eigen::VectorXd tp = t;
            Eigen::VectorXd tm = t;
            tp[j] += h;
            tm[j] -= h;
            const Eigen::VectorXd fd = (gamma(tp) - gamma(tm)) / (2.0 * h);
            worst = std::max(worst, (fd - J.col(j)).norm());
        }
    }
    return worst;
}

std::string to_string(SubmanifoldClass c) {
    switch (c) {
        case SubmanifoldClass::Isotropic: return "isotropic";
        case SubmanifoldClass::Coisotropic: return "coisotropic";
        case SubmanifoldClass::Lagrangian: return "lagrangian";
        case SubmanifoldClass::Symplectic: return "symplectic";
        case SubmanifoldClass::Generic: return "generic";
    }
    return "generic";
}

std::optional<SubmanifoldClass> class_from_string(const std::string& s) {
    for (auto c : {SubmanifoldClass::Isotropic, SubmanifoldClass::Coisotropic, SubmanifoldClass::Lagrangian,
                   SubmanifoldClass::Symplectic, SubmanifoldClass::Generic}) {
        if (to_string(c) == s) return c;
    }
    return std::nullopt;
}

ChartedSubmanifold::ChartedSubmanifold(std::string kind, int ambient_dim, std::vector<Chart> charts,
                                       std::optional<SubmanifoldClass> declared)
    : kind_(std::move(kind)), ambient_dim_(ambient_dim), charts_(std::move(charts)), declared_(declared) {
    if (ambient_dim_ < 1) throw InvalidArgument("ambient dimension must be positive");
    if (charts_.empty()) throw InvalidArgument("a submanifold needs at least one chart");
    const int d = charts_.front().dim;
    if (d < 1 || d > 2 * ambient_dim_) throw InvalidArgument("chart dimension must lie in [1, 2N]");
    for (const auto& c : charts_) {
        if (c.dim != d) throw InvalidArgument("all charts must share one dimension");
        if (static_cast<int>(c.periodic.size()) != d || c.lower.size() != d || c.upper.size() != d)
            throw InvalidArgument("chart domain does not match its dimension");
        if (!c.gamma || !c.jacobian) throw InvalidArgument("chart is missing its map or derivative");
    }
}

std::optional<Eigen::VectorXd> ChartedSubmanifold::locate(std::size_t c, const Eigen::VectorXd& x) const {
    const Chart& ch = charts_.at(c);
    const int d = ch.dim;
    const double scale = 1.0 + x.norm();

    // Starts: the center and a 3^d grid of interior points.
    std::vector<Eigen::VectorXd> starts{ch.center()};
    int total = 1;
    for (int j = 0; j < d; ++j) total *= 3;
    for (int idx = 0; idx < total; ++idx) {
        Eigen::VectorXd s(d);
        int rem = idx;
        for (int j = 0; j < d; ++j) {
            const int q = rem % 3;
            rem /= 3;
            s[j] = ch.lower[j] + (q + 0.5) / 3.0 * (ch.upper[j] - ch.lower[j]);
        }
        starts.push_back(s);
    }

    for (Eigen::VectorXd s : starts) {
        for (int iter = 0; iter < 60; ++iter) {
            const Eigen::VectorXd r = ch.gamma(s) - x;
            if (r.norm() < 1e-11 * scale) {
                if (ch.contains(s)) return s;
                break;
            }
            const Eigen::MatrixXd J = ch.jacobian(s);
            const Eigen::VectorXd step = (J.transpose() * J).ldlt().solve(J.transpose() * r);
            if (!step.allFinite()) break;
            s -= step;
            for (int j = 0; j < d; ++j) {
                if (ch.periodic[static_cast<std::size_t>(j)]) {
                    s[j] = wrap(s[j], ch.lower[j], ch.upper[j]);
                } else {
                    const double pad = 1e-9 * (ch.upper[j] - ch.lower[j]);
                    s[j] = std::clamp(s[j], ch.lower[j] - pad, ch.upper[j] + pad);
                }
            }
        }
    }
    return std::nullopt;
}

double ChartedSubmanifold::pou(std::size_t c, const Eigen::VectorXd& t) const {
    if (charts_.size() == 1) return 1.0;
    const double own = charts_.at(c).raw_weight(t);
    if (own <= 0.0) return 0.0;
    const Eigen::VectorXd x = charts_[c].gamma(t);
    double denom = 0.0;
    for (std::size_t o = 0; o < charts_.size(); ++o) {
        if (o == c) {
            denom += own;
            continue;
        }
        if (auto s = locate(o, x)) denom += std::max(0.0, charts_[o].raw_weight(*s));
    }
    return own / denom;
}

double ChartedSubmanifold::partition_defect(
    const std::vector<std::pair<std::size_t, Eigen::VectorXd>>& samples) const {
    double worst = 0.0;
    for (const auto& [c, t] : samples) {
        const Eigen::VectorXd x = charts_.at(c).gamma(t);
        double sum = 0.0;
        bool covered = false;
        for (std::size_t o = 0; o < charts_.size(); ++o) {
            std::optional<Eigen::VectorXd> s = (o == c) ? std::optional<Eigen::VectorXd>(t) : locate(o, x);
            if (!s) continue;
            if (charts_.size() == 1 || charts_[o].raw_weight(*s) > 0.0) covered = true;
            sum += pou(o, *s);
        }
        if (covered) worst = std::max(worst, std::fabs(sum - 1.0));
    }
    return worst;
}

AmbientPoint to_complex(const Eigen::VectorXd& x) {
    const Eigen::Index n = x.size() / 2;
    AmbientPoint z(n);
    for (Eigen::Index j = 0; j < n; ++j) z[j] = Complex(x[2 * j], x[2 * j + 1]);
    return z;
}

GeometryFrame frame_from(const Eigen::MatrixXd& G, const Eigen::MatrixXd& H) {
    const Eigen::Index d = G.rows();
    if (G.cols() != d || H.rows() != d || H.cols() != d) throw DimensionMismatch("G and H must be square of equal size");
    if (!G.allFinite() || !H.allFinite()) throw SingularMetric("metric or symplectic matrix is not finite");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ges(0.5 * (G + G.transpose()));
    const double gmin = ges.eigenvalues().minCoeff();
    const double gmax = ges.eigenvalues().maxCoeff();
    if (!(gmin > 0.0) || gmax / gmin > 1e12) {
        std::ostringstream os;
        os << "metric is singular or ill-conditioned (eigenvalues " << gmin << " .. " << gmax << ")";
        throw SingularMetric(os.str());
    }

    GeometryFrame f;
    f.G = G;
    f.H = H;
    f.W = G.ldlt().solve(H);
    f.vol_density = std::sqrt(ges.eigenvalues().prod());

    const Eigen::MatrixXd Ginvhalf =
        ges.eigenvectors() * ges.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * ges.eigenvectors().transpose();
    const Eigen::MatrixXd A = Ginvhalf * H * Ginvhalf;
    const Eigen::MatrixXcd iA = Complex(0.0, 1.0) * (0.5 * (A - A.transpose())).cast<Complex>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> aes(iA, Eigen::EigenvaluesOnly);
    for (Eigen::Index i = 0; i < d; ++i) {
        const double v = aes.eigenvalues()[i];
        if (v > kLambdaThreshold) f.lambdas.push_back(v);
    }
    std::sort(f.lambdas.begin(), f.lambdas.end());
    f.half_rank = static_cast<int>(f.lambdas.size());
    return f;
}

GeometryFrame frame_at(const Chart& chart, const Eigen::VectorXd& t) {
    const Eigen::MatrixXd J = chart.jacobian(t);
    const Eigen::Index d = J.cols();
    const Eigen::Index n = J.rows() / 2;
    Eigen::MatrixXd G = J.transpose() * J;
    // omega(u, v) = sum_j u_y v_x - u_x v_y in interleaved coordinates.
    Eigen::MatrixXd H(d, d);
    for (Eigen::Index a = 0; a < d; ++a) {
        for (Eigen::Index b = 0; b < d; ++b) {
            double s = 0.0;
            for (Eigen::Index j = 0; j < n; ++j)
                s += J(2 * j + 1, a) * J(2 * j, b) - J(2 * j, a) * J(2 * j + 1, b);
            H(a, b) = s;
        }
    }
    return frame_from(G, H);
}

namespace {

SubmanifoldClass tag_of(const GeometryFrame& f, int ambient_dim) {
    const int d = f.dim();
    const int r = f.half_rank;
    if (r == 0) return d == ambient_dim ? SubmanifoldClass::Lagrangian : SubmanifoldClass::Isotropic;
    if (d == ambient_dim + r) {
        bool unit = std::all_of(f.lambdas.begin(), f.lambdas.end(),
                                [](double l) { return std::fabs(l - 1.0) <= 1e-8; });
        if (unit) return SubmanifoldClass::Coisotropic;
    }
    if (2 * r == d) return SubmanifoldClass::Symplectic;
    return SubmanifoldClass::Generic;
}

}  // namespace

std::vector<std::pair<std::size_t, Eigen::VectorXd>> sample_nodes(const ChartedSubmanifold& sub, int per_axis) {
    std::vector<std::pair<std::size_t, Eigen::VectorXd>> out;
    const Rule1D base = gauss_legendre(per_axis);
    for (std::size_t c = 0; c < sub.charts().size(); ++c) {
        const Chart& ch = sub.chart(c);
        int total = 1;
        for (int j = 0; j < ch.dim; ++j) total *= per_axis;
        for (int idx = 0; idx < total; ++idx) {
            Eigen::VectorXd t(ch.dim);
            int rem = idx;
            for (int j = 0; j < ch.dim; ++j) {
                const double x = base.nodes[static_cast<std::size_t>(rem % per_axis)];
                rem /= per_axis;
                t[j] = ch.lower[j] + 0.5 * (x + 1.0) * (ch.upper[j] - ch.lower[j]);
            }
            out.emplace_back(c, t);
        }
    }
    return out;
}

Classification classify(const ChartedSubmanifold& sub,
                        const std::vector<std::pair<std::size_t, Eigen::VectorXd>>& samples) {
    if (samples.empty()) throw InvalidArgument("classification needs at least one sample node");
    Classification out;
    out.dim = sub.dim();
    out.ambient_dim = sub.ambient_dim();
    out.min_lambda = std::numeric_limits<double>::infinity();
    std::optional<SubmanifoldClass> tag;
    for (const auto& [c, t] : samples) {
        const GeometryFrame f = frame_at(sub.chart(c), t);
        const SubmanifoldClass here = tag_of(f, sub.ambient_dim());
        if (tag && *tag != here) {
            std::ostringstream os;
            os << "classification differs across nodes: " << to_string(*tag) << " vs " << to_string(here);
            throw InconsistentClassification(os.str());
        }
        tag = here;
        out.half_rank_per_node.push_back(f.half_rank);
        out.max_abs_H = std::max(out.max_abs_H, f.H.cwiseAbs().maxCoeff());
        for (double l : f.lambdas) {
            out.max_lambda_defect = std::max(out.max_lambda_defect, std::fabs(l - 1.0));
            out.min_lambda = std::min(out.min_lambda, l);
        }
    }
    out.tag = *tag;
    out.half_rank = out.half_rank_per_node.front();
    if (!std::isfinite(out.min_lambda)) out.min_lambda = 0.0;
    return out;
}

Classification classify(const ChartedSubmanifold& sub) { return classify(sub, sample_nodes(sub)); }

int d_prime(const Classification& c) {
    switch (c.tag) {
        case SubmanifoldClass::Isotropic:
        case SubmanifoldClass::Lagrangian: return c.dim;
        case SubmanifoldClass::Coisotropic: return 2 * c.ambient_dim - c.dim;
        default: break;
    }
    throw NotApplicable("d' is defined only for isotropic or co-isotropic submanifolds (got " + to_string(c.tag) + ")");
}

int d_prime(const ChartedSubmanifold& sub) { return d_prime(classify(sub)); }

double delta_factor(double lambda, int n) {
    if (n < 1) throw InvalidArgument("Delta_n needs n >= 1");
    const double l2 = lambda * lambda;
    double sum = 0.0;
    double binom = n;  // binom(n, 1)
    double pw = 1.0;
    for (int j = 0; 2 * j + 1 <= n; ++j) {
        sum += binom * pw;
        // binom(n, 2j+3) = binom(n, 2j+1) (n-2j-1)(n-2j-2) / ((2j+2)(2j+3))
        binom *= static_cast<double>(n - 2 * j - 1) * (n - 2 * j - 2) / ((2.0 * j + 2.0) * (2.0 * j + 3.0));
        pw *= l2;
    }
    return sum;
}

double delta_n(const GeometryFrame& frame, int n) {
    if (n < 1) throw InvalidArgument("Delta_n needs n >= 1");
    double out = std::pow(static_cast<double>(n), 0.5 * frame.dim() - frame.half_rank);
    for (double l : frame.lambdas) out *= delta_factor(l, n);
    return out;
}

std::vector<QuadNode> quadrature(const ChartedSubmanifold& sub, const QuadratureOptions& opts) {
    if (opts.periodic_points < 1 || opts.gauss_order < 1 || opts.panels < 1)
        throw InvalidArgument("quadrature order must be at least 1");
    std::vector<QuadNode> out;
    for (std::size_t c = 0; c < sub.charts().size(); ++c) {
        const Chart& ch = sub.chart(c);
        std::vector<Rule1D> axes;
        for (int j = 0; j < ch.dim; ++j) {
            if (ch.periodic[static_cast<std::size_t>(j)])
                axes.push_back(periodic_trapezoid(ch.lower[j], ch.upper[j], opts.periodic_points));
            else
                axes.push_back(composite_gauss_legendre(ch.lower[j], ch.upper[j], opts.panels, opts.gauss_order));
        }
        std::vector<std::size_t> idx(static_cast<std::size_t>(ch.dim), 0);
        Eigen::VectorXd t(ch.dim);
        while (true) {
            double w = 1.0;
            for (int j = 0; j < ch.dim; ++j) {
                const auto& ax = axes[static_cast<std::size_t>(j)];
                t[j] = ax.nodes[idx[static_cast<std::size_t>(j)]];
                w *= ax.weights[idx[static_cast<std::size_t>(j)]];
            }
            const double p = sub.pou(c, t);
            if (p > 0.0) {
                const Eigen::MatrixXd J = ch.jacobian(t);
                const double vol = std::sqrt(std::max(0.0, (J.transpose() * J).determinant()));
                QuadNode node;
                node.chart = c;
                node.t = t;
                node.z = to_complex(ch.gamma(t));
                node.weight = w * p * vol;
                out.push_back(std::move(node));
            }
            int j = 0;
            for (; j < ch.dim; ++j) {
                auto& i = idx[static_cast<std::size_t>(j)];
                if (++i < axes[static_cast<std::size_t>(j)].nodes.size()) break;
                i = 0;
            }
            if (j == ch.dim) break;
        }
    }
    if (out.empty()) throw EmptyQuadrature("no quadrature node carries positive weight");
    return out;
}

double total_weight(const std::vector<QuadNode>& nodes) {
    double s = 0.0;
    for (const auto& n : nodes) s += n.weight;
    return s;
}

ChartedSubmanifold circle(double radius) { return torus_product({radius}, 1); }

ChartedSubmanifold torus_product(const std::vector<double>& radii, int ambient_dim) {
    const int d = static_cast<int>(radii.size());
    if (d < 1 || d > ambient_dim) throw InvalidArgument("torus_product needs 1 <= number of radii <= N");
    for (double r : radii)
        if (!(r > 0.0)) throw InvalidArgument("radii must be positive");
    Chart c = box_chart(d, std::vector<std::pair<double, double>>(static_cast<std::size_t>(d), {0.0, kTwoPi}),
                        std::vector<bool>(static_cast<std::size_t>(d), true));
    const int n2 = 2 * ambient_dim;
    c.gamma = [radii, n2](const Eigen::VectorXd& t) {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(n2);
        for (std::size_t j = 0; j < radii.size(); ++j) {
            x[2 * j] = radii[j] * std::cos(t[j]);
            x[2 * j + 1] = radii[j] * std::sin(t[j]);
        }
        return x;
    };
    c.jacobian = [radii, n2](const Eigen::VectorXd& t) {
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n2, static_cast<Eigen::Index>(radii.size()));
        for (std::size_t j = 0; j < radii.size(); ++j) {
            J(2 * j, j) = -radii[j] * std::sin(t[j]);
            J(2 * j + 1, j) = radii[j] * std::cos(t[j]);
        }
        return J;
    };
    return ChartedSubmanifold(d == 1 && ambient_dim == 1 ? "circle" : "torus_product", ambient_dim, {c});
}

ChartedSubmanifold parabola_patch(std::pair<double, double> x1_range, std::pair<double, double> y1_range) {
    Chart c = box_chart(2, {x1_range, y1_range}, {false, false});
    c.gamma = [](const Eigen::VectorXd& t) {
        Eigen::VectorXd x(4);
        x << t[0], t[1], 0.5 * t[0] * t[0], 0.0;
        return x;
    };
    c.jacobian = [](const Eigen::VectorXd& t) {
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(4, 2);
        J(0, 0) = 1.0;
        J(1, 1) = 1.0;
        J(2, 0) = t[0];
        return J;
    };
    return ChartedSubmanifold("parabola_patch", 2, {c});
}

ChartedSubmanifold plane_patch(const std::vector<std::pair<double, double>>& ranges) {
    const int d = static_cast<int>(ranges.size());
    if (d < 2 || d % 2 != 0) throw InvalidArgument("plane_patch needs 2N ranges");
    Chart c = box_chart(d, ranges, std::vector<bool>(static_cast<std::size_t>(d), false));
    c.gamma = [](const Eigen::VectorXd& t) { return Eigen::VectorXd(t); };
    c.jacobian = [d](const Eigen::VectorXd&) { return Eigen::MatrixXd(Eigen::MatrixXd::Identity(d, d)); };
    return ChartedSubmanifold("plane_patch", d / 2, {c});
}

ChartedSubmanifold sphere3(double radius) {
    if (!(radius > 0.0)) throw InvalidArgument("radius must be positive");
    // t = (u, xi1, xi2): z1 = r sqrt(u) e^{i xi1}, z2 = r sqrt(1-u) e^{i xi2}; sqrt det G = r^3 / 2.
    Chart c = box_chart(3, {{0.0, 1.0}, {0.0, kTwoPi}, {0.0, kTwoPi}}, {false, true, true});
    const double r = radius;
    c.gamma = [r](const Eigen::VectorXd& t) {
        const double a = r * std::sqrt(t[0]);
        const double b = r * std::sqrt(1.0 - t[0]);
        Eigen::VectorXd x(4);
        x << a * std::cos(t[1]), a * std::sin(t[1]), b * std::cos(t[2]), b * std::sin(t[2]);
        return x;
    };
    c.jacobian = [r](const Eigen::VectorXd& t) {
        const double su = std::sqrt(t[0]);
        const double sv = std::sqrt(1.0 - t[0]);
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(4, 3);
        J(0, 0) = r / (2.0 * su) * std::cos(t[1]);
        J(1, 0) = r / (2.0 * su) * std::sin(t[1]);
        J(2, 0) = -r / (2.0 * sv) * std::cos(t[2]);
        J(3, 0) = -r / (2.0 * sv) * std::sin(t[2]);
        J(0, 1) = -r * su * std::sin(t[1]);
        J(1, 1) = r * su * std::cos(t[1]);
        J(2, 2) = -r * sv * std::sin(t[2]);
        J(3, 2) = r * sv * std::cos(t[2]);
        return J;
    };
    return ChartedSubmanifold("sphere3", 2, {c});
}

ChartedSubmanifold custom_manifold(int dim, int ambient_dim, const std::vector<CustomChartSpec>& specs,
                                   std::optional<SubmanifoldClass> declared) {
    if (dim < 1 || dim > 2 * ambient_dim) throw InvalidArgument("custom chart dimension must lie in [1, 2N]");
    std::vector<Chart> charts;
    for (const auto& spec : specs) {
        if (static_cast<int>(spec.coords.size()) != 2 * ambient_dim)
            throw InvalidArgument("custom chart needs 2N coordinate expressions");
        if (static_cast<int>(spec.periodic.size()) != dim || static_cast<int>(spec.domain.size()) != dim)
            throw InvalidArgument("custom chart needs one periodic flag and one domain interval per axis");
        Chart c = box_chart(dim, spec.domain, spec.periodic);

        std::vector<Expr> coords;
        std::vector<std::vector<Expr>> derivs;
        for (const auto& text : spec.coords) {
            coords.push_back(parse(text, dim));
            std::vector<Expr> row;
            for (int j = 0; j < dim; ++j) row.push_back(derive(coords.back(), j));
            derivs.push_back(std::move(row));
        }
        c.gamma = [coords](const Eigen::VectorXd& t) {
            Eigen::VectorXd x(static_cast<Eigen::Index>(coords.size()));
            const std::span<const double> pt(t.data(), static_cast<std::size_t>(t.size()));
            for (std::size_t i = 0; i < coords.size(); ++i) x[static_cast<Eigen::Index>(i)] = eval(coords[i], pt);
            return x;
        };
        c.jacobian = [derivs, dim](const Eigen::VectorXd& t) {
            Eigen::MatrixXd J(static_cast<Eigen::Index>(derivs.size()), dim);
            const std::span<const double> pt(t.data(), static_cast<std::size_t>(t.size()));
            for (std::size_t i = 0; i < derivs.size(); ++i)
                for (int j = 0; j < dim; ++j)
                    J(static_cast<Eigen::Index>(i), j) = eval(derivs[i][static_cast<std::size_t>(j)], pt);
            return J;
        };
        Expr weight;
        if (spec.weight) {
            weight = parse(*spec.weight, dim);
        } else {
            std::ostringstream os;
            os.precision(17);
            os << "1";
            for (int j = 0; j < dim; ++j) {
                if (spec.periodic[static_cast<std::size_t>(j)]) continue;
                os << "*bump(t" << (j + 1) << "," << spec.domain[static_cast<std::size_t>(j)].first << ","
                   << spec.domain[static_cast<std::size_t>(j)].second << ")";
            }
            weight = parse(os.str(), dim);
        }
        c.raw_weight = [weight](const Eigen::VectorXd& t) {
            return eval(weight, std::span<const double>(t.data(), static_cast<std::size_t>(t.size())));
        };
        charts.push_back(std::move(c));
    }
    return ChartedSubmanifold("custom", ambient_dim, std::move(charts), declared);
}

namespace {

using nlohmann::json;

const json& require(const json& j, const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("manifold spec is missing \"") + key + "\"");
    return j.at(key);
}

double number_of(const json& j, const char* key) {
    const json& v = require(j, key);
    if (!v.is_number()) throw ConfigError(std::string("\"") + key + "\" must be a number");
    return v.get<double>();
}

std::pair<double, double> range_of(const json& v, const std::string& what) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw ConfigError(what + " must be a [lo, hi] pair of numbers");
    return {v[0].get<double>(), v[1].get<double>()};
}

std::vector<std::pair<double, double>> ranges_of(const json& v, const std::string& what) {
    if (!v.is_array()) throw ConfigError(what + " must be a list of [lo, hi] pairs");
    std::vector<std::pair<double, double>> out;
    for (const auto& e : v) out.push_back(range_of(e, what + " entry"));
    return out;
}

CustomChartSpec chart_spec_of(const json& j) {
    CustomChartSpec s;
    const json& coords = require(j, "coords");
    if (!coords.is_array()) throw ConfigError("\"coords\" must be a list of expressions");
    for (const auto& e : coords) {
        if (!e.is_string()) throw ConfigError("\"coords\" entries must be strings");
        s.coords.push_back(e.get<std::string>());
    }
    const json& periodic = require(j, "periodic");
    if (!periodic.is_array()) throw ConfigError("\"periodic\" must be a list of booleans");
    for (const auto& e : periodic) {
        if (!e.is_boolean()) throw ConfigError("\"periodic\" entries must be booleans");
        s.periodic.push_back(e.get<bool>());
    }
    s.domain = ranges_of(require(j, "domain"), "\"domain\"");
    if (j.contains("weight")) {
        if (!j["weight"].is_string()) throw ConfigError("\"weight\" must be an expression string");
        s.weight = j["weight"].get<std::string>();
    }
    return s;
}

}  // namespace

ChartedSubmanifold manifold_from_json(const json& spec) {
    if (!spec.is_object()) throw ConfigError("manifold spec must be a JSON object");
    const json& kind_v = require(spec, "kind");
    if (!kind_v.is_string()) throw ConfigError("\"kind\" must be a string");
    const std::string kind = kind_v.get<std::string>();
    try {
        if (kind == "circle") return circle(number_of(spec, "radius"));
        if (kind == "sphere3") return sphere3(number_of(spec, "radius"));
        if (kind == "torus_product") {
            const json& radii = require(spec, "radii");
            if (!radii.is_array()) throw ConfigError("\"radii\" must be a list of numbers");
            std::vector<double> rs;
            for (const auto& r : radii) {
                if (!r.is_number()) throw ConfigError("\"radii\" entries must be numbers");
                rs.push_back(r.get<double>());
            }
            const int n = spec.contains("ambient_dim") ? static_cast<int>(number_of(spec, "ambient_dim"))
                                                       : static_cast<int>(rs.size());
            return torus_product(rs, n);
        }
        if (kind == "parabola_patch")
            return parabola_patch(range_of(require(spec, "x1_range"), "\"x1_range\""),
                                  range_of(require(spec, "y1_range"), "\"y1_range\""));
        if (kind == "plane_patch") return plane_patch(ranges_of(require(spec, "ranges"), "\"ranges\""));
        if (kind == "custom") {
            const int d = static_cast<int>(number_of(spec, "dim"));
            const int n = static_cast<int>(number_of(spec, "ambient_dim"));
            std::vector<CustomChartSpec> charts;
            if (spec.contains("charts")) {
                if (!spec["charts"].is_array()) throw ConfigError("\"charts\" must be a list");
                for (const auto& c : spec["charts"]) charts.push_back(chart_spec_of(c));
            } else {
                charts.push_back(chart_spec_of(spec));
            }
            std::optional<SubmanifoldClass> declared;
            if (spec.contains("declared_class")) {
                if (!spec["declared_class"].is_string()) throw ConfigError("\"declared_class\" must be a string");
                declared = class_from_string(spec["declared_class"].get<std::string>());
                if (!declared) throw ConfigError("unknown declared_class");
            }
            return custom_manifold(d, n, charts, declared);
        }
    } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("invalid manifold spec: ") + e.what());
    }
    throw ConfigError("unknown manifold kind \"" + kind + "\"");
}

}  // namespace szego
