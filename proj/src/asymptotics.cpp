#include "szego/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>

#include "szego/error.hpp"
#include "szego/quadrature_rules.hpp"

namespace szego {

namespace {

const Rule1D& laguerre_rule(int nodes, double a) {
    static std::mutex mu;
    static std::map<std::pair<int, double>, Rule1D> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({nodes, a});
    if (it == cache.end()) it = cache.emplace(std::make_pair(nodes, a), gauss_laguerre(nodes, a)).first;
    return it->second;
}

double real_amplitude(const Complex& a) {
    if (a.imag() != 0.0) throw InvalidArgument("this prediction needs a real amplitude");
    return a.real();
}

}  // namespace

double mellin_log(const TestFunction& phi, double alpha, double t, int nodes) {
    if (!(phi.exponent > 0.0)) throw InvalidArgument("test function exponent must be positive for O_{-alpha} to converge");
    if (alpha < 0.0) throw InvalidArgument("alpha must be non-negative");
    if (alpha == 0.0) return phi(t);
    if (t <= 0.0) return 0.0;
    // s = t e^{-x}, x = y / p: (p^{-alpha}/Gamma(alpha)) int [phi(t e^{-y/p}) e^y] y^{alpha-1} e^{-y} dy
    const double p = phi.exponent;
    const Rule1D& rule = laguerre_rule(nodes, alpha - 1.0);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double y = rule.nodes[i];
        const double s = t * std::exp(-y / p);
        const double f = phi(s);
        if (f == 0.0) continue;
        sum += rule.weights[i] * f * std::exp(y);
    }
    return sum * std::pow(p, -alpha) / std::tgamma(alpha);
}

double szego_scale(int d_prime, int dim, double k) {
    return std::pow(2.0, 0.5 * d_prime) * std::pow(std::numbers::pi / k, 0.5 * dim);
}

SzegoPrediction szego_functional(int d_prime, int dim, const std::vector<QuadNode>& nodes,
                                 const std::vector<Complex>& a_values, const TestFunction& phi) {
    if (a_values.size() != nodes.size()) throw DimensionMismatch("amplitude values must match the quadrature");
    SzegoPrediction out;
    out.d_prime = d_prime;
    out.dim = dim;
    const double alpha = 0.5 * d_prime;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double a = real_amplitude(a_values[i]);
        if (a < 0.0) throw InvalidArgument("the Szego functional needs a non-negative amplitude");
        if (a == 0.0) continue;
        out.value += nodes[i].weight * mellin_log(phi, alpha, a);
    }
    return out;
}

SzegoPrediction szego_functional(const ChartedSubmanifold& sub, const std::vector<QuadNode>& nodes,
                                 const std::vector<Complex>& a_values, const TestFunction& phi) {
    return szego_functional(d_prime(sub), sub.dim(), nodes, a_values, phi);
}

double limiting_density(int d_prime, const std::vector<QuadNode>& nodes, const std::vector<Complex>& a_values,
                        double s) {
    if (d_prime <= 0) throw NotApplicable("the limiting density needs d' > 0");
    if (!(s > 0.0)) throw InvalidArgument("density is evaluated at s > 0");
    const double e = 0.5 * d_prime - 1.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double a = real_amplitude(a_values[i]);
        if (a < s - 1e-12) continue;
        const double l = std::log(std::max(a, s) / s);
        if (e == 0.0) {
            sum += nodes[i].weight;
        } else if (l > 0.0) {
            sum += nodes[i].weight * std::pow(l, e);
        } else if (e > 0.0) {
            continue;
        }
    }
    return sum / (std::tgamma(0.5 * d_prime) * s);
}

double weyl_prediction(double volume, int d_prime, double lo, double hi) {
    if (!(0.0 < lo && lo <= hi && hi <= 1.0)) throw InvalidArgument("Weyl interval must satisfy 0 < lo <= hi <= 1");
    const double h = 0.5 * d_prime;
    return volume / std::tgamma(1.0 + h) * (std::pow(-std::log(lo), h) - std::pow(-std::log(hi), h));
}

double weyl_prediction(int d_prime, const std::vector<QuadNode>& nodes, const std::vector<Complex>& a_values,
                       double lo, double hi) {
    if (!(0.0 < lo && lo <= hi)) throw InvalidArgument("Weyl interval must satisfy 0 < lo <= hi");
    if (d_prime <= 0) throw NotApplicable("Weyl predictions need d' > 0");
    if (a_values.size() != nodes.size()) throw DimensionMismatch("amplitude values must match the quadrature");
    const double h = 0.5 * d_prime;
    auto part = [h](double a, double s) { return a > s ? std::pow(std::log(a / s), h) : 0.0; };
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double a = real_amplitude(a_values[i]);
        sum += nodes[i].weight * (part(a, lo) - part(a, hi));
    }
    return sum / std::tgamma(1.0 + h);
}

double moment_prediction(const ChartedSubmanifold& sub, const std::vector<QuadNode>& nodes,
                         const std::vector<std::vector<Complex>>& amplitudes, double k) {
    const int n = static_cast<int>(amplitudes.size());
    if (n < 1) throw InvalidArgument("moment prediction needs at least one amplitude");
    for (const auto& a : amplitudes)
        if (a.size() != nodes.size()) throw DimensionMismatch("amplitude values must match the quadrature");
    const int N = sub.ambient_dim();
    const int d = sub.dim();
    double integral = 0.0;
    for (std::size_t q = 0; q < nodes.size(); ++q) {
        double prod = 1.0;
        for (const auto& a : amplitudes) prod *= real_amplitude(a[q]);
        if (prod == 0.0) continue;
        const GeometryFrame f = frame_at(sub.chart(nodes[q].chart), nodes[q].t);
        integral += nodes[q].weight * prod / delta_n(f, n);
    }
    const double pre = std::pow(2.0, 0.5 * d) * std::pow(k / std::numbers::pi, N - 0.5 * d);
    return std::pow(pre, n) * std::pow(k / (2.0 * std::numbers::pi), 0.5 * d) * integral;
}

double schatten_prediction(const ChartedSubmanifold& sub, const std::vector<QuadNode>& nodes,
                           const std::vector<Complex>& a_values, double p) {
    if (!(p > 0.0)) throw InvalidArgument("Schatten exponent must be positive");
    const int dp = d_prime(sub);
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += nodes[i].weight * std::pow(std::abs(a_values[i]), p);
    return sum / std::pow(p, 0.5 * dp);
}

EntropyPrediction entropy_prediction(const ChartedSubmanifold& sub, const std::vector<QuadNode>& nodes,
                                     const std::vector<Complex>& a_values) {
    const int dp = d_prime(sub);
    if (dp <= 0) throw NotApplicable("the entropy limit needs d' > 0");
    double total = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) total += nodes[i].weight * real_amplitude(a_values[i]);
    if (std::abs(total - 1.0) > 1e-8) {
        std::ostringstream os;
        os << "amplitude integrates to " << total << ", expected 1";
        throw NormalizationError(os.str());
    }
    EntropyPrediction out;
    out.value = -szego_functional(dp, sub.dim(), nodes, a_values, TestFunction::entropy()).value;
    out.c_d = std::pow(2.0, 0.5 * dp) * std::pow(std::numbers::pi, 0.5 * sub.dim());
    return out;
}

DensityCurve density_curve(int d_prime, const std::vector<QuadNode>& nodes, const std::vector<Complex>& a_values,
                           int samples, double jump_ratio) {
    if (samples < 2) throw InvalidArgument("density curve needs at least two samples");
    double amax = 0.0;
    for (const auto& a : a_values) amax = std::max(amax, real_amplitude(a));
    if (!(amax > 0.0)) throw InvalidArgument("density curve needs a positive amplitude somewhere");
    DensityCurve c;
    for (int i = 1; i <= samples; ++i) {
        const double s = amax * i / (samples + 1.0);
        c.s.push_back(s);
        c.density.push_back(limiting_density(d_prime, nodes, a_values, s));
    }
    for (std::size_t i = 1; i < c.density.size(); ++i) {
        const double a = c.density[i - 1];
        const double b = c.density[i];
        if (std::abs(b - a) > jump_ratio * std::max(std::abs(a), std::abs(b))) c.jumps.push_back(i);
    }
    return c;
}

void write_density_csv(std::ostream& os, const DensityCurve& curve, const Provenance& prov) {
    os << "s,density,k,N,d,d_prime,M,quad_order\n";
    for (std::size_t i = 0; i < curve.s.size(); ++i) {
        os << format_double(curve.s[i]) << ',' << format_double(curve.density[i]) << ',' << format_double(prov.k)
           << ',' << prov.ambient_dim << ',' << prov.dim << ',' << prov.d_prime << ',' << prov.max_degree << ','
           << prov.quad_order << '\n';
    }
}

void write_density_svg(std::ostream& os, const std::vector<std::pair<std::string, DensityCurve>>& curves) {
    constexpr double width = 640;
    constexpr double height = 400;
    constexpr double margin = 50;
    double smax = 0.0;
    double dmax = 0.0;
    for (const auto& [name, c] : curves) {
        for (double s : c.s) smax = std::max(smax, s);
        for (double d : c.density)
            if (std::isfinite(d)) dmax = std::max(dmax, d);
    }
    if (smax <= 0.0) smax = 1.0;
    if (dmax <= 0.0) dmax = 1.0;
    auto px = [&](double s) { return margin + (width - 2 * margin) * s / smax; };
    auto py = [&](double d) { return height - margin - (height - 2 * margin) * std::min(d, dmax) / dmax; };

    static const char* colours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    os << std::setprecision(6);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin << "\" y2=\""
       << height - margin << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\"" << height - margin
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"" << height - 12 << "\" text-anchor=\"middle\">s (max "
       << smax << ")</text>\n";
    os << "<text x=\"14\" y=\"" << height / 2 << "\" transform=\"rotate(-90 14 " << height / 2
       << ")\" text-anchor=\"middle\">density (max " << dmax << ")</text>\n";
    std::size_t idx = 0;
    for (const auto& [name, c] : curves) {
        const char* colour = colours[idx % 5];
        os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < c.s.size(); ++i) {
            if (!std::isfinite(c.density[i])) continue;
            os << px(c.s[i]) << ',' << py(c.density[i]) << ' ';
        }
        os << "\"/>\n";
        os << "<text x=\"" << width - margin - 150 << "\" y=\"" << margin + 18 * idx << "\" fill=\"" << colour
           << "\">" << name << "</text>\n";
        ++idx;
    }
    os << "</svg>\n";
}

}  // namespace szego
