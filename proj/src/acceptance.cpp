#include "szego/acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <sstream>

#include "szego/asymptotics.hpp"
#include "szego/hessian.hpp"
#include "szego/lagrangian.hpp"
#include "szego/manifold.hpp"
#include "szego/operators.hpp"
#include "szego/spectral.hpp"

namespace szego {

namespace {

using std::numbers::pi;

const std::vector<double> kSweep{25, 50, 100, 200};

Verdict verdict(std::string id, double observed, double predicted, double tol, bool pass, std::string detail) {
    return {std::move(id), observed, predicted, tol, pass, std::move(detail)};
}

std::string list(const std::vector<double>& v) {
    std::ostringstream os;
    os.precision(4);
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
    return os.str();
}

bool strictly_decreasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1])) return false;
    return true;
}

struct Run {
    ChartedSubmanifold sub;
    std::vector<QuadNode> nodes;
    std::vector<Complex> a;
    HermitianOperator T;
    QuadratureOptions quad;
};

Run assemble(const ChartedSubmanifold& sub, const Amplitude& a, double k, int M, const QuadratureOptions& q) {
    std::vector<QuadNode> nodes = quadrature(sub, q);
    std::vector<Complex> av = evaluate(a, nodes);
    FockTruncation trunc(sub.ambient_dim(), k, M);
    HermitianOperator T = assemble_T(trunc, sub, a, nodes);
    return {sub, std::move(nodes), std::move(av), std::move(T), q};
}

Run assemble_default(const ChartedSubmanifold& sub, const Amplitude& a, double k) {
    const std::vector<QuadNode> coarse = quadrature(sub, {});
    const double R = support_radius(coarse, evaluate(a, coarse));
    const int M = default_max_degree(k, R);
    return assemble(sub, a, k, M, default_quadrature(sub, k, R, M));
}

/// Unit circle with a = 1, cached by k since several criteria share it.
const Run& unit_circle(double k) {
    static std::map<double, std::unique_ptr<Run>> cache;
    auto it = cache.find(k);
    if (it == cache.end()) it = cache.emplace(k, std::make_unique<Run>(assemble_default(circle(1.0), Amplitude::constant(1.0), k))).first;
    return *it->second;
}

const SpectralSummary& unit_circle_spectrum(double k) {
    static std::map<double, std::unique_ptr<SpectralSummary>> cache;
    auto it = cache.find(k);
    if (it == cache.end()) it = cache.emplace(k, std::make_unique<SpectralSummary>(eigensolve(unit_circle(k).T, 1))).first;
    return *it->second;
}

std::vector<double> scaled(const std::vector<double>& v, double f) {
    std::vector<double> out = v;
    for (double& x : out) x *= f;
    return out;
}

double log_poisson(double k, int n) { return -k + n * std::log(k) - std::lgamma(n + 1.0); }

// --- criteria ---

Verdict circle_spectrum() {
    double worst = 0.0;
    std::size_t compared = 0;
    for (double k : {10.0, 20.0, 40.0}) {
        const int M = static_cast<int>(4 * k);
        const auto sub = circle(1.0);
        const Run run = assemble(sub, Amplitude::constant(1.0), k, M, default_quadrature(sub, k, 1.0, M));
        const SpectralSummary spec = eigensolve(run.T, 1);
        std::vector<double> oracle;
        for (int n = 0; n <= M; ++n) oracle.push_back(std::exp(std::log(2 * k) + n * std::log(k) - k - std::lgamma(n + 1.0)));
        std::sort(oracle.rbegin(), oracle.rend());
        for (std::size_t i = 0; i < spec.eigenvalues.size(); ++i) {
            if (spec.eigenvalues[i] < 1e-10 * spec.max()) continue;
            worst = std::max(worst, std::abs(spec.eigenvalues[i] - oracle[i]) / oracle[i]);
            ++compared;
        }
    }
    return verdict("circle_spectrum", worst, 0.0, 1e-6, worst <= 1e-6,
                   std::to_string(compared) + " eigenvalues compared, k in {10,20,40}, M = 4k");
}

Verdict trace_identity() {
    const double k = 20;
    const auto& c = unit_circle(k);
    const double circle_gap = std::abs(c.T.matrix.trace().real() - 2 * k) / (2 * k);

    const double kt = 6;
    const Run torus = assemble_default(torus_product({1.0, 0.7}, 2), Amplitude::constant(1.0), kt);
    const double torus_pred = std::pow(kt / pi, 2) * 4 * pi * pi * 0.7;
    const double torus_gap = std::abs(torus.T.matrix.trace().real() - torus_pred) / torus_pred;

    const double ks = 4;
    const Run sphere = assemble_default(sphere3(1.0), Amplitude::constant(1.0), ks);
    const double sphere_pred = std::pow(ks / pi, 2) * 2 * pi * pi;
    const double sphere_gap = std::abs(sphere.T.matrix.trace().real() - sphere_pred) / sphere_pred;

    const bool pass = circle_gap <= 1e-8 && torus_gap <= 1e-6 && sphere_gap <= 1e-6;
    std::ostringstream os;
    os << "circle " << circle_gap << " (tol 1e-8), torus " << torus_gap << ", sphere3 " << sphere_gap << " (tol 1e-6)";
    return verdict("trace_identity", std::max({circle_gap / 1e-8, torus_gap / 1e-6, sphere_gap / 1e-6}), 0.0, 1.0,
                   pass, os.str() + "; observed is the worst gap in units of its tolerance");
}

Verdict pair_trace() {
    const double k = 20;
    const auto& c = unit_circle(k);
    const Amplitude b = Amplitude::parse_real("1 + cos(t1)", 1);
    const HermitianOperator Tb = assemble_T(c.T.trunc, c.sub, b, c.nodes);
    const Complex from_matrices = c.T.matrix.cwiseProduct(Tb.matrix.transpose()).sum();
    const Complex integral = pair_trace_integral(k, 1, c.nodes, c.a, evaluate(b, c.nodes));
    const double gap = std::abs(from_matrices - integral) / std::abs(integral);
    std::ostringstream os;
    os << "relative gap " << gap << " at k = 20";
    return verdict("pair_trace", from_matrices.real(), integral.real(), 1e-6, gap <= 1e-6, os.str());
}

Verdict moment_asymptotics() {
    double worst = 0.0;
    double worst_slope = -1.0;
    std::ostringstream os;
    for (int n : {2, 3, 4}) {
        std::vector<double> values;
        for (double k : kSweep) {
            const auto& spec = unit_circle_spectrum(k);
            const double f = s_factor(1, 1, 1, k);
            double tr = 0.0;
            for (double mu : clamped(spec.eigenvalues)) tr += std::pow(f * mu, n);
            values.push_back(szego_scale(1, 1, k) * tr);
        }
        const RateFit fit = rate_regression(kSweep, values, 2 * pi / std::sqrt(n));
        os << "n=" << n << " slope " << fit.slope << "; ";
        if (std::abs(fit.slope + 1) >= worst) {
            worst = std::abs(fit.slope + 1);
            worst_slope = fit.slope;
        }
    }
    return verdict("moment_asymptotics", worst_slope, -1.0, 0.25, worst <= 0.25, os.str() + "k in {25,50,100,200}");
}

Verdict szego_entropy_function() {
    const TestFunction phi = TestFunction::entropy();
    std::vector<double> errors;
    double last_emp = 0.0;
    double F = 0.0;
    for (double k : kSweep) {
        const auto& run = unit_circle(k);
        const auto& spec = unit_circle_spectrum(k);
        F = szego_functional(run.sub, run.nodes, run.a, phi).value;
        SpectralSummary s = spec;
        s.eigenvalues = scaled(spec.eigenvalues, s_factor(1, 1, 1, k));
        last_emp = szego_scale(1, 1, k) * trace_phi(s, phi);
        errors.push_back(std::abs(last_emp - F) / std::abs(F));
    }
    const bool pass = strictly_decreasing(errors) && errors.back() <= 0.02;
    return verdict("szego_s_log_s", last_emp, F, 0.02, pass, "relative errors over k in {25,50,100,200}: " + list(errors));
}

Verdict weyl_counts() {
    const std::vector<double> ks{25, 50, 100, 200, 400};
    const double pred = weyl_prediction(2 * pi, 1, 0.2, 0.9);
    std::vector<double> errors;
    double last = 0.0;
    for (double k : ks) {
        SpectralSummary s = unit_circle_spectrum(k);
        s.eigenvalues = scaled(s.eigenvalues, s_factor(1, 1, 1, k));
        last = szego_scale(1, 1, k) * static_cast<double>(weyl_count(s, 0.2, 0.9));
        errors.push_back(std::abs(last - pred) / pred);
    }
    const bool monotone = strictly_decreasing(errors);
    const bool pass = errors.back() <= 0.05 && monotone;
    return verdict("weyl_counts", last, pred, 0.05, pass,
                   "relative errors over k in {25,50,100,200,400}: " + list(errors) +
                       (monotone ? "" : " (not monotone: integer counts oscillate)"));
}

Verdict schatten() {
    const Amplitude a = Amplitude::parse_complex("cos(t1)*(1+cos(t1))/2", "sin(t1)*(1+cos(t1))/2", 1);
    double worst = 0.0;
    double obs = 0.0;
    double pred = 0.0;
    std::ostringstream os;
    for (double p : {1.0, 2.0}) {
        std::vector<double> errors;
        for (double k : kSweep) {
            const Run run = assemble_default(circle(1.0), a, k);
            const HermitianOperator S = scale_to_S(run.T, 1);
            const double emp = szego_scale(1, 1, k) * schatten_sum(S, p);
            const double target = schatten_prediction(run.sub, run.nodes, run.a, p);
            errors.push_back(std::abs(emp - target) / target);
            if (k == kSweep.back() && errors.back() >= worst) {
                worst = errors.back();
                obs = emp;
                pred = target;
            }
        }
        os << "p=" << p << ": " << list(errors) << "; ";
    }
    return verdict("schatten", obs, pred, 0.02, worst <= 0.02, "relative errors over k in {25,50,100,200}, " + os.str());
}

Verdict entropy_limit() {
    const auto sub = circle(1.0);
    const Amplitude a = Amplitude::constant(1.0 / (2 * pi));
    std::vector<double> gaps;
    double worst_poisson = 0.0;
    double pred = 0.0;
    double last = 0.0;
    for (double k : kSweep) {
        const auto& base = unit_circle(k);
        const std::vector<Complex> av = evaluate(a, base.nodes);
        const HermitianOperator T = assemble_T(base.T.trunc, sub, a, base.nodes);
        const SpectralSummary spec = eigensolve(T, 1);
        const double H = entropy(scaled(spec.eigenvalues, pi / k));

        double poisson = 0.0;
        const int nmax = static_cast<int>(k + 40 * std::sqrt(k) + 50);
        for (int n = 0; n <= nmax; ++n) {
            const double lp = log_poisson(k, n);
            poisson -= std::exp(lp) * lp;
        }
        worst_poisson = std::max(worst_poisson, std::abs(H - poisson));

        const EntropyPrediction ep = entropy_prediction(sub, base.nodes, av);
        pred = ep.value;
        last = H + std::log(ep.c_d / std::sqrt(k));
        gaps.push_back(std::abs(last - pred));
    }
    const bool pass = worst_poisson <= 1e-8 && strictly_decreasing(gaps) && gaps.back() <= 1e-2;
    std::ostringstream os;
    os << "Poisson entropy agreement " << worst_poisson << " (tol 1e-8); gaps over k in {25,50,100,200}: " << list(gaps);
    return verdict("entropy", last, pred, 1e-2, pass, os.str());
}

Verdict norm_scaling() {
    std::vector<double> circle_max;
    for (double k : kSweep) circle_max.push_back(unit_circle_spectrum(k).max());
    const RateFit c = rate_regression(kSweep, circle_max, 0.0);

    const std::vector<double> ks{4, 8, 16, 32};
    std::vector<double> sphere_max;
    for (double k : ks) {
        // The operator is diagonal in the monomial basis, so a truncation just past the
        // spectral peak (near |n| = k) leaves the top eigenvalue unchanged.
        const int M = static_cast<int>(k) + 8;
        QuadratureOptions q;
        q.panels = 1;
        q.gauss_order = M / 2 + 2;
        q.periodic_points = M + 2;
        const Run run = assemble(sphere3(1.0), Amplitude::constant(1.0), k, M, q);
        sphere_max.push_back(eigensolve(run.T, 1).max());
    }
    const RateFit s = rate_regression(ks, sphere_max, 0.0);
    const double worst = std::max(std::abs(c.slope - 0.5), std::abs(s.slope - 0.5));
    std::ostringstream os;
    os << "circle slope " << c.slope << " over k in {25,50,100,200}; sphere3 slope " << s.slope
       << " over k in {4,8,16,32}";
    return verdict("norm_scaling", std::abs(c.slope - 0.5) >= std::abs(s.slope - 0.5) ? c.slope : s.slope, 0.5, 0.05,
                   worst <= 0.05, os.str());
}

Verdict hessian_oracle() {
    double worst = 0.0;
    int failures = 0;
    for (int i = 0; i < 200; ++i) {
        const int d = 1 + i % 4;
        const int q = 1 + (i / 4) % 6;
        const auto [G, H] = random_metric_pair(d, 0x5eed0000ULL + static_cast<std::uint64_t>(i));
        const SqrtDetReport r = verify_sqrt_det(G, H, q);
        worst = std::max({worst, r.recursion_vs_closed, r.dense_vs_ring, r.sqrt_vs_delta});
        if (!r.pass) ++failures;
    }
    const auto parabola = parabola_patch({-2, 2}, {-1, 1});
    double worst_parabola = 0.0;
    for (double x1 : {0.0, 1.0}) {
        Eigen::VectorXd t(2);
        t << x1, 0.0;
        const GeometryFrame f = frame_at(parabola.chart(0), t);
        for (int n = 1; n <= 8; ++n) {
            double eig_form = std::pow(static_cast<double>(n), 0.5 * f.dim() - f.half_rank);
            for (double l : f.lambdas) eig_form *= (std::pow(1 + l, n) - std::pow(1 - l, n)) / (2 * l);
            worst_parabola = std::max(worst_parabola, std::abs(delta_n(f, n) - eig_form) / eig_form);
            if (n >= 2) {
                const double ring = std::sqrt(det_recursion(f.G, f.H, n - 1).matrix.determinant());
                worst_parabola = std::max(worst_parabola, std::abs(ring - eig_form) / eig_form);
            }
        }
    }
    const bool pass = failures == 0 && worst <= 1e-8 && worst_parabola <= 1e-12;
    std::ostringstream os;
    os << "200 random instances, " << failures << " failures; parabola Delta_n worst " << worst_parabola;
    return verdict("hessian_oracle", std::max(worst, worst_parabola), 0.0, 1e-8, pass, os.str());
}

Verdict mellin_identity() {
    double worst = 0.0;
    int cases = 0;
    for (double alpha : {0.5, 1.0, 1.5, 2.0})
        for (double p : {0.5, 1.0, 2.0, 3.0})
            for (double t : {0.5, 1.0, 2.0}) {
                const double got = mellin_log(TestFunction::power(p), alpha, t);
                const double want = std::pow(t, p) / std::pow(p, alpha);
                worst = std::max(worst, std::abs(got - want) / want);
                ++cases;
            }
    return verdict("mellin_identity", worst, 0.0, 1e-8, worst <= 1e-8, std::to_string(cases) + " cases");
}

Verdict rayleigh_bound() {
    const auto sub = circle(1.0);
    const BohrSommerfeldData bs = circle_bohr_sommerfeld(1.0, "1/sqrt(2*pi)");
    double worst_margin = 1e300;
    bool pass = true;
    std::ostringstream os;
    for (double k : kSweep) {
        const auto& run = unit_circle(k);
        const Eigen::VectorXcd psi = build_test_state(run.T.trunc, sub, bs, run.nodes);
        const double q = rayleigh_lower_bound(run.T, psi);
        const double ratio = q / std::sqrt(2 * k / pi);
        const double lmax = unit_circle_spectrum(k).max();
        const bool ok = ratio >= 1 - 5 / k && ratio <= 1 && q <= lmax * (1 + 1e-10);
        pass = pass && ok;
        worst_margin = std::min(worst_margin, std::min(ratio - (1 - 5 / k), 1 - ratio));
        os << "k=" << k << " ratio " << ratio << "; ";
    }
    return verdict("rayleigh_lower_bound", worst_margin, 0.0, 0.0, pass,
                   os.str() + "observed is the smallest distance to the band [1 - 5/k, 1]");
}

Verdict parabola_moment() {
    const auto sub = parabola_patch({-1, 1}, {-1, 1});
    const Amplitude a = Amplitude::parse_real("bump(t1,-1,1)*bump(t2,-1,1)", 2);
    std::vector<double> errors;
    double emp = 0.0;
    double pred = 0.0;
    for (double k : {50.0, 100.0, 200.0}) {
        const std::vector<QuadNode> nodes = quadrature(sub, default_quadrature(sub, k, 0.0, 0));
        const std::vector<Complex> av = evaluate(a, nodes);
        emp = pair_trace_integral(k, 2, nodes, av, av).real();
        pred = moment_prediction(sub, nodes, {av, av}, k);
        errors.push_back(std::abs(emp - pred) / pred);
    }
    const bool pass = strictly_decreasing(errors) && errors.back() <= 0.05;
    return verdict("parabola_moment", emp, pred, 0.05, pass, "relative errors over k in {50,100,200}: " + list(errors));
}

}  // namespace

nlohmann::ordered_json to_json(const Verdict& v) {
    return {{"check_id", v.check_id}, {"observed", v.observed}, {"predicted", v.predicted},
            {"tolerance", v.tolerance}, {"pass", v.pass}};
}

const std::vector<AcceptanceCheck>& acceptance_checks() {
    static const std::vector<AcceptanceCheck> checks{
        {"circle_spectrum", "circle eigenvalues against the Poisson closed form", circle_spectrum},
        {"trace_identity", "matrix trace against (k/pi)^N |Gamma|", trace_identity},
        {"pair_trace", "Tr(T_a T_b) against the Gaussian double integral", pair_trace},
        {"moment_asymptotics", "Tr S^n convergence rate on the circle", moment_asymptotics},
        {"szego_s_log_s", "Szego limit for s log s", szego_entropy_function},
        {"weyl_counts", "Weyl counts on [0.2, 0.9]", weyl_counts},
        {"schatten", "Schatten sums of a complex amplitude", schatten},
        {"entropy", "entropy of the coherent mixed state", entropy_limit},
        {"norm_scaling", "growth of the top eigenvalue", norm_scaling},
        {"hessian_oracle", "block Hessian determinant identities", hessian_oracle},
        {"mellin_identity", "O_{-alpha} on powers", mellin_identity},
        {"rayleigh_lower_bound", "Bohr-Sommerfeld Rayleigh quotient", rayleigh_bound},
        {"parabola_moment", "second moment on the parabola", parabola_moment},
    };
    return checks;
}

std::vector<Verdict> run_acceptance(const std::vector<std::string>& only,
                                    const std::function<void(const Verdict&)>& report) {
    std::vector<Verdict> out;
    for (const auto& c : acceptance_checks()) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v = verdict(c.id, std::nan(""), std::nan(""), 0.0, false, std::string("error: ") + e.what());
        }
        if (report) report(v);
        out.push_back(std::move(v));
    }
    return out;
}

}  // namespace szego
