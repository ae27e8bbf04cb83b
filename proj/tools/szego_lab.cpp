#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "szego/acceptance.hpp"
#include "szego/asymptotics.hpp"
#include "szego/error.hpp"
#include "szego/hessian.hpp"
#include "szego/lagrangian.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;
using namespace szego;

namespace {

constexpr int kExitFailed = 1;
constexpr int kExitConfig = 2;

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<ordered_json>> rows;
};

std::string cell(const ordered_json& v) {
    if (v.is_number_float()) return format_double(v.get<double>());
    if (v.is_string()) return v.get<std::string>();
    if (v.is_null()) return "";
    return v.dump();
}

void write_csv(std::ostream& os, const Table& t) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell(row[i]);
        os << '\n';
    }
}

ordered_json rows_json(const Table& t) {
    ordered_json arr = ordered_json::array();
    for (const auto& row : t.rows) {
        ordered_json o;
        for (std::size_t i = 0; i < row.size(); ++i) o[t.columns[i]] = row[i];
        arr.push_back(std::move(o));
    }
    return arr;
}

struct Cli {
    std::string config;
    std::string manifold;
    std::string amplitude;
    std::string amplitude_im;
    std::vector<double> ks;
    int max_degree = -1;
    int quad_order = -1;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string out;
    std::string format = "csv";
    std::string svg;
    std::vector<std::string> functions;
    std::vector<double> interval;
    std::vector<double> schatten_p;
    bool scaled = false;
    bool export_matrix = false;
    bool normalize = false;
    int samples = 200;
    std::vector<int> hd{1, 2, 3, 4};
    std::vector<int> hq{1, 2, 3, 4, 5, 6};
    int trials = 20;
    std::string theta;
    std::string alpha = "1";
    std::vector<std::string> only;
};

struct Experiment {
    std::optional<ChartedSubmanifold> sub;
    std::optional<Amplitude> amplitude;
    std::vector<double> ks;
    std::optional<int> max_degree;
    std::optional<int> quad_order;
    std::vector<TestFunction> functions;
    std::vector<std::pair<double, double>> intervals;
    std::vector<double> schatten_p;
    std::uint64_t seed = 0;
    std::string out;
    std::string format = "csv";
    std::string svg;

    const ChartedSubmanifold& manifold() const {
        if (!sub) throw ConfigError("this subcommand needs a manifold (--manifold or \"manifold\" in --config)");
        return *sub;
    }
    const std::vector<double>& sweep() const {
        if (ks.empty()) throw ConfigError("this subcommand needs k values (--k or \"k\" / \"k_sweep\" in --config)");
        return ks;
    }
};

json read_json_arg(const std::string& text) {
    try {
        if (fs::is_regular_file(text)) {
            std::ifstream in(text);
            return json::parse(in);
        }
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
}

TestFunction function_from_string(const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    auto num = [&](std::size_t i) {
        try {
            return std::stod(parts.at(i));
        } catch (const std::exception&) {
            throw ConfigError("bad test function \"" + s + "\"");
        }
    };
    if (parts.empty()) throw ConfigError("empty test function");
    if (parts[0] == "entropy" && parts.size() == 1) return TestFunction::entropy();
    if (parts[0] == "power" && parts.size() == 2) return TestFunction::power(num(1));
    if (parts[0] == "trapezoid" && parts.size() == 5) return TestFunction::trapezoid(num(1), num(2), num(3), num(4));
    throw ConfigError("unknown test function \"" + s + "\" (entropy, power:n, trapezoid:l1:l2:m1:m2)");
}

TestFunction function_from_json(const json& j) {
    if (j.is_string()) return function_from_string(j.get<std::string>());
    if (j.is_object() && j.size() == 1) {
        if (j.contains("power") && j["power"].is_number()) return TestFunction::power(j["power"].get<double>());
        if (j.contains("trapezoid") && j["trapezoid"].is_array() && j["trapezoid"].size() == 4) {
            const auto v = j["trapezoid"].get<std::vector<double>>();
            return TestFunction::trapezoid(v[0], v[1], v[2], v[3]);
        }
    }
    throw ConfigError("test function must be \"entropy\", {\"power\": n} or {\"trapezoid\": [l1, l2, m1, m2]}");
}

template <class T>
T field(const json& cfg, const char* key, const char* what) {
    try {
        return cfg.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("config field \"") + key + "\" must be " + what);
    }
}

Experiment load(const Cli& cli) {
    static const std::vector<std::string> known{"manifold", "amplitude", "k", "k_sweep", "max_degree",
                                                "quad_order", "test_functions", "weyl_intervals",
                                                "schatten_p", "seed", "out", "format", "svg"};
    json cfg = json::object();
    if (!cli.config.empty()) {
        if (!fs::is_regular_file(cli.config)) throw ConfigError("config file not found: " + cli.config);
        cfg = read_json_arg(cli.config);
        if (!cfg.is_object()) throw ConfigError("config must be a JSON object");
        for (const auto& [key, value] : cfg.items())
            if (std::find(known.begin(), known.end(), key) == known.end())
                throw ConfigError("unknown config field \"" + key + "\"");
    }

    Experiment e;
    json manifold;
    if (!cli.manifold.empty()) manifold = read_json_arg(cli.manifold);
    else if (cfg.contains("manifold")) manifold = cfg["manifold"];
    if (!manifold.is_null()) e.sub = manifold_from_json(manifold);

    if (!cli.ks.empty()) {
        e.ks = cli.ks;
    } else if (cfg.contains("k")) {
        e.ks = field<std::vector<double>>(cfg, "k", "a list of numbers");
    } else if (cfg.contains("k_sweep")) {
        const json& s = cfg["k_sweep"];
        if (!s.is_object() || !s.contains("start") || !s.contains("ratio") || !s.contains("count"))
            throw ConfigError("k_sweep needs start, ratio and count");
        const double start = field<double>(s, "start", "a number");
        const double ratio = field<double>(s, "ratio", "a number");
        const int count = field<int>(s, "count", "an integer");
        if (!(start > 0) || !(ratio > 0) || count < 1) throw ConfigError("k_sweep needs positive start, ratio and count");
        for (int i = 0; i < count; ++i) e.ks.push_back(start * std::pow(ratio, i));
    }
    for (double k : e.ks)
        if (!(k > 0)) throw ConfigError("k values must be positive");

    if (cli.max_degree >= 0) e.max_degree = cli.max_degree;
    else if (cfg.contains("max_degree")) e.max_degree = field<int>(cfg, "max_degree", "an integer");
    if (cli.quad_order > 0) e.quad_order = cli.quad_order;
    else if (cfg.contains("quad_order")) e.quad_order = field<int>(cfg, "quad_order", "an integer");
    if (e.max_degree && *e.max_degree < 0) throw ConfigError("max_degree must be non-negative");
    if (e.quad_order && *e.quad_order < 1) throw ConfigError("quad_order must be positive");

    std::string re = "1";
    std::optional<std::string> im;
    if (!cli.amplitude.empty()) {
        re = cli.amplitude;
        if (!cli.amplitude_im.empty()) im = cli.amplitude_im;
    } else if (cfg.contains("amplitude")) {
        const json& a = cfg["amplitude"];
        if (a.is_string()) {
            re = a.get<std::string>();
        } else if (a.is_object() && a.contains("re") && a.contains("im")) {
            re = field<std::string>(a, "re", "a string");
            im = field<std::string>(a, "im", "a string");
        } else {
            throw ConfigError("amplitude must be a string or {\"re\": ..., \"im\": ...}");
        }
    }
    if (e.sub) {
        try {
            e.amplitude = im ? Amplitude::parse_complex(re, *im, e.sub->dim()) : Amplitude::parse_real(re, e.sub->dim());
        } catch (const Error& err) {
            throw ConfigError(std::string("amplitude: ") + err.what());
        }
    }

    if (!cli.functions.empty()) {
        for (const auto& f : cli.functions) e.functions.push_back(function_from_string(f));
    } else if (cfg.contains("test_functions")) {
        if (!cfg["test_functions"].is_array()) throw ConfigError("test_functions must be a list");
        for (const auto& f : cfg["test_functions"]) e.functions.push_back(function_from_json(f));
    } else {
        e.functions = {TestFunction::power(2), TestFunction::power(3), TestFunction::entropy()};
    }

    if (!cli.interval.empty()) {
        if (cli.interval.size() != 2) throw ConfigError("--interval takes lo,hi");
        e.intervals.emplace_back(cli.interval[0], cli.interval[1]);
    } else if (cfg.contains("weyl_intervals")) {
        for (const auto& v : field<std::vector<std::vector<double>>>(cfg, "weyl_intervals", "a list of [lo, hi]")) {
            if (v.size() != 2) throw ConfigError("weyl_intervals entries must be [lo, hi]");
            e.intervals.emplace_back(v[0], v[1]);
        }
    } else {
        e.intervals.emplace_back(0.2, 0.9);
    }
    for (const auto& [lo, hi] : e.intervals)
        if (!(0 < lo && lo <= hi)) throw ConfigError("Weyl intervals need 0 < lo <= hi");

    if (!cli.schatten_p.empty()) e.schatten_p = cli.schatten_p;
    else if (cfg.contains("schatten_p")) e.schatten_p = field<std::vector<double>>(cfg, "schatten_p", "a list of numbers");
    else e.schatten_p = {1.0, 2.0};

    if (cli.seed_given) e.seed = cli.seed;
    else if (cfg.contains("seed")) e.seed = field<std::uint64_t>(cfg, "seed", "a non-negative integer");
    e.out = !cli.out.empty() ? cli.out : cfg.value("out", std::string());
    e.format = cli.format;
    if (cli.format == "csv" && cfg.contains("format")) e.format = field<std::string>(cfg, "format", "csv or json");
    if (e.format != "csv" && e.format != "json") throw ConfigError("format must be csv or json");
    e.svg = !cli.svg.empty() ? cli.svg : cfg.value("svg", std::string());
    return e;
}

unsigned thread_cap() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("SZEGO_LAB_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1) throw ConfigError("SZEGO_LAB_THREADS must be a positive integer");
        n = std::min(n, static_cast<unsigned>(v));
    }
    return n;
}

/// Runs f over the sweep on a small pool; results come back in sweep order.
template <class F>
auto sweep(const std::vector<double>& ks, F f) {
    using R = decltype(f(0.0));
    std::vector<std::optional<R>> out(ks.size());
    std::vector<std::exception_ptr> errors(ks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < ks.size();) {
            try {
                out[i] = f(ks[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t n = std::min<std::size_t>(thread_cap(), ks.size());
    std::vector<std::thread> pool;
    for (std::size_t i = 1; i < n; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    std::vector<R> results;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        if (errors[i]) std::rethrow_exception(errors[i]);
        results.push_back(std::move(*out[i]));
    }
    return results;
}

struct Built {
    HermitianOperator T;
    std::vector<QuadNode> nodes;
    std::vector<Complex> a;
    std::string quad_label;
    int max_degree = 0;
};

Built build(const Experiment& e, double k) {
    const auto& sub = e.manifold();
    const std::vector<QuadNode> coarse = quadrature(sub, {});
    const double R = support_radius(coarse, evaluate(*e.amplitude, coarse));
    const int M = e.max_degree ? *e.max_degree : default_max_degree(k, R);
    QuadratureOptions q = default_quadrature(sub, k, R, M);
    if (e.quad_order) q.gauss_order = *e.quad_order;
    std::vector<QuadNode> nodes = quadrature(sub, q);
    std::vector<Complex> a = evaluate(*e.amplitude, nodes);
    HermitianOperator T = assemble_T(FockTruncation(sub.ambient_dim(), k, M), sub, *e.amplitude, nodes);
    if (T.truncation_warning)
        std::cerr << "warning: k=" << format_double(k) << ": degree-" << M << " basis elements carry "
                  << format_double(T.boundary_fraction) << " of the trace; raise --max-degree\n";
    std::ostringstream label;
    label << 'p' << q.periodic_points << 'g' << q.gauss_order << 'x' << q.panels;
    return {std::move(T), std::move(nodes), std::move(a), label.str(), M};
}

std::vector<ordered_json> provenance(double k, const ChartedSubmanifold& sub, int dp, int M, const std::string& quad) {
    return {k, sub.ambient_dim(), sub.dim(), dp, M, quad};
}

const std::vector<std::string> kProvenanceColumns{"k", "N", "d", "d_prime", "M", "quad_order"};

std::vector<std::string> with_provenance(std::vector<std::string> cols) {
    cols.insert(cols.end(), kProvenanceColumns.begin(), kProvenanceColumns.end());
    return cols;
}

void append(std::vector<ordered_json>& row, const std::vector<ordered_json>& more) {
    row.insert(row.end(), more.begin(), more.end());
}

/// Tables go to <out>/<name>.<format>, or to stdout when no directory is given.
void emit(const Experiment& e, const std::string& command, const std::vector<Table>& tables,
          const ordered_json& extra = ordered_json::object()) {
    if (!e.out.empty()) fs::create_directories(e.out);
    if (e.format == "json") {
        ordered_json doc;
        doc["command"] = command;
        for (const auto& [key, value] : extra.items()) doc[key] = value;
        for (const auto& t : tables) doc[t.name] = rows_json(t);
        if (e.out.empty()) {
            std::cout << doc.dump(2) << '\n';
        } else {
            std::ofstream f(fs::path(e.out) / (command + ".json"));
            f << doc.dump(2) << '\n';
        }
        return;
    }
    bool first = true;
    for (const auto& t : tables) {
        if (e.out.empty()) {
            if (!first) std::cout << '\n';
            write_csv(std::cout, t);
        } else {
            std::ofstream f(fs::path(e.out) / (t.name + ".csv"));
            write_csv(f, t);
        }
        first = false;
    }
}

std::ostream& summary(const Experiment& e) { return e.out.empty() ? std::cerr : std::cout; }

// --- subcommands ---

int cmd_geometry(const Experiment& e) {
    const auto& sub = e.manifold();
    const auto samples = sample_nodes(sub);
    const Classification c = classify(sub, samples);
    std::optional<int> dp;
    if (c.tag != SubmanifoldClass::Symplectic && c.tag != SubmanifoldClass::Generic) dp = d_prime(c);
    const std::string line = to_string(c.tag) + ", d'=" + (dp ? std::to_string(*dp) : std::string("undefined"));
    if (e.out.empty() && e.format == "json") std::cerr << line << '\n';
    else std::cout << line << '\n';

    Table t{"geometry", {"node", "chart", "t", "half_rank", "lambdas", "vol_density", "N", "d", "d_prime"}, {}};
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& [chart, param] = samples[i];
        const GeometryFrame f = frame_at(sub.chart(chart), param);
        std::string ts, ls;
        for (Eigen::Index j = 0; j < param.size(); ++j) ts += (j ? ";" : "") + format_double(param[j]);
        for (std::size_t j = 0; j < f.lambdas.size(); ++j) ls += (j ? ";" : "") + format_double(f.lambdas[j]);
        t.rows.push_back({i, chart, ts, f.half_rank, ls, f.vol_density, sub.ambient_dim(), sub.dim(),
                          dp ? ordered_json(*dp) : ordered_json(nullptr)});
    }
    ordered_json info;
    info["classification"] = {{"tag", to_string(c.tag)},
                              {"d_prime", dp ? ordered_json(*dp) : ordered_json(nullptr)},
                              {"half_rank", c.half_rank},
                              {"max_abs_H", c.max_abs_H},
                              {"max_lambda_defect", c.max_lambda_defect},
                              {"min_lambda", c.min_lambda}};
    if (!e.out.empty() || e.format == "json") emit(e, "geometry", {t}, info);
    return 0;
}

int cmd_spectrum(const Experiment& e, bool scaled, bool export_matrix) {
    const auto& sub = e.manifold();
    const SubmanifoldClass tag = classify(sub).tag;
    const bool has_dp = tag != SubmanifoldClass::Symplectic && tag != SubmanifoldClass::Generic;
    if (scaled && !has_dp) throw NotApplicable("the S normalization needs an isotropic or co-isotropic submanifold");
    const int dp = has_dp ? d_prime(sub) : -1;
    if (export_matrix && e.out.empty()) throw ConfigError("--export-matrix needs --out");
    struct Result {
        SpectralSummary spec;
        std::string quad;
        TraceCheck trace;
    };
    const auto results = sweep(e.sweep(), [&](double k) {
        Built b = build(e, k);
        const TraceCheck tc = exact_trace(b.T);
        HermitianOperator op = scaled ? scale_to_S(b.T, dp) : std::move(b.T);
        if (export_matrix)
            write_matrix_binary(op, (fs::path(e.out) / ("matrix_k" + format_double(k) + ".bin")).string());
        return Result{eigensolve(op, dp), b.quad_label, tc};
    });
    Table t{"spectrum", {"index", "eigenvalue", "k", "normalization", "N", "d", "d_prime", "M", "quad_order"}, {}};
    Table tr{"spectrum_trace", with_provenance({"trace", "prediction", "relative_gap"}), {}};
    for (const auto& r : results) {
        for (std::size_t i = 0; i < r.spec.eigenvalues.size(); ++i)
            t.rows.push_back({i, r.spec.eigenvalues[i], r.spec.k, to_string(r.spec.normalization), sub.ambient_dim(),
                              sub.dim(), dp, r.spec.max_degree, r.quad});
        std::vector<ordered_json> row{r.trace.trace.real(), r.trace.prediction.real(), r.trace.relative_gap};
        append(row, provenance(r.spec.k, sub, dp, r.spec.max_degree, r.quad));
        tr.rows.push_back(std::move(row));
    }
    emit(e, "spectrum", {t, tr});
    return 0;
}

int cmd_szego(const Experiment& e) {
    const auto& sub = e.manifold();
    const int dp = d_prime(sub);
    struct Result {
        std::vector<double> empirical;
        std::vector<double> predicted;
        int M;
        std::string quad;
    };
    const auto& ks = e.sweep();
    const auto results = sweep(ks, [&](double k) {
        const Built b = build(e, k);
        const SpectralSummary spec = eigensolve(scale_to_S(b.T, dp), dp);
        Result r{{}, {}, b.max_degree, b.quad_label};
        for (const auto& phi : e.functions) {
            r.empirical.push_back(szego_scale(dp, sub.dim(), k) * trace_phi(spec, phi));
            r.predicted.push_back(szego_functional(sub, b.nodes, b.a, phi).value);
        }
        return r;
    });
    Table t{"szego", with_provenance({"function", "empirical", "predicted", "relative_error"}), {}};
    Table fits{"szego_fit", {"function", "slope", "intercept", "points", "below_noise_floor"}, {}};
    for (std::size_t f = 0; f < e.functions.size(); ++f) {
        std::vector<double> values;
        for (std::size_t i = 0; i < ks.size(); ++i) {
            const auto& r = results[i];
            const double rel = std::abs(r.empirical[f] - r.predicted[f]) / std::abs(r.predicted[f]);
            std::vector<ordered_json> row{e.functions[f].name, r.empirical[f], r.predicted[f], rel};
            append(row, provenance(ks[i], sub, dp, r.M, r.quad));
            t.rows.push_back(std::move(row));
            values.push_back(r.empirical[f]);
        }
        if (ks.size() >= 4) {
            const RateFit fit = rate_regression(ks, values, results.back().predicted[f]);
            fits.rows.push_back({e.functions[f].name, fit.slope, fit.intercept, fit.points, fit.below_noise_floor});
            summary(e) << e.functions[f].name << ": error slope " << format_double(fit.slope) << '\n';
        }
    }
    emit(e, "szego", {t, fits});
    return 0;
}

int cmd_weyl(const Experiment& e) {
    const auto& sub = e.manifold();
    const int dp = d_prime(sub);
    struct Result {
        std::vector<long> counts;
        std::vector<double> predicted;
        int M;
        std::string quad;
    };
    const auto& ks = e.sweep();
    const auto results = sweep(ks, [&](double k) {
        const Built b = build(e, k);
        const SpectralSummary spec = eigensolve(scale_to_S(b.T, dp), dp);
        Result r{{}, {}, b.max_degree, b.quad_label};
        for (const auto& [lo, hi] : e.intervals) {
            r.counts.push_back(weyl_count(spec, lo, hi));
            r.predicted.push_back(weyl_prediction(dp, b.nodes, b.a, lo, hi));
        }
        return r;
    });
    Table t{"weyl", with_provenance({"lo", "hi", "count", "scaled_count", "predicted", "relative_error"}), {}};
    for (std::size_t i = 0; i < ks.size(); ++i)
        for (std::size_t j = 0; j < e.intervals.size(); ++j) {
            const auto& r = results[i];
            const double scaled = szego_scale(dp, sub.dim(), ks[i]) * static_cast<double>(r.counts[j]);
            std::vector<ordered_json> row{e.intervals[j].first, e.intervals[j].second, r.counts[j], scaled,
                                          r.predicted[j], std::abs(scaled - r.predicted[j]) / r.predicted[j]};
            append(row, provenance(ks[i], sub, dp, r.M, r.quad));
            t.rows.push_back(std::move(row));
        }
    emit(e, "weyl", {t});
    return 0;
}

int cmd_schatten(const Experiment& e) {
    const auto& sub = e.manifold();
    const int dp = d_prime(sub);
    struct Result {
        std::vector<double> empirical;
        std::vector<double> predicted;
        int M;
        std::string quad;
    };
    const auto& ks = e.sweep();
    const auto results = sweep(ks, [&](double k) {
        const Built b = build(e, k);
        const HermitianOperator S = scale_to_S(b.T, dp);
        Result r{{}, {}, b.max_degree, b.quad_label};
        for (double p : e.schatten_p) {
            r.empirical.push_back(szego_scale(dp, sub.dim(), k) * schatten_sum(S, p));
            r.predicted.push_back(schatten_prediction(sub, b.nodes, b.a, p));
        }
        return r;
    });
    Table t{"schatten", with_provenance({"p", "empirical", "predicted", "relative_error"}), {}};
    for (std::size_t j = 0; j < e.schatten_p.size(); ++j)
        for (std::size_t i = 0; i < ks.size(); ++i) {
            const auto& r = results[i];
            std::vector<ordered_json> row{e.schatten_p[j], r.empirical[j], r.predicted[j],
                                          std::abs(r.empirical[j] - r.predicted[j]) / r.predicted[j]};
            append(row, provenance(ks[i], sub, dp, r.M, r.quad));
            t.rows.push_back(std::move(row));
        }
    emit(e, "schatten", {t});
    return 0;
}

int cmd_entropy(Experiment e, bool normalize) {
    const auto& sub = e.manifold();
    const int dp = d_prime(sub);
    if (normalize) {
        if (!e.amplitude->is_real()) throw InvalidArgument("entropy needs a real amplitude");
        const auto nodes = quadrature(sub, default_quadrature(sub, e.sweep().front(), 0.0, 0));
        const auto av = evaluate(*e.amplitude, nodes);
        double integral = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) integral += nodes[i].weight * av[i].real();
        if (!(integral > 0)) throw NormalizationError("amplitude integrates to zero");
        e.amplitude = Amplitude(Expr::binary(Expr::Kind::Div, e.amplitude->re(), Expr::number(integral)));
    }
    const int N = sub.ambient_dim();
    struct Result {
        double H;
        double shifted;
        double predicted;
        int M;
        std::string quad;
    };
    const auto& ks = e.sweep();
    const auto results = sweep(ks, [&](double k) {
        const Built b = build(e, k);
        const SpectralSummary spec = eigensolve(b.T, dp);
        std::vector<double> p = clamped(spec.eigenvalues);
        for (double& x : p) x *= std::pow(std::numbers::pi / k, N);
        const double H = entropy(p);
        const EntropyPrediction ep = entropy_prediction(sub, b.nodes, b.a);
        const double shifted = H + std::log(ep.c_d * std::pow(k, -0.5 * sub.dim()));
        return Result{H, shifted, ep.value, b.max_degree, b.quad_label};
    });
    Table t{"entropy", with_provenance({"entropy", "shifted_entropy", "predicted", "gap"}), {}};
    for (std::size_t i = 0; i < ks.size(); ++i) {
        const auto& r = results[i];
        std::vector<ordered_json> row{r.H, r.shifted, r.predicted, std::abs(r.shifted - r.predicted)};
        append(row, provenance(ks[i], sub, dp, r.M, r.quad));
        t.rows.push_back(std::move(row));
    }
    emit(e, "entropy", {t});
    return 0;
}

int cmd_density(const Experiment& e, int samples) {
    const auto& sub = e.manifold();
    const int dp = d_prime(sub);
    const double k = e.ks.empty() ? 0.0 : e.ks.front();
    // The sharp indicator {a >= s} needs many nodes for a smooth curve.
    const int per_axis = std::max(64, static_cast<int>(std::pow(2e5, 1.0 / sub.dim())));
    QuadratureOptions q;
    q.periodic_points = per_axis;
    if (e.quad_order) q.gauss_order = *e.quad_order;
    q.panels = std::max(1, per_axis / q.gauss_order);
    const auto nodes = quadrature(sub, q);
    const auto av = evaluate(*e.amplitude, nodes);
    const DensityCurve c = density_curve(dp, nodes, av, samples);
    std::ostringstream label;
    label << 'p' << q.periodic_points << 'g' << q.gauss_order << 'x' << q.panels;

    Table t{"density", {"s", "density", "k", "N", "d", "d_prime", "M", "quad_order"}, {}};
    for (std::size_t i = 0; i < c.s.size(); ++i) {
        std::vector<ordered_json> row{c.s[i], c.density[i]};
        append(row, provenance(k, sub, dp, e.max_degree.value_or(0), label.str()));
        t.rows.push_back(std::move(row));
    }
    Table jumps{"density_jumps", {"index", "s_before", "s_after"}, {}};
    for (std::size_t j : c.jumps) jumps.rows.push_back({j, c.s[j - 1], c.s[j]});
    emit(e, "density", {t, jumps});
    if (!e.svg.empty()) {
        std::ofstream f(e.svg);
        write_density_svg(f, {{sub.kind() + ", d'=" + std::to_string(dp), c}});
    }
    return 0;
}

int cmd_hessian(const Experiment& e, const Cli& cli) {
    const auto rows = hessian_check(cli.hd, cli.hq, cli.trials, e.seed);
    Table t{"hessian_check", {"d", "q", "trials", "failures", "worst_recursion", "worst_dense", "worst_sqrt"}, {}};
    int failures = 0;
    for (const auto& r : rows) {
        t.rows.push_back({r.dim, r.q, r.trials, r.failures, r.worst_recursion, r.worst_dense, r.worst_sqrt});
        failures += r.failures;
    }
    if (e.out.empty() && e.format == "csv") {
        std::printf("%3s %3s %7s %9s %16s %16s %16s  %s\n", "d", "q", "trials", "failures", "recursion", "dense",
                    "sqrt", "");
        for (const auto& r : rows)
            std::printf("%3d %3d %7d %9d %16.3e %16.3e %16.3e  %s\n", r.dim, r.q, r.trials, r.failures,
                        r.worst_recursion, r.worst_dense, r.worst_sqrt, r.failures ? "FAIL" : "PASS");
    } else {
        emit(e, "hessian_check", {t});
    }
    return failures ? kExitFailed : 0;
}

int cmd_bs_state(const Experiment& e, const Cli& cli) {
    const auto& sub = e.manifold();
    BohrSommerfeldData bs;
    try {
        if (cli.theta.empty()) {
            if (sub.kind() != "circle") throw ConfigError("--theta is required for manifolds other than the circle");
            const double r = sub.chart(0).gamma(Eigen::VectorXd::Zero(1)).norm();
            bs = circle_bohr_sommerfeld(r, cli.alpha);
        } else {
            bs = {parse(cli.theta, sub.dim()), parse(cli.alpha, sub.dim())};
        }
    } catch (const SyntaxError& err) {
        throw ConfigError(std::string("theta/alpha: ") + err.what());
    }
    const auto& ks = e.sweep();
    for (double k : ks) {
        const auto report = check_bohr_sommerfeld(sub, bs, k);
        if (!report.ok) {
            std::cerr << "Bohr-Sommerfeld check failed at k=" << format_double(k) << ": derivative defect "
                      << format_double(report.max_derivative_defect) << ", closure defect "
                      << format_double(report.max_closure_defect) << '\n';
            return kExitFailed;
        }
    }
    struct Result {
        double norm2;
        double rayleigh;
        double lmax;
        double predicted;
        double alpha_l2;
        int M;
        std::string quad;
    };
    const Amplitude alpha(bs.alpha);
    const auto results = sweep(ks, [&](double k) {
        const Built b = build(e, k);
        const Eigen::VectorXcd psi = build_test_state(b.T.trunc, sub, bs, b.nodes);
        const auto alpha_c = evaluate(alpha, b.nodes);
        std::vector<double> alpha_v;
        double l2 = 0.0;
        for (std::size_t i = 0; i < b.nodes.size(); ++i) {
            alpha_v.push_back(alpha_c[i].real());
            l2 += b.nodes[i].weight * std::norm(alpha_c[i]);
        }
        return Result{psi.squaredNorm(),
                      rayleigh_lower_bound(b.T, psi),
                      eigensolve(b.T, sub.dim()).max(),
                      rayleigh_prediction(k, sub.ambient_dim(), b.nodes, alpha_v, b.a),
                      l2,
                      b.max_degree,
                      b.quad_label};
    });
    Table t{"bs_state", with_provenance({"norm_squared", "rayleigh", "lambda_max", "rayleigh_prediction"}), {}};
    std::vector<double> norms;
    bool ok = true;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        const auto& r = results[i];
        std::vector<ordered_json> row{r.norm2, r.rayleigh, r.lmax, r.predicted};
        append(row, provenance(ks[i], sub, sub.dim(), r.M, r.quad));
        t.rows.push_back(std::move(row));
        norms.push_back(r.norm2);
        if (r.rayleigh > r.lmax * (1 + 1e-10)) ok = false;
    }
    Table fit{"bs_norm_fit", {"slope", "target", "pass"}, {}};
    if (ks.size() >= 3) {
        const NormReport n = norm_asymptotics_check(ks, norms, sub.ambient_dim(), results.back().alpha_l2);
        fit.rows.push_back({n.fit.slope, n.target, n.pass});
        summary(e) << "norm asymptotics: slope " << format_double(n.fit.slope) << (n.pass ? " PASS" : " FAIL") << '\n';
        ok = ok && n.pass;
    }
    emit(e, "bs_state", {t, fit});
    return ok ? 0 : kExitFailed;
}

int cmd_verify_all(const Experiment& e, const Cli& cli) {
    ordered_json verdicts = ordered_json::array();
    bool all = true;
    const bool text = e.format == "csv" && e.out.empty();
    run_acceptance(cli.only, [&](const Verdict& v) {
        all = all && v.pass;
        verdicts.push_back(to_json(v));
        if (text) {
            std::cout << (v.pass ? "PASS " : "FAIL ") << v.check_id << " observed=" << format_double(v.observed)
                      << " predicted=" << format_double(v.predicted) << " tol=" << format_double(v.tolerance)
                      << "  " << v.detail << '\n'
                      << std::flush;
        }
    });
    if (!text) {
        if (e.format == "json") {
            if (e.out.empty()) {
                std::cout << verdicts.dump(2) << '\n';
            } else {
                fs::create_directories(e.out);
                std::ofstream(fs::path(e.out) / "verify_all.json") << verdicts.dump(2) << '\n';
            }
        } else {
            Table t{"verify_all", {"check_id", "observed", "predicted", "tolerance", "pass"}, {}};
            for (const auto& v : verdicts)
                t.rows.push_back({v["check_id"], v["observed"], v["predicted"], v["tolerance"], v["pass"]});
            emit(e, "verify_all", {t});
        }
    }
    return all ? 0 : kExitFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Berezin-Toeplitz operators on submanifolds of C^N: spectra and their asymptotics"};
    app.require_subcommand(1);
    Cli cli;
    auto common = [&](CLI::App* s, bool sweep_opts) {
        s->add_option("--config", cli.config, "experiment JSON");
        s->add_option("--manifold", cli.manifold, "manifold JSON, inline or a file path");
        s->add_option("--out", cli.out, "output directory (stdout when omitted)");
        s->add_option("--format", cli.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        s->add_option("--seed", cli.seed, "random seed")->each([&](const std::string&) { cli.seed_given = true; });
        if (!sweep_opts) return;
        s->add_option("--k", cli.ks, "k values")->delimiter(',');
        s->add_option("--amplitude", cli.amplitude, "amplitude a(t1..td), real part when --amplitude-im is given");
        s->add_option("--amplitude-im", cli.amplitude_im, "imaginary part of a complex amplitude");
        s->add_option("--max-degree", cli.max_degree, "truncation degree M");
        s->add_option("--quad-order", cli.quad_order, "Gauss-Legendre points per panel");
    };

    auto* geometry = app.add_subcommand("geometry", "classification, d' and the lambda spectrum at sample nodes");
    common(geometry, true);
    auto* spectrum = app.add_subcommand("spectrum", "assemble T (or S) and list eigenvalues");
    common(spectrum, true);
    spectrum->add_flag("--scaled", cli.scaled, "use the S normalization");
    spectrum->add_flag("--export-matrix", cli.export_matrix, "write matrix_k<k>.bin into --out");
    auto* szego_cmd = app.add_subcommand("szego", "empirical Tr phi(S) against the Szego functional");
    common(szego_cmd, true);
    szego_cmd->add_option("--phi", cli.functions, "entropy, power:n, trapezoid:l1:l2:m1:m2")->delimiter(',');
    auto* weyl = app.add_subcommand("weyl", "eigenvalue counts against the Weyl law");
    common(weyl, true);
    weyl->add_option("--interval", cli.interval, "lo,hi")->delimiter(',');
    auto* schatten = app.add_subcommand("schatten", "Schatten sums against their limits");
    common(schatten, true);
    schatten->add_option("--p", cli.schatten_p, "exponents")->delimiter(',');
    auto* entropy_cmd = app.add_subcommand("entropy", "entropy of rho = (pi/k)^N T");
    common(entropy_cmd, true);
    entropy_cmd->add_flag("--normalize", cli.normalize, "rescale a so that its integral is 1");
    auto* density = app.add_subcommand("density", "limiting eigenvalue density");
    common(density, true);
    density->add_option("--samples", cli.samples, "grid points")->check(CLI::Range(2, 1000000));
    density->add_option("--svg", cli.svg, "SVG plot path");
    auto* hessian = app.add_subcommand("hessian-check", "random tests of the block Hessian determinant identities");
    common(hessian, false);
    hessian->add_option("--d", cli.hd, "dimensions")->delimiter(',');
    hessian->add_option("--q", cli.hq, "block counts")->delimiter(',');
    hessian->add_option("--trials", cli.trials, "instances per (d, q)")->check(CLI::PositiveNumber);
    auto* bs = app.add_subcommand("bs-state", "Bohr-Sommerfeld test states and the Rayleigh lower bound");
    common(bs, true);
    bs->add_option("--theta", cli.theta, "phase theta(t); the circle has a built-in one");
    bs->add_option("--alpha", cli.alpha, "amplitude alpha(t) of the test state");
    auto* verify = app.add_subcommand("verify-all", "run the acceptance checks");
    common(verify, false);
    verify->add_option("--only", cli.only, "check ids")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        const Experiment e = load(cli);
        if (*geometry) return cmd_geometry(e);
        if (*spectrum) return cmd_spectrum(e, cli.scaled, cli.export_matrix);
        if (*szego_cmd) return cmd_szego(e);
        if (*weyl) return cmd_weyl(e);
        if (*schatten) return cmd_schatten(e);
        if (*entropy_cmd) return cmd_entropy(e, cli.normalize);
        if (*density) return cmd_density(e, cli.samples);
        if (*hessian) return cmd_hessian(e, cli);
        if (*bs) return cmd_bs_state(e, cli);
        if (*verify) return cmd_verify_all(e, cli);
    } catch (const ConfigError& err) {
        std::cerr << "config error: " << err.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kExitFailed;
    }
    return kExitFailed;
}
