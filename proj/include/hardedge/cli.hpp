#pragma once

// Command-line front end: density curves, kernel grids, Monte Carlo runs,
// convergence sweeps and the acceptance suite. Exit codes: 0 success,
// 1 verification failures, 2 usage errors, 3 numeric failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hardedge/errors.hpp"
#include "hardedge/experiments.hpp"
#include "hardedge/kernels.hpp"
#include "hardedge/polya.hpp"
#include "hardedge/verification.hpp"

namespace hardedge::cli {

inline constexpr const char* tool_version = "0.1.0";

enum exit_code : int { ok = 0, verify_failed = 1, usage = 2, numeric = 3 };

class usage_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Grid {
    double lo = 0.0;
    double hi = 0.0;
    int count = 0;

    std::vector<double> points() const {
        std::vector<double> v(count);
        for (int i = 0; i < count; ++i) v[i] = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
        if (count > 1) v.back() = hi;
        return v;
    }
};

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

inline double parse_double(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw usage_error(what + ": '" + s + "' is not a number");
    }
    if (used != s.size() || !std::isfinite(v)) throw usage_error(what + ": '" + s + "' is not a finite number");
    return v;
}

inline int parse_int(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    long v = 0;
    try {
        v = std::stol(s, &used);
    } catch (const std::exception&) {
        throw usage_error(what + ": '" + s + "' is not an integer");
    }
    if (used != s.size() || v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
        throw usage_error(what + ": '" + s + "' is not an integer");
    return static_cast<int>(v);
}

inline std::string fmt17(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw usage_error("cannot open '" + path + "' for writing");
    return f;
}

}  // namespace detail

/// "lo:hi:count" with inclusive endpoints; lo < hi unless count == 1.
inline Grid parse_grid(const std::string& text) {
    const auto parts = detail::split(text, ':');
    if (parts.size() != 3) throw usage_error("grid '" + text + "' must look like lo:hi:count");
    Grid g{detail::parse_double(parts[0], "grid lo"), detail::parse_double(parts[1], "grid hi"),
           detail::parse_int(parts[2], "grid count")};
    if (g.count < 1) throw usage_error("grid count must be positive");
    if (g.count == 1 ? g.lo > g.hi : !(g.lo < g.hi)) throw usage_error("grid '" + text + "' needs lo < hi");
    return g;
}

/// "lo:hi" with lo < hi.
inline std::pair<double, double> parse_window(const std::string& text) {
    const auto parts = detail::split(text, ':');
    if (parts.size() != 2) throw usage_error("window '" + text + "' must look like lo:hi");
    const double lo = detail::parse_double(parts[0], "window lo");
    const double hi = detail::parse_double(parts[1], "window hi");
    if (!(lo < hi)) throw usage_error("window '" + text + "' needs lo < hi");
    return {lo, hi};
}

/// Comma-separated increasing list of positive integers.
inline std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    for (const auto& item : detail::split(text, ',')) {
        const int v = detail::parse_int(item, "n list");
        if (v < 1) throw usage_error("n list entries must be positive");
        if (!out.empty() && v <= out.back()) throw usage_error("n list must be increasing");
        out.push_back(v);
    }
    if (out.empty()) throw usage_error("n list is empty");
    return out;
}

/// Metadata for one run; written after every data file so that a missing
/// manifest marks an interrupted run.
struct RunManifest {
    std::string command;
    nlohmann::json config = nlohmann::json::object();
    nlohmann::json results = nlohmann::json::object();
    std::string started;
    std::string finished;
    std::vector<std::string> output_paths;

    nlohmann::json to_json() const {
        return {{"command", command},   {"config", config},     {"results", results},
                {"tool_version", tool_version}, {"started", started}, {"finished", finished},
                {"output_paths", output_paths}};
    }

    void write(const std::string& path) {
        finished = detail::utc_now();
        auto f = detail::open_out(path);
        f << to_json().dump(2) << '\n';
        if (!f) throw usage_error("failed writing '" + path + "'");
    }
};

inline nlohmann::json to_json(const ExperimentConfig& c) {
    return {{"ensemble", to_string(c.ensemble)},
            {"n", c.n},
            {"samples", c.samples},
            {"x", c.x},
            {"window", {c.lo, c.hi}},
            {"bins", c.bins},
            {"seed", c.seed},
            {"parallelism", c.parallelism},
            {"analytic_mode", c.analytic_mode == AnalyticMode::bin_average ? "average" : "center"},
            {"curve", c.curve == AnalyticCurve::limit ? "limit" : "finite"}};
}

inline void write_histogram_csv(std::ostream& out, const HistogramResult& h) {
    out << "bin_lo,bin_hi,density_mc,density_analytic\n";
    for (std::size_t b = 0; b < h.density.size(); ++b)
        out << detail::fmt17(h.bin_edges[b]) << ',' << detail::fmt17(h.bin_edges[b + 1]) << ','
            << detail::fmt17(h.density[b]) << ',' << detail::fmt17(h.analytic[b]) << '\n';
}

/// Threads from --threads, else HARDEDGE_THREADS, else the hardware count.
inline int resolve_threads(std::optional<int> flag) {
    if (flag) {
        if (*flag < 1) throw usage_error("--threads must be positive");
        return *flag;
    }
    if (const char* env = std::getenv("HARDEDGE_THREADS"); env && *env) {
        const int v = detail::parse_int(env, "HARDEDGE_THREADS");
        if (v < 1) throw usage_error("HARDEDGE_THREADS must be positive");
        return v;
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

inline MellinSpec family_spec(const std::string& family, int nu) {
    if (family != "ginibre") throw usage_error("unknown family '" + family + "' (supported: ginibre)");
    if (nu < 0) throw usage_error("--nu must be non-negative");
    return ginibre(nu);
}

/// Density at a = 0 diverges logarithmically inside the bulk (|x| < 2) and
/// is two-sided ambiguous outside it; those rows are written as inf / nan.
inline double density_point(const MellinSpec& spec, double x, double a) {
    if (a == 0.0) return std::abs(x) < 2.0 ? std::numeric_limits<double>::infinity()
                                            : std::numeric_limits<double>::quiet_NaN();
    if (spec.nu == 0) return ginibre_product_density(x, a);
    return product_kernel_limit(spec, x, a, a);
}

struct Streams {
    std::ostream& out;
    std::ostream& err;
};

inline int run_cli(int argc, const char* const* argv, Streams io = {std::cout, std::cerr}) {
    CLI::App app{"Hard-edge statistics of G(H - n x)G*: kernels, densities and Monte Carlo"};
    app.set_version_flag("--version", std::string(tool_version));
    app.require_subcommand(1, 1);

    // density
    auto* density = app.add_subcommand("density", "limiting hard-edge density on a grid of a");
    double d_x = 0.0;
    std::string d_family = "ginibre";
    int d_nu = 0;
    std::string d_grid;
    std::string d_out;
    std::string d_manifest;
    density->add_option("--x", d_x, "macroscopic position x")->required();
    density->add_option("--family", d_family, "Polya family (ginibre)");
    density->add_option("--nu", d_nu, "Ginibre charge");
    density->add_option("--grid", d_grid, "lo:hi:count")->required();
    density->add_option("--out", d_out, "CSV output path")->required();
    density->add_option("--manifest", d_manifest, "manifest path (default <out>.manifest.json)");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo histogram against the analytic density");
    int s_n = 100;
    long s_samples = 10000;
    double s_x = 0.0;
    std::uint64_t s_seed = 1;
    std::string s_window = "-12:12";
    int s_bins = 24;
    std::optional<int> s_threads;
    std::string s_out;
    std::string s_manifest;
    std::string s_ensemble = "product";
    std::string s_analytic = "average";
    std::string s_curve = "limit";
    simulate->add_option("--n", s_n, "matrix dimension");
    simulate->add_option("--samples", s_samples, "number of matrices");
    simulate->add_option("--x", s_x, "macroscopic position x (product ensemble)");
    simulate->add_option("--seed", s_seed, "64-bit seed");
    simulate->add_option("--window", s_window, "lo:hi");
    simulate->add_option("--bins", s_bins, "number of bins (>= 10)");
    simulate->add_option("--threads", s_threads, "worker threads (default HARDEDGE_THREADS or all cores)");
    simulate->add_option("--ensemble", s_ensemble, "product | gue-bulk | ginibre-hard-edge");
    simulate->add_option("--analytic", s_analytic, "average | center: analytic value per bin");
    simulate->add_option("--curve", s_curve, "limit | finite: product-ensemble comparison curve");
    simulate->add_option("--out", s_out, "CSV output path")->required();
    simulate->add_option("--manifest", s_manifest, "manifest path (default <out>.manifest.json)");

    // kernel
    auto* kernel = app.add_subcommand("kernel", "kernel values on an (a1, a2) grid");
    std::string k_mode;
    std::optional<int> k_n;
    double k_x = 0.0;
    std::string k_a1, k_a2;
    std::string k_family = "ginibre";
    int k_nu = 0;
    double k_tol = 1e-11;
    std::string k_out;
    std::string k_manifest;
    kernel->add_option("--mode", k_mode, "gue-finite | polya-finite | polya-limit | product-finite | product-limit")
        ->required();
    kernel->add_option("--n", k_n, "matrix dimension (finite modes)");
    kernel->add_option("--x", k_x, "macroscopic position x");
    kernel->add_option("--a1-grid", k_a1, "lo:hi:count")->required();
    kernel->add_option("--a2-grid", k_a2, "lo:hi:count")->required();
    kernel->add_option("--family", k_family, "Polya family (ginibre)");
    kernel->add_option("--nu", k_nu, "Ginibre charge");
    kernel->add_option("--tol", k_tol, "absolute quadrature tolerance");
    kernel->add_option("--out", k_out, "CSV output path")->required();
    kernel->add_option("--manifest", k_manifest, "manifest path (default <out>.manifest.json)");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "L1 distance to the limiting density for increasing n");
    double w_x = 1.0;
    std::string w_ns = "25,50,100,200";
    long w_samples = 10000;
    std::uint64_t w_seed = 1;
    std::string w_window = "-12:12";
    int w_bins = 24;
    std::optional<int> w_threads;
    std::string w_out;
    std::string w_manifest;
    sweep->add_option("--x", w_x, "macroscopic position x");
    sweep->add_option("--ns", w_ns, "comma-separated increasing n values");
    sweep->add_option("--samples", w_samples, "matrices per n");
    sweep->add_option("--seed", w_seed, "64-bit seed");
    sweep->add_option("--window", w_window, "lo:hi");
    sweep->add_option("--bins", w_bins, "number of bins (>= 10)");
    sweep->add_option("--threads", w_threads, "worker threads");
    sweep->add_option("--out", w_out, "CSV output path")->required();
    sweep->add_option("--manifest", w_manifest, "manifest path (default <out>.manifest.json)");

    // verify
    auto* verify = app.add_subcommand("verify", "run the acceptance checks");
    std::string v_suite = "fast";
    std::optional<int> v_threads;
    std::vector<int> v_only;
    verify->add_option("--suite", v_suite, "fast | full");
    verify->add_option("--only", v_only, "run only these criterion ids");
    verify->add_option("--threads", v_threads, "worker threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, io.out, io.err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, io.out, io.err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, io.out, io.err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, io.out, io.err);
        return usage;
    }

    std::string failing_point;
    try {
        if (density->parsed()) {
            RunManifest m;
            m.command = "density";
            m.started = detail::utc_now();
            const Grid g = parse_grid(d_grid);
            const MellinSpec spec = family_spec(d_family, d_nu);
            m.config = {{"x", d_x}, {"family", d_family}, {"nu", d_nu}, {"grid", d_grid}};
            std::ostringstream csv;
            csv << "a,rho_analytic\n";
            for (double a : g.points()) {
                failing_point = "a = " + detail::fmt17(a);
                csv << detail::fmt17(a) << ',' << detail::fmt17(density_point(spec, d_x, a)) << '\n';
            }
            failing_point.clear();
            detail::open_out(d_out) << csv.str();
            m.output_paths = {d_out};
            m.write(d_manifest.empty() ? d_out + ".manifest.json" : d_manifest);
            return ok;
        }

        if (simulate->parsed()) {
            RunManifest m;
            m.command = "simulate";
            m.started = detail::utc_now();
            ExperimentConfig c;
            if (s_ensemble == "product") c.ensemble = ExperimentKind::product;
            else if (s_ensemble == "gue-bulk") c.ensemble = ExperimentKind::gue_bulk;
            else if (s_ensemble == "ginibre-hard-edge") c.ensemble = ExperimentKind::ginibre_hard_edge;
            else throw usage_error("unknown ensemble '" + s_ensemble + "'");
            if (s_analytic == "average") c.analytic_mode = AnalyticMode::bin_average;
            else if (s_analytic == "center") c.analytic_mode = AnalyticMode::bin_center;
            else throw usage_error("--analytic must be average or center");
            if (s_curve == "limit") c.curve = AnalyticCurve::limit;
            else if (s_curve == "finite") c.curve = AnalyticCurve::finite_n;
            else throw usage_error("--curve must be limit or finite");
            c.n = s_n;
            c.samples = s_samples;
            c.x = s_x;
            c.seed = s_seed;
            std::tie(c.lo, c.hi) = parse_window(s_window);
            c.bins = s_bins;
            c.parallelism = resolve_threads(s_threads);
            try {
                c.validate();
            } catch (const std::invalid_argument& e) {
                throw usage_error(e.what());
            }
            const HistogramResult h = run_experiment(c);
            std::ostringstream csv;
            write_histogram_csv(csv, h);
            detail::open_out(s_out) << csv.str();
            m.config = to_json(c);
            m.results = {{"l1_distance", h.l1_distance},
                         {"sup_distance", h.sup_distance},
                         {"in_window", h.in_window},
                         {"second_moment", h.second_moment}};
            m.output_paths = {s_out};
            m.write(s_manifest.empty() ? s_out + ".manifest.json" : s_manifest);
            io.out << "l1_distance " << detail::fmt17(h.l1_distance) << "\nsup_distance "
                   << detail::fmt17(h.sup_distance) << '\n';
            return ok;
        }

        if (kernel->parsed()) {
            RunManifest m;
            m.command = "kernel";
            m.started = detail::utc_now();
            KernelKind kind;
            if (k_mode == "gue-finite") kind = KernelKind::gue_finite;
            else if (k_mode == "polya-finite") kind = KernelKind::polya_finite;
            else if (k_mode == "polya-limit") kind = KernelKind::polya_limit;
            else if (k_mode == "product-finite") kind = KernelKind::product_finite;
            else if (k_mode == "product-limit") kind = KernelKind::product_limit;
            else throw usage_error("unknown kernel mode '" + k_mode + "'");
            const bool finite = kind == KernelKind::gue_finite || kind == KernelKind::polya_finite ||
                                kind == KernelKind::product_finite;
            if (finite && !k_n) throw usage_error("--mode " + k_mode + " needs --n");
            if (k_n && *k_n < 1) throw usage_error("--n must be positive");
            if (kind == KernelKind::product_finite && *k_n > 64)
                throw usage_error("product-finite supports n <= 64");
            if (!(k_tol > 0.0)) throw usage_error("--tol must be positive");
            const Grid g1 = parse_grid(k_a1);
            const Grid g2 = parse_grid(k_a2);
            const MellinSpec spec = family_spec(k_family, k_nu);
            KernelOptions ko;
            ko.tol = k_tol;
            const auto eval = kernel_evaluator(kind, spec, finite ? k_n : std::nullopt, k_x, ko);
            const auto a1 = g1.points();
            const auto a2 = g2.points();
            std::ostringstream csv;
            csv << "a1\\a2";
            for (double b : a2) csv << ',' << detail::fmt17(b);
            csv << '\n';
            for (double a : a1) {
                csv << detail::fmt17(a);
                for (double b : a2) {
                    failing_point = "(a1, a2) = (" + detail::fmt17(a) + ", " + detail::fmt17(b) + ")";
                    csv << ',' << detail::fmt17(eval(a, b));
                }
                csv << '\n';
            }
            failing_point.clear();
            detail::open_out(k_out) << csv.str();
            m.config = {{"mode", k_mode}, {"x", k_x},       {"a1_grid", k_a1}, {"a2_grid", k_a2},
                        {"family", k_family}, {"nu", k_nu}, {"tol", k_tol},    {"spec", spec.id}};
            if (k_n) m.config["n"] = *k_n;
            m.output_paths = {k_out};
            m.write(k_manifest.empty() ? k_out + ".manifest.json" : k_manifest);
            return ok;
        }

        if (sweep->parsed()) {
            RunManifest m;
            m.command = "sweep";
            m.started = detail::utc_now();
            ExperimentConfig base;
            std::tie(base.lo, base.hi) = parse_window(w_window);
            base.bins = w_bins;
            base.parallelism = resolve_threads(w_threads);
            const auto ns = parse_int_list(w_ns);
            if (w_samples < 1) throw usage_error("--samples must be positive");
            if (w_bins < 10) throw usage_error("--bins must be at least 10");
            const auto points = convergence_sweep(w_x, ns, w_samples, w_seed, base);
            std::ostringstream csv;
            csv << "n,l1_distance\n";
            nlohmann::json trace = nlohmann::json::array();
            for (const auto& p : points) {
                csv << p.n << ',' << detail::fmt17(p.l1_distance) << '\n';
                trace.push_back({{"n", p.n}, {"l1_distance", p.l1_distance}});
            }
            detail::open_out(w_out) << csv.str();
            base.x = w_x;
            base.samples = w_samples;
            base.seed = w_seed;
            m.config = to_json(base);
            m.config["ns"] = ns;
            m.results = {{"trace", trace}};
            m.output_paths = {w_out};
            m.write(w_manifest.empty() ? w_out + ".manifest.json" : w_manifest);
            return ok;
        }

        if (verify->parsed()) {
            std::vector<int> ids;
            try {
                ids = suite_criteria(v_suite);
            } catch (const std::invalid_argument& e) {
                throw usage_error(e.what());
            }
            if (!v_only.empty()) {
                for (int id : v_only)
                    if (id < 1 || id > 10) throw usage_error("--only ids must be in 1..10");
                ids = v_only;
            }
            VerifyOptions opt;
            opt.threads = resolve_threads(v_threads);
            std::vector<int> failed;
            for (int id : ids) {
                const CriterionResult r = run_criterion(id, opt);
                io.out << format_result(r) << std::endl;
                if (!r.passed) failed.push_back(id);
            }
            if (failed.empty()) {
                io.out << "all " << ids.size() << " criteria passed\n";
                return ok;
            }
            io.out << "failed criteria:";
            for (int id : failed) io.out << ' ' << id;
            io.out << '\n';
            return verify_failed;
        }
    } catch (const usage_error& e) {
        io.err << "error: " << e.what() << '\n';
        return usage;
    } catch (const std::invalid_argument& e) {
        io.err << "error: " << e.what() << '\n';
        return usage;
    } catch (const std::domain_error& e) {
        io.err << "error: " << e.what();
        if (!failing_point.empty()) io.err << " at " << failing_point;
        io.err << '\n';
        return usage;
    } catch (const std::exception& e) {
        io.err << "numeric failure: " << e.what();
        if (!failing_point.empty()) io.err << " at " << failing_point;
        io.err << '\n';
        return numeric;
    }
    return usage;
}

}  // namespace hardedge::cli
