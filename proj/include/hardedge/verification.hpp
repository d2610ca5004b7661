#pragma once

// The acceptance checks, one runner per criterion, shared by the verify
// command and the acceptance test binary.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "hardedge/experiments.hpp"
#include "hardedge/kernels.hpp"
#include "hardedge/polya.hpp"
#include "hardedge/rmt.hpp"

namespace hardedge {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct VerifyOptions {
    int threads = 1;
    long mc_samples = 10000;
    std::uint64_t seed = 1;
    // Replaceable so that a deliberately broken Green function can be fed
    // through criterion 1.
    std::function<GueMacro(double)> macro = gue_macro;
};

namespace detail {

inline std::string format(const char* fmt, ...) {
    char buf[512];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, args);
    va_end(args);
    return buf;
}

inline CriterionResult start(int id, std::string name) {
    CriterionResult r;
    r.id = id;
    r.name = std::move(name);
    return r;
}

inline std::vector<double> linspace(double lo, double hi, int count) {
    std::vector<double> v(count);
    for (int i = 0; i < count; ++i) v[i] = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
    return v;
}

inline TransformOptions raw_transforms() {
    TransformOptions t;
    t.use_closed_forms = false;
    return t;
}

inline ExperimentConfig product_config(const VerifyOptions& opt, int n, double x) {
    ExperimentConfig c;
    c.ensemble = ExperimentKind::product;
    c.n = n;
    c.x = x;
    c.samples = opt.mc_samples;
    c.lo = -12.0;
    c.hi = 12.0;
    c.bins = 24;
    c.seed = opt.seed;
    c.parallelism = opt.threads;
    return c;
}

}  // namespace detail

inline CriterionResult criterion_saddle_green(const VerifyOptions& opt) {
    CriterionResult r = detail::start(1, "saddle points and Green function");
    double worst_product = 0.0;
    double worst_green = 0.0;
    for (double x : {0.0, 1.0, -1.0, 2.0, -2.0, 3.0, -3.0}) {
        const GueMacro m = opt.macro(x);
        worst_product = std::max(worst_product, std::abs(m.saddle_plus * m.saddle_minus + 1.0));
        worst_green = std::max(worst_green, std::abs(m.saddle_minus + I_unit * m.green));
    }
    r.passed = worst_product <= 1e-12 && worst_green <= 1e-12;
    r.detail = detail::format("max|z+ z- + 1| = %.2e, max|z- + iG| = %.2e (tol 1e-12)", worst_product, worst_green);
    return r;
}

inline CriterionResult criterion_sine_kernel(const VerifyOptions&) {
    CriterionResult r = detail::start(2, "sine-kernel reduction of the GUE kernel");
    const auto grid = detail::linspace(-1.5, 1.5, 13);
    double worst = 0.0;
    for (double a1 : grid)
        for (double a2 : grid) {
            if (a2 < a1) continue;  // symmetric kernel
            worst = std::max(worst, std::abs(gue_kernel_finite(64, a1, a2) - sine_kernel(a1, a2)));
        }
    r.passed = worst <= 2e-2;
    r.detail = detail::format("n = 64, sup error = %.3e over |a1 - a2| <= 3 (tol 2e-2)", worst);
    return r;
}

inline CriterionResult criterion_polya_hard_edge(const VerifyOptions&) {
    CriterionResult r = detail::start(3, "finite-n Polya kernel approaches the Bessel diagonal");
    KernelOptions ko;
    ko.transforms = detail::raw_transforms();
    std::vector<double> errors;
    for (int n : {25, 50, 100, 200}) {
        const MellinSpec spec = ginibre(0, n, false);
        double worst = 0.0;
        for (double y : {0.5, 1.0, 2.0, 5.0}) {
            const double finite = polya_kernel_finite(spec, y / n, y / n, ko) / n;
            worst = std::max(worst, std::abs(finite - bessel_kernel_closed_form(y, y)));
        }
        errors.push_back(worst);
    }
    bool monotone = true;
    for (std::size_t k = 1; k < errors.size(); ++k) monotone = monotone && errors[k] < errors[k - 1];
    r.passed = errors.back() <= 2e-2 && monotone;
    r.detail = detail::format("max errors n=25,50,100,200: %.3e %.3e %.3e %.3e (tol 2e-2 at 200, monotone: %s)",
                              errors[0], errors[1], errors[2], errors[3], monotone ? "yes" : "no");
    return r;
}

inline CriterionResult criterion_bessel_closed_form(const VerifyOptions&) {
    CriterionResult r = detail::start(4, "hard-edge kernel equals the Bessel closed form");
    const MellinSpec spec = ginibre(0, std::nullopt, false);
    const auto grid = detail::linspace(0.25, 9.25, 10);
    double worst = 0.0;
    for (double y1 : grid)
        for (double y2 : grid)
            worst = std::max(worst, std::abs(polya_kernel_hard_edge(spec, y1, y2) - bessel_kernel_closed_form(y1, y2)));
    r.passed = worst <= 1e-8;
    r.detail = detail::format("10x10 grid on [0.25, 9.25]^2, max deviation %.2e (tol 1e-8)", worst);
    return r;
}

inline CriterionResult criterion_dual_route(const VerifyOptions&) {
    CriterionResult r = detail::start(5, "limiting product kernel equals the explicit density");
    // Series/contour transforms on the kernel side so the two routes share no
    // Bessel shortcut.
    const MellinSpec spec = ginibre(0, std::nullopt, false);
    double worst = 0.0;
    int points = 0;
    for (double x : {0.0, 1.0, 2.0, 3.0})
        for (double a : {0.5, 1.0, 2.0, 5.0, -0.5, -1.0, -2.0, -5.0}) {
            const bool edge = x * a < 0.0;
            const bool bulk = std::abs(x) < 2.0;
            if (!edge && !bulk) continue;
            const double d = ginibre_product_density(x, a);
            const double k = product_kernel_limit(spec, x, a, a);
            worst = std::max(worst, std::abs(d - k));
            ++points;
        }
    r.passed = worst <= 1e-6;
    r.detail = detail::format("%d points, max |density - kernel| = %.2e (tol 1e-6)", points, worst);
    return r;
}

inline CriterionResult criterion_figure_reproduction(const VerifyOptions& opt) {
    CriterionResult r = detail::start(6, "Monte Carlo hard-edge histograms match the limiting density");
    struct Case {
        int n;
        double x;
        double tol;
    };
    std::string summary;
    bool ok = true;
    for (const Case c : {Case{100, 0.0, 0.08}, Case{100, 1.0, 0.08}, Case{100, 3.0, 0.08}, Case{400, 2.0, 0.15}}) {
        const HistogramResult h = run_hard_edge_experiment(detail::product_config(opt, c.n, c.x));
        ok = ok && h.l1_distance <= c.tol;
        summary += detail::format("%sx=%g n=%d L1=%.4f (tol %.2f)", summary.empty() ? "" : ", ", c.x, c.n,
                                 h.l1_distance, c.tol);
    }
    r.passed = ok;
    r.detail = summary;
    return r;
}

inline CriterionResult criterion_finite_product(const VerifyOptions& opt) {
    CriterionResult r = detail::start(7, "finite-n product kernel matches Monte Carlo at n = 16");
    ExperimentConfig c = detail::product_config(opt, 16, 1.0);
    c.curve = AnalyticCurve::finite_n;
    const HistogramResult h = run_hard_edge_experiment(c);
    r.passed = h.l1_distance <= 0.1;
    r.detail = detail::format("x=1 n=16 L1=%.4f (tol 0.1)", h.l1_distance);
    return r;
}

inline CriterionResult criterion_rate_ordering(const VerifyOptions& opt) {
    CriterionResult r = detail::start(8, "convergence is slower at the soft edge and improves with n");
    ExperimentConfig base = detail::product_config(opt, 100, 1.0);
    const auto sweep = convergence_sweep(1.0, {25, 50, 100, 200}, opt.mc_samples, opt.seed, base);
    const double l1_x1 = sweep[2].l1_distance;
    const double l1_x2 = run_hard_edge_experiment(detail::product_config(opt, 100, 2.0)).l1_distance;
    bool decreasing = true;
    for (std::size_t k = 1; k < sweep.size(); ++k)
        decreasing = decreasing && sweep[k].l1_distance <= 1.1 * sweep[k - 1].l1_distance;
    r.passed = decreasing && l1_x2 > l1_x1;
    r.detail = detail::format("L1(x=1) n=25,50,100,200: %.4f %.4f %.4f %.4f (10%% allowance: %s); "
                              "n=100 L1(x=2)=%.4f vs L1(x=1)=%.4f",
                              sweep[0].l1_distance, sweep[1].l1_distance, sweep[2].l1_distance,
                              sweep[3].l1_distance, decreasing ? "ok" : "violated", l1_x2, l1_x1);
    return r;
}

inline CriterionResult criterion_sampler_moments(const VerifyOptions& opt) {
    CriterionResult r = detail::start(9, "sampler moments and the semicircle");
    constexpr int n = 50;
    constexpr int draws = 200;
    std::vector<double> tr_h(draws), tr_g(draws);
    parallel_for(draws, opt.threads, [&](long i, int) {
        Philox4x32 rng = RngState{opt.seed, static_cast<std::uint64_t>(i)}.engine();
        tr_h[i] = sample_gue(n, rng).squaredNorm();
        tr_g[i] = sample_ginibre(n, rng).squaredNorm();
    });
    double mh = 0.0, mg = 0.0;
    for (int i = 0; i < draws; ++i) {
        mh += tr_h[i];
        mg += tr_g[i];
    }
    mh /= draws * std::pow(n, 3);
    mg /= draws * std::pow(n, 2);

    ExperimentConfig c;
    c.ensemble = ExperimentKind::gue_bulk;
    c.n = 200;
    c.samples = 100;
    c.lo = -2.5;
    c.hi = 2.5;
    c.bins = 50;
    c.seed = opt.seed;
    c.parallelism = opt.threads;
    const double l1 = run_gue_bulk(c).l1_distance;
    r.passed = std::abs(mh - 1.0) <= 0.05 && std::abs(mg - 1.0) <= 0.05 && l1 <= 0.05;
    r.detail = detail::format("E tr H^2/n^3 = %.4f, E tr GG*/n^2 = %.4f (1 +- 0.05), semicircle L1 = %.4f (tol 0.05)",
                              mh, mg, l1);
    return r;
}

inline CriterionResult criterion_transform_identities(const VerifyOptions& opt) {
    CriterionResult r = detail::start(10, "transform identities");
    const MellinSpec spec = ginibre(0, std::nullopt, false);
    TransformOptions t1 = detail::raw_transforms();
    TransformOptions t2 = t1;
    t1.tilt = 0.3;
    t2.tilt = 0.6;

    double tilt_dev = 0.0;
    for (cplx z : {cplx(2.0, 1.0), cplx(-1.0, 0.5), cplx(0.3, 3.0), cplx(-4.0, 2.0), cplx(1.5, -0.5)})
        tilt_dev = std::max(tilt_dev, std::abs(komega(spec, z, t1) - komega(spec, z, t2)));
    for (double y : {0.5, 2.0, 7.0})
        tilt_dev = std::max(tilt_dev, std::abs(jtilde(spec, y, t1) - jtilde(spec, y, t2)));

    // (i / 2 pi) [K(iy + eps) - K(iy - eps)] approaches J~(y) as eps -> 0.
    const TransformOptions raw = detail::raw_transforms();
    constexpr double eps = 1e-8;
    double cut_dev = 0.0;
    for (double y : {0.5, 2.0, 7.0}) {
        const cplx jump = komega(spec, cplx(eps, y), raw) - komega(spec, cplx(-eps, y), raw);
        const cplx limit = I_unit / (2.0 * std::numbers::pi) * jump;
        cut_dev = std::max(cut_dev, std::abs(limit - jtilde(spec, y, raw)));
    }

    // |J omega(z)| <= C~ e^{|z|} with C~ = sup_j 1/M omega(j).
    const double c_tilde = check_admissibility(spec).c_tilde;
    Philox4x32 rng(opt.seed, 0);
    double worst_ratio = 0.0;
    for (int k = 0; k < 100; ++k) {
        const double rad = 10.0 * std::sqrt(rng.uniform());
        const cplx z = std::polar(rad, 2.0 * std::numbers::pi * rng.uniform());
        worst_ratio = std::max(worst_ratio, std::abs(jomega(spec, z, raw)) / (c_tilde * std::exp(std::abs(z))));
    }
    r.passed = tilt_dev <= 1e-7 && cut_dev <= 1e-4 && worst_ratio <= 1.0;
    r.detail = detail::format("tilt 0.3 vs 0.6 dev %.2e (tol 1e-7), cut jump vs J~ dev %.2e (tol 1e-4), "
                              "max |J|/(C e^|z|) = %.3f (<= 1)",
                              tilt_dev, cut_dev, worst_ratio);
    return r;
}

inline CriterionResult run_criterion(int id, const VerifyOptions& opt) {
    using Runner = CriterionResult (*)(const VerifyOptions&);
    static constexpr Runner runners[] = {criterion_saddle_green,        criterion_sine_kernel,
                                         criterion_polya_hard_edge,     criterion_bessel_closed_form,
                                         criterion_dual_route,          criterion_figure_reproduction,
                                         criterion_finite_product,      criterion_rate_ordering,
                                         criterion_sampler_moments,     criterion_transform_identities};
    if (id < 1 || id > 10) throw std::invalid_argument("run_criterion: id must be in 1..10");
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
        r = runners[id - 1](opt);
    } catch (const std::exception& e) {
        r.id = id;
        r.name = "criterion " + std::to_string(id);
        r.passed = false;
        r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

/// "fast" skips the Monte Carlo histogram criteria 6-8; "full" runs all ten.
inline std::vector<int> suite_criteria(const std::string& suite) {
    if (suite == "fast") return {1, 2, 3, 4, 5, 9, 10};
    if (suite == "full") return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    throw std::invalid_argument("unknown suite '" + suite + "'");
}

inline std::string format_result(const CriterionResult& r) {
    return detail::format("[%s] %2d %s: %s (%.1f s)", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(),
                          r.detail.c_str(), r.seconds);
}

}  // namespace hardedge
