#pragma once

// Monte Carlo harness: sample spectra, bin them on a window and compare with
// the analytic density from the kernels module.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "hardedge/errors.hpp"
#include "hardedge/gauss_legendre.hpp"
#include "hardedge/kernels.hpp"
#include "hardedge/polya.hpp"
#include "hardedge/rmt.hpp"

namespace hardedge {

class empty_window_error : public numeric_error {
public:
    using numeric_error::numeric_error;
};

enum class ExperimentKind { product, gue_bulk, ginibre_hard_edge };

inline std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::product: return "product";
        case ExperimentKind::gue_bulk: return "gue-bulk";
        case ExperimentKind::ginibre_hard_edge: return "ginibre-hard-edge";
    }
    return "unknown";
}

// How the analytic curve is reduced to one number per bin.
enum class AnalyticMode { bin_average, bin_center };

// Product ensemble only: compare with the n -> infinity density or with the
// finite-n kernel diagonal at the same n.
enum class AnalyticCurve { limit, finite_n };

struct ExperimentConfig {
    ExperimentKind ensemble = ExperimentKind::product;
    int n = 100;
    long samples = 10000;
    double x = 0.0;
    double lo = -12.0;
    double hi = 12.0;
    int bins = 24;
    std::uint64_t seed = 1;
    int parallelism = 1;
    AnalyticMode analytic_mode = AnalyticMode::bin_average;
    AnalyticCurve curve = AnalyticCurve::limit;

    void validate() const {
        if (n < 1) throw std::invalid_argument("experiment: n must be positive");
        if (samples < 1) throw std::invalid_argument("experiment: samples must be positive");
        if (!(lo < hi)) throw std::invalid_argument("experiment: window requires lo < hi");
        if (bins < 10) throw std::invalid_argument("experiment: bins must be at least 10");
        if (parallelism < 1) throw std::invalid_argument("experiment: parallelism must be positive");
        if (curve == AnalyticCurve::finite_n && ensemble == ExperimentKind::product && n > 64)
            throw std::invalid_argument("experiment: finite-n product curve supports n <= 64");
    }
};

struct HistogramResult {
    std::vector<double> bin_edges;
    std::vector<std::int64_t> counts;
    std::vector<double> density;   // counts / (samples * width), and / n for gue-bulk
    std::vector<double> analytic;
    double l1_distance = 0.0;
    double sup_distance = 0.0;
    std::int64_t in_window = 0;
    double second_moment = 0.0;     // mean over samples of (1/n) sum of scaled eigenvalues squared
    std::vector<double> min_scaled; // smallest scaled eigenvalue of each sample
    ExperimentConfig config;
};

/// Runs body(i) for i = 0..count-1 on `threads` workers; body must only
/// touch state owned by index i or by the worker slot it is given.
template <class F>
void parallel_for(long count, int threads, F&& body) {
    threads = static_cast<int>(std::max<long>(1, std::min<long>(threads, count)));
    std::atomic<long> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto worker = [&](int slot) {
        for (;;) {
            const long i = next.fetch_add(1);
            if (i >= count || failed.load()) return;
            try {
                body(i, slot);
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
                return;
            }
        }
    };
    if (threads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
}

namespace detail {

inline Ensemble sampled_ensemble(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::product: return Ensemble::product;
        case ExperimentKind::gue_bulk: return Ensemble::gue;
        case ExperimentKind::ginibre_hard_edge: return Ensemble::ginibre_squared;
    }
    return Ensemble::product;
}

inline double scale_factor(const ExperimentConfig& cfg) {
    switch (cfg.ensemble) {
        case ExperimentKind::product: return 1.0;
        case ExperimentKind::gue_bulk: return 1.0 / cfg.n;
        case ExperimentKind::ginibre_hard_edge: return static_cast<double>(cfg.n);
    }
    return 1.0;
}

// Histogram counts per sample are compared against a one-point function on
// the hard-edge scales, but against a per-eigenvalue density for the bulk.
inline double count_normalizer(const ExperimentConfig& cfg) {
    return cfg.ensemble == ExperimentKind::gue_bulk ? static_cast<double>(cfg.n) : 1.0;
}

inline std::function<double(double)> analytic_curve(const ExperimentConfig& cfg) {
    switch (cfg.ensemble) {
        case ExperimentKind::product:
            if (cfg.curve == AnalyticCurve::finite_n) {
                const MellinSpec spec = ginibre(0, cfg.n);
                const double x = cfg.x;
                return [spec, x](double a) { return product_kernel_finite(spec, x, a, a); };
            }
            return [x = cfg.x](double a) { return ginibre_product_density(x, a); };
        case ExperimentKind::gue_bulk:
            return [](double a) { return semicircle(a); };
        case ExperimentKind::ginibre_hard_edge: {
            const MellinSpec spec = ginibre(0);
            return [spec](double y) { return y > 0.0 ? polya_kernel_hard_edge(spec, y, y) : 0.0; };
        }
    }
    throw std::logic_error("analytic_curve: unknown ensemble");
}

inline std::vector<double> analytic_per_bin(const ExperimentConfig& cfg, const std::vector<double>& edges) {
    const auto curve = analytic_curve(cfg);
    std::vector<double> out(cfg.bins);
    const auto& gl = GaussLegendre<8>::get();
    for (int b = 0; b < cfg.bins; ++b) {
        const double mid = 0.5 * (edges[b] + edges[b + 1]);
        if (cfg.analytic_mode == AnalyticMode::bin_center) {
            out[b] = curve(mid);
            continue;
        }
        const double hw = 0.5 * (edges[b + 1] - edges[b]);
        double acc = 0.0;
        for (int i = 0; i < 8; ++i) acc += 0.5 * gl.w[i] * curve(mid + hw * gl.x[i]);
        out[b] = acc;
    }
    return out;
}

}  // namespace detail

/// Samples cfg.samples spectra (stream = sample index), bins the scaled
/// eigenvalues in [lo, hi) and compares with the analytic curve.
inline HistogramResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    HistogramResult r;
    r.config = cfg;
    const int bins = cfg.bins;
    const double width = (cfg.hi - cfg.lo) / bins;
    r.bin_edges.resize(bins + 1);
    for (int b = 0; b <= bins; ++b) r.bin_edges[b] = cfg.lo + b * width;
    r.bin_edges[bins] = cfg.hi;

    const Ensemble ens = detail::sampled_ensemble(cfg.ensemble);
    const double scale = detail::scale_factor(cfg);
    const int threads = static_cast<int>(std::min<long>(cfg.parallelism, cfg.samples));
    std::vector<std::vector<std::int64_t>> slot_counts(threads, std::vector<std::int64_t>(bins, 0));
    std::vector<double> sq_mean(cfg.samples);
    r.min_scaled.assign(cfg.samples, 0.0);

    parallel_for(cfg.samples, threads, [&](long i, int slot) {
        const SpectralSample s =
            sample_spectrum(ens, cfg.n, cfg.x, RngState{cfg.seed, static_cast<std::uint64_t>(i)});
        auto& counts = slot_counts[slot];
        double sq = 0.0;
        for (double ev : s.eigenvalues) {
            const double v = scale * ev;
            sq += v * v;
            if (v < cfg.lo || v >= cfg.hi) continue;
            const auto it = std::upper_bound(r.bin_edges.begin(), r.bin_edges.end(), v);
            const int b = std::clamp(static_cast<int>(it - r.bin_edges.begin()) - 1, 0, bins - 1);
            ++counts[b];
        }
        sq_mean[i] = sq / cfg.n;
        r.min_scaled[i] = scale * s.eigenvalues.front();
    });

    r.counts.assign(bins, 0);
    for (const auto& c : slot_counts)
        for (int b = 0; b < bins; ++b) r.counts[b] += c[b];
    for (auto c : r.counts) r.in_window += c;
    if (r.in_window == 0) throw empty_window_error("experiment: no eigenvalue fell inside the window");

    double sq_total = 0.0;
    for (double v : sq_mean) sq_total += v;
    r.second_moment = sq_total / cfg.samples;

    // Widths are taken from the stored edges so the distances can be
    // recomputed exactly from a written histogram.
    r.density.resize(bins);
    const double per = static_cast<double>(cfg.samples) * detail::count_normalizer(cfg);
    for (int b = 0; b < bins; ++b) {
        const double w = r.bin_edges[b + 1] - r.bin_edges[b];
        r.density[b] = static_cast<double>(r.counts[b]) / (per * w);
    }
    r.analytic = detail::analytic_per_bin(cfg, r.bin_edges);
    for (int b = 0; b < bins; ++b) {
        const double d = std::abs(r.density[b] - r.analytic[b]);
        r.l1_distance += d * (r.bin_edges[b + 1] - r.bin_edges[b]);
        r.sup_distance = std::max(r.sup_distance, d);
    }
    return r;
}

/// Product ensemble G(H - n x)G*, eigenvalues binned without rescaling.
inline HistogramResult run_hard_edge_experiment(ExperimentConfig cfg) {
    if (cfg.ensemble != ExperimentKind::product)
        throw std::invalid_argument("run_hard_edge_experiment: requires the product ensemble");
    return run_experiment(cfg);
}

/// Squared singular values of Ginibre scaled by n, against the Bessel-kernel diagonal.
inline HistogramResult run_ginibre_hard_edge(ExperimentConfig cfg) {
    if (cfg.ensemble != ExperimentKind::ginibre_hard_edge)
        throw std::invalid_argument("run_ginibre_hard_edge: requires the ginibre-hard-edge ensemble");
    return run_experiment(cfg);
}

/// GUE eigenvalues scaled by 1/n, against the semicircle.
inline HistogramResult run_gue_bulk(ExperimentConfig cfg) {
    if (cfg.ensemble != ExperimentKind::gue_bulk)
        throw std::invalid_argument("run_gue_bulk: requires the gue-bulk ensemble");
    return run_experiment(cfg);
}

struct SweepPoint {
    int n;
    double l1_distance;
};

/// Product-ensemble L1 distance to the limiting density for each n.
inline std::vector<SweepPoint> convergence_sweep(double x, const std::vector<int>& ns, long samples,
                                                 std::uint64_t seed, ExperimentConfig base = {}) {
    if (ns.empty()) throw std::invalid_argument("convergence_sweep: empty n list");
    for (std::size_t k = 1; k < ns.size(); ++k)
        if (ns[k] <= ns[k - 1]) throw std::invalid_argument("convergence_sweep: n values must increase");
    std::vector<SweepPoint> out;
    base.ensemble = ExperimentKind::product;
    base.curve = AnalyticCurve::limit;
    base.x = x;
    base.samples = samples;
    base.seed = seed;
    for (int n : ns) {
        base.n = n;
        out.push_back({n, run_hard_edge_experiment(base).l1_distance});
    }
    return out;
}

}  // namespace hardedge
