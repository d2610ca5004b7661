#pragma once

// Deterministic quadrature: adaptive Gauss-Legendre panels, periodic
// trapezoid on the unit circle, truncated real lines and two-ray tilted
// contours.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <numbers>
#include <queue>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hardedge/complexmath.hpp"
#include "hardedge/errors.hpp"
#include "hardedge/gauss_legendre.hpp"

namespace hardedge {

enum class RuleKind { gauss_legendre_panels, circle_trapezoid, real_line_truncated, tilted_rays };

/// A fixed rule: sum_k weights[k] * f(nodes[k]) approximates the integral.
/// For circle-trapezoid rules the weights are 1/m, i.e. the rule is the mean
/// over the circle, equal to the contour integral of f(z)/(2 pi i z).
struct QuadratureRule {
    RuleKind kind = RuleKind::gauss_legendre_panels;
    std::vector<cplx> nodes;
    std::vector<cplx> weights;
    double tolerance = 0.0;

    template <class F>
    cplx apply(F&& f) const {
        cplx acc = 0.0;
        for (std::size_t k = 0; k < nodes.size(); ++k) acc += weights[k] * f(nodes[k]);
        return acc;
    }
};

inline constexpr int gl_order = 16;

inline QuadratureRule gauss_legendre_rule(double a, double b, int panels) {
    const auto& gl = GaussLegendre<gl_order>::get();
    QuadratureRule r;
    r.kind = RuleKind::gauss_legendre_panels;
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        for (int i = 0; i < gl_order; ++i) {
            r.nodes.emplace_back(mid + 0.5 * h * gl.x[i]);
            r.weights.emplace_back(0.5 * h * gl.w[i]);
        }
    }
    return r;
}

/// Nodes at angles 2 pi (k + 1/2)/m, so no node sits on the real axis.
inline QuadratureRule circle_rule(int m) {
    QuadratureRule r;
    r.kind = RuleKind::circle_trapezoid;
    for (int k = 0; k < m; ++k) {
        r.nodes.push_back(std::polar(1.0, 2.0 * std::numbers::pi * (k + 0.5) / m));
        r.weights.emplace_back(1.0 / m);
    }
    return r;
}

/// Line t - i*shift, |t| <= half_width, with Gauss-Legendre panels; weights
/// are the real dt weights.
inline QuadratureRule real_line_rule(double half_width, double shift, int panels) {
    QuadratureRule r = gauss_legendre_rule(-half_width, half_width, panels);
    r.kind = RuleKind::real_line_truncated;
    for (auto& z : r.nodes) z = cplx(z.real(), -shift);
    return r;
}

/// Rays s -> exp(i sign(s) theta) s for |s| <= s_max; weights carry the
/// Jacobian exp(i sign(s) theta).
inline QuadratureRule tilted_ray_rule(double theta, double s_max, int panels_per_ray) {
    QuadratureRule r;
    r.kind = RuleKind::tilted_rays;
    const QuadratureRule half = gauss_legendre_rule(0.0, s_max, panels_per_ray);
    for (int sign : {-1, 1}) {
        const cplx dir = std::polar(1.0, sign * theta);
        for (std::size_t k = 0; k < half.nodes.size(); ++k) {
            r.nodes.push_back(dir * (sign * half.nodes[k].real()));
            r.weights.push_back(dir * half.weights[k]);
        }
    }
    return r;
}

namespace detail {

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(cplx v) { return std::abs(v); }
template <class Derived>
double magnitude(const Eigen::MatrixBase<Derived>& v) {
    return v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
}

inline std::string fmt_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

template <class F>
auto gl_panel(F& f, double a, double b) {
    const auto& gl = GaussLegendre<gl_order>::get();
    const double mid = 0.5 * (a + b);
    const double hw = 0.5 * (b - a);
    using V = std::decay_t<decltype(f(a))>;
    V acc = f(mid + hw * gl.x[0]) * (hw * gl.w[0]);
    for (int i = 1; i < gl_order; ++i) acc += f(mid + hw * gl.x[i]) * (hw * gl.w[i]);
    return acc;
}

}  // namespace detail

struct IntervalOptions {
    int max_level = 20;
    int max_panels = 20000;
    int initial_panels = 1;
};

/// Globally adaptive Gauss-Legendre integration of f over [a, b]. The value
/// type of f may be double, cplx or an Eigen vector. Each panel's error is
/// the difference between its 16-point estimate and the sum over its halves;
/// the worst panel is bisected until the total drops below tol.
template <class F>
auto integrate_interval(F&& f, double a, double b, double tol, IntervalOptions opt = {}) {
    using V = std::decay_t<decltype(f(a))>;
    if (!(a < b)) throw std::invalid_argument("integrate_interval: requires a < b");
    struct Panel {
        double a, b;
        int level;
        V value;
        double err;
        V left, right;
        double mass;  // |left| + |right|, sets the rounding floor
    };
    auto make = [&](double lo, double hi, int level, const V& whole) {
        const double mid = 0.5 * (lo + hi);
        V left = detail::gl_panel(f, lo, mid);
        V right = detail::gl_panel(f, mid, hi);
        V halves = left + right;
        const double err = detail::magnitude(V(whole - halves));
        const double mass = detail::magnitude(left) + detail::magnitude(right);
        return Panel{lo, hi, level, halves, err, left, right, mass};
    };
    auto cmp = [](const Panel& p, const Panel& q) { return p.err < q.err; };
    std::priority_queue<Panel, std::vector<Panel>, decltype(cmp)> heap(cmp);
    const double h0 = (b - a) / opt.initial_panels;
    for (int p = 0; p < opt.initial_panels; ++p) {
        const double lo = a + p * h0;
        const double hi = (p + 1 == opt.initial_panels) ? b : lo + h0;
        heap.push(make(lo, hi, 0, detail::gl_panel(f, lo, hi)));
    }
    int count = opt.initial_panels;
    auto current = [&]() {
        // Sum in order of position so the result does not depend on heap layout.
        std::vector<Panel> all;
        all.reserve(heap.size());
        auto copy = heap;
        while (!copy.empty()) {
            all.push_back(copy.top());
            copy.pop();
        }
        std::sort(all.begin(), all.end(), [](const Panel& p, const Panel& q) { return p.a < q.a; });
        V total = all.front().value;
        double err = all.front().err;
        for (std::size_t k = 1; k < all.size(); ++k) {
            total += all[k].value;
            err += all[k].err;
        }
        return std::make_pair(total, err);
    };
    // Below a few dozen eps times the summed panel magnitudes the error
    // estimate is rounding noise from the integrand itself.
    constexpr double floor_rel = 64.0 * std::numeric_limits<double>::epsilon();
    double err = 0.0, mass = 0.0;
    {
        auto copy = heap;
        while (!copy.empty()) {
            err += copy.top().err;
            mass += copy.top().mass;
            copy.pop();
        }
    }
    for (;;) {
        if (err <= std::max(tol, floor_rel * mass)) {
            auto [total, exact_err] = current();
            if (exact_err <= std::max(tol, floor_rel * mass)) return total;
            err = exact_err;
        }
        Panel worst = heap.top();
        if (worst.level >= opt.max_level || count >= opt.max_panels)
            throw quadrature_error("integrate_interval: no convergence on [" + std::to_string(a) + ", " +
                                   std::to_string(b) + "], error estimate " + detail::fmt_g(err));
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        Panel left = make(worst.a, mid, worst.level + 1, worst.left);
        Panel right = make(mid, worst.b, worst.level + 1, worst.right);
        err += left.err + right.err - worst.err;
        mass += left.mass + right.mass - worst.mass;
        heap.push(std::move(left));
        heap.push(std::move(right));
        ++count;
    }
}

/// Contour integral over |z| = 1 of f(z) dz / (2 pi i) with the m-point
/// trapezoid rule: (1/m) sum f(z_k) z_k.
template <class F>
cplx integrate_circle(F&& f, int m) {
    if (m < 1) throw std::invalid_argument("integrate_circle: m must be positive");
    cplx acc = 0.0;
    for (int k = 0; k < m; ++k) {
        const cplx z = std::polar(1.0, 2.0 * std::numbers::pi * (k + 0.5) / m);
        acc += f(z) * z;
    }
    return acc / static_cast<double>(m);
}

/// Taylor coefficients c_k = (1/2 pi i) contour integral of f(z) z^{-k-1} dz,
/// k = 0..count-1, from m >= count samples on the unit circle.
template <class F>
Eigen::VectorXcd circle_taylor_coefficients(F&& f, int count, int m) {
    std::vector<cplx> nodes(m), values(m);
    for (int j = 0; j < m; ++j) {
        nodes[j] = std::polar(1.0, 2.0 * std::numbers::pi * (j + 0.5) / m);
        values[j] = f(nodes[j]);
    }
    Eigen::VectorXcd c(count);
    std::vector<cplx> power(values);  // f(z_j) z_j^{-k}
    for (int k = 0; k < count; ++k) {
        cplx acc = 0.0;
        for (int j = 0; j < m; ++j) {
            acc += power[j];
            power[j] *= std::conj(nodes[j]);
        }
        c[k] = acc / static_cast<double>(m);
    }
    return c;
}

struct TiltedOptions {
    double panel_width = 1.0;
    // Stop marching outward once |g| and the panel contribution both fall
    // below tol * stop_fraction on two consecutive panels.
    double stop_fraction = 1e-3;
};

namespace detail {

// int_0^{s_max} g(s) ds + int_0^{s_max} g(-s) ds, marching outward in panels
// and stopping once the integrand has died off.
template <class F>
cplx integrate_two_sided(F& g, double s_max, double tol, const TiltedOptions& opt, const char* who) {
    const int max_panels = std::max(1, static_cast<int>(std::ceil(s_max / opt.panel_width)));
    // Only a few dozen panels carry weight before the super-exponential decay.
    const double panel_tol = tol / 64.0;
    const double quiet = tol * opt.stop_fraction;
    cplx total = 0.0;
    for (int sign : {1, -1}) {
        int quiet_run = 0;
        bool stopped = false;
        for (int p = 0; p < max_panels; ++p) {
            const double lo = p * opt.panel_width;
            const double hi = std::min(s_max, lo + opt.panel_width);
            auto on_ray = [&](double s) -> cplx { return g(sign * s); };
            const cplx part = integrate_interval(on_ray, lo, hi, panel_tol);
            total += part;
            if (std::abs(part) < quiet && std::abs(g(sign * hi)) < quiet) {
                if (++quiet_run >= 2 && hi >= 2.0) {
                    stopped = true;
                    break;
                }
            } else {
                quiet_run = 0;
            }
        }
        const double tail = std::abs(g(sign * s_max));
        if (!stopped && tail > tol)
            throw quadrature_error(std::string(who) + ": integrand tail " + std::to_string(tail) +
                                   " exceeds tolerance at s_max");
    }
    return total;
}

}  // namespace detail

/// Sum of the two ray integrals int_0^{s_max} g(s) ds + int_{-s_max}^0 g(s) ds,
/// where g already includes the ray Jacobian exp(i sign(s) theta). Panels
/// are added outward from the origin until the integrand has died off.
template <class F>
cplx integrate_tilted_rays(F&& g, double theta, double s_max, double tol, TiltedOptions opt = {}) {
    if (!(theta > 0.0 && theta < 0.5 * std::numbers::pi))
        throw std::invalid_argument("integrate_tilted_rays: theta must lie in (0, pi/2)");
    return detail::integrate_two_sided(g, s_max, tol, opt, "integrate_tilted_rays");
}

/// Same marching scheme on the untilted real line.
template <class F>
cplx integrate_real_line(F&& g, double s_max, double tol, TiltedOptions opt = {}) {
    return detail::integrate_two_sided(g, s_max, tol, opt, "integrate_real_line");
}

/// Default truncation for tilted rays, s_max = 40 + 10 |ln tol|.
inline double default_s_max(double tol) { return 40.0 + 10.0 * std::abs(std::log(tol)); }

}  // namespace hardedge
