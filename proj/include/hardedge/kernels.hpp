#pragma once

// Correlation kernels and densities: GUE macroscopics, the finite-n GUE and
// product kernels, the Polya kernel and its hard-edge limit, the limiting
// product kernel and the Ginibre hard-edge density.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hardedge/complexmath.hpp"
#include "hardedge/polya.hpp"
#include "hardedge/quadrature.hpp"

namespace hardedge {

struct GueMacro {
    double x = 0.0;
    cplx green;
    double density = 0.0;
    cplx saddle_plus;
    cplx saddle_minus;
    double radius = 0.0;
};

/// Green function, semicircle density and saddle points at position x. For
/// |x| > 2 the root is taken with sign(x) so that G(x) ~ 1/x.
inline GueMacro gue_macro(double x) {
    GueMacro m;
    m.x = x;
    const double ax = std::abs(x);
    if (ax <= 2.0) {
        const double root = std::sqrt(std::max(0.0, 4.0 - x * x));
        m.green = cplx(0.5 * x, -0.5 * root);
        m.density = 0.5 * root / std::numbers::pi;
        m.saddle_plus = cplx(0.5 * root, -0.5 * x);
        m.saddle_minus = cplx(-0.5 * root, -0.5 * x);
    } else {
        const double sgn = x > 0 ? 1.0 : -1.0;
        const double root = std::sqrt(x * x - 4.0);
        m.green = 0.5 * (x - sgn * root);
        m.density = 0.0;
        m.saddle_plus = cplx(0.0, -0.5 * (x + sgn * root));
        m.saddle_minus = cplx(0.0, -0.5 * (x - sgn * root));
    }
    m.radius = std::abs(m.saddle_minus);
    return m;
}

/// Semicircle density on the macroscopic scale.
inline double semicircle(double x) { return gue_macro(x).density; }

/// Bulk sine kernel with density rho: sin(pi rho d)/(pi d), d = a1 - a2.
inline double sine_kernel(double a1, double a2, double rho = 1.0 / std::numbers::pi) {
    const double d = a1 - a2;
    if (d == 0.0) return rho;
    return std::sin(std::numbers::pi * rho * d) / (std::numbers::pi * d);
}

struct KernelOptions {
    double tol = 1e-11;
    int circle_nodes = 512;
    TransformOptions transforms;
    // Product kernel only: move the z-line through the saddle points, adding
    // the slit term if it crosses the cut. Off keeps the line near the axis.
    bool saddle_line = true;
};

namespace detail {

// Taylor coefficients c_0..c_{count-1} of f. Coefficient k is read off a
// circle of radius R_k with n R^2 + b R = k, which balances the growth of f
// against R^{-k} and keeps every coefficient at relative accuracy.
template <class F>
Eigen::VectorXcd scaled_taylor_coefficients(F& f, int count, int m, double quad, double lin) {
    Eigen::VectorXcd c(count);
    std::vector<cplx> unit(m);
    for (int j = 0; j < m; ++j) unit[j] = std::polar(1.0, 2.0 * std::numbers::pi * (j + 0.5) / m);
    std::vector<cplx> phase(m, cplx(1.0));  // unit[j]^{-k}
    for (int k = 0; k < count; ++k) {
        double r = k == 0 ? 0.0 : (-lin + std::sqrt(lin * lin + 4.0 * quad * k)) / (2.0 * quad);
        r = std::clamp(r, 1e-2, 1.0);
        cplx acc = 0.0;
        for (int j = 0; j < m; ++j) {
            acc += f(r * unit[j]) * phase[j];
            phase[j] *= std::conj(unit[j]);
        }
        c[k] = acc / (static_cast<double>(m) * std::pow(r, k));
    }
    return c;
}

inline cplx horner(const Eigen::VectorXcd& c, cplx z) {
    cplx acc = 0.0;
    for (Eigen::Index k = c.size() - 1; k >= 0; --k) acc = acc * z + c[k];
    return acc;
}

// Rounding floor of int g(z) sum_k c_k z^k dt: the Taylor polynomial cancels
// heavily away from the origin when x != 0, so the attainable tolerance is
// eps * int |g(z)| sum_k |c_k| |z|^k dt, estimated on a coarse grid.
template <class G, class Z>
double taylor_line_noise(const Eigen::VectorXcd& c, G& g_abs, Z& z_of, double half) {
    constexpr int samples = 400;
    const double h = 2.0 * half / samples;
    double acc = 0.0;
    for (int i = 0; i < samples; ++i) {
        const cplx z = z_of(-half + (i + 0.5) * h);
        double poly = 0.0;
        for (Eigen::Index k = c.size() - 1; k >= 0; --k) poly = poly * std::abs(z) + std::abs(c[k]);
        acc += g_abs(z) * poly * h;
    }
    return 64.0 * std::numeric_limits<double>::epsilon() * acc;
}

// Half-width of the truncated z-line; the Gaussian factor e^{-n t^2/2} is
// below 1e-19 relative beyond it.
inline double line_half_width(int n, double x) {
    const GueMacro g = gue_macro(x);
    return std::max(4.0, std::sqrt(90.0 / n)) * std::max(1.0, std::abs(g.saddle_plus));
}

}  // namespace detail

/// Finite-n GUE kernel K_n(n x + a1, n x + a2) from the double contour integral
/// over |z'| = 1 and the real line. The factor [1-(z/z')^n]/(z'-z) is expanded
/// as sum_{k<n} z^k z'^{-k-1}, so the z'-integral yields the Taylor
/// polynomial of exp(n z'^2/2 + i a1 z') and the z-integral is one line
/// integral of that polynomial against exp(-n z^2/2 - i a2 z).
inline double gue_kernel_finite(int n, double a1, double a2, double x = 0.0, const KernelOptions& opt = {}) {
    if (n < 1) throw std::invalid_argument("gue_kernel_finite: n must be positive");
    const double b1 = n * x + a1;
    const double b2 = n * x + a2;
    auto f = [&](cplx z) { return std::exp(0.5 * n * z * z + I_unit * b1 * z); };
    const Eigen::VectorXcd c = detail::scaled_taylor_coefficients(f, n, opt.circle_nodes, n, std::abs(b1));
    const double half = detail::line_half_width(n, x);
    // The integrand is entire in z; running the line through the saddle points
    // keeps the Taylor polynomial from cancelling.
    const double im = gue_macro(x).saddle_minus.imag();
    auto g = [&](cplx z) { return std::exp(-0.5 * n * z * z - I_unit * b2 * z); };
    auto g_abs = [&](cplx z) { return std::abs(g(z)); };
    auto z_of = [im](double t) { return cplx(t, im); };
    auto integrand = [&](double t) -> cplx {
        const cplx z = z_of(t);
        return g(z) * detail::horner(c, z);
    };
    IntervalOptions io;
    io.initial_panels = 16;
    const double tol = std::max(opt.tol, detail::taylor_line_noise(c, g_abs, z_of, half));
    const cplx v = integrate_interval(integrand, -half, half, tol, io);
    return v.real() / (2.0 * std::numbers::pi);
}

/// Finite-n Polya kernel K_n(l1, l2) = int_0^1 p_{n-1}(l1 t) q_n(l2 t) dt.
inline double polya_kernel_finite(const MellinSpec& spec, double lam1, double lam2, const KernelOptions& opt = {}) {
    if (!spec.n) throw std::invalid_argument("polya_kernel_finite: requires finite n");
    if (!(lam1 > 0.0)) throw std::domain_error("polya_kernel_finite: requires lam1 > 0");
    if (!(lam2 > 0.0 && lam2 < 1.0)) throw std::domain_error("polya_kernel_finite: requires lam2 in (0, 1)");
    auto integrand = [&](double t) {
        return pn_poly(spec, lam1 * t, opt.transforms) * qn_weight(spec, lam2 * t, opt.transforms);
    };
    IntervalOptions io;
    io.initial_panels = 4;
    return integrate_interval(integrand, 0.0, 1.0, opt.tol, io);
}

/// Hard-edge Polya kernel int_0^1 J omega(i y1 t) J~omega(y2 t) dt at n = infinity.
/// y1 may have either sign (J omega is entire); y2 must be positive.
inline double polya_kernel_hard_edge(const MellinSpec& spec, double y1, double y2, const KernelOptions& opt = {}) {
    if (spec.n) throw std::invalid_argument("polya_kernel_hard_edge: requires n = infinity");
    if (!(y2 > 0.0)) throw std::domain_error("polya_kernel_hard_edge: requires y2 > 0");
    const JtildeTable jt(spec, y2, opt.transforms);
    auto integrand = [&](double t) { return (jomega(spec, cplx(0.0, y1 * t), opt.transforms) * jt(y2 * t)).real(); };
    IntervalOptions io;
    io.initial_panels = 2 + static_cast<int>(std::sqrt(std::abs(y1) + y2));
    return integrate_interval(integrand, 0.0, 1.0, opt.tol, io);
}

/// Ginibre (nu = 0) Bessel kernel in closed form,
/// [sqrt(y1) J1(2 sqrt y1) J0(2 sqrt y2) - sqrt(y2) J0(2 sqrt y1) J1(2 sqrt y2)] / (y1 - y2),
/// with the diagonal J0^2 + J1^2 at 2 sqrt(y).
inline double bessel_kernel_closed_form(double y1, double y2) {
    const double s1 = std::sqrt(y1);
    const double s2 = std::sqrt(y2);
    const double j01 = bessel_j(0, 2.0 * s1).real();
    const double j11 = bessel_j(1, 2.0 * s1).real();
    if (std::abs(y1 - y2) <= 1e-9 * std::max(1.0, std::abs(y1))) {
        return j01 * j01 + j11 * j11;
    }
    const double j02 = bessel_j(0, 2.0 * s2).real();
    const double j12 = bessel_j(1, 2.0 * s2).real();
    return (s1 * j11 * j02 - s2 * j01 * j12) / (y1 - y2);
}

/// Finite-n product kernel of G(H - n x)G* on the hard-edge scale. Same
/// geometric-series expansion as gue_kernel_finite, now with
/// f(z') = exp(n z'^2/2 + i n x z') J omega(a1 z') on the circle and
/// g(z) = exp(-n z^2/2 - i n x z) K omega(a2 z) on the line R - i sign(a2)/n.
///
/// The line is moved onto Im z = Im z_- through the saddle points. When that
/// crosses the cut z in i sign(a2) R_+ of K omega(a2 z), the slit between
/// the two lines contributes the jump, 2 pi int_0^{|c|} g P(i sign(a2) u)
/// J~omega(|a2| u) du with the K omega factor dropped from g.
inline double product_kernel_finite(const MellinSpec& spec, double x, double a1, double a2,
                                    const KernelOptions& opt = {}) {
    if (!spec.n) throw std::invalid_argument("product_kernel_finite: requires finite n");
    const int n = *spec.n;
    if (n > 64) throw std::domain_error("product_kernel_finite: n is capped at 64");
    if (a1 == 0.0 || a2 == 0.0) throw std::domain_error("product_kernel_finite: a1, a2 must be nonzero");
    auto f = [&](cplx z) {
        return std::exp(0.5 * n * z * z + I_unit * (n * x) * z) * jomega(spec, a1 * z, opt.transforms);
    };
    const Eigen::VectorXcd c =
        detail::scaled_taylor_coefficients(f, n, opt.circle_nodes, n, n * std::abs(x) + std::abs(a1));
    const double side = a2 > 0 ? 1.0 : -1.0;
    const double saddle_im = gue_macro(x).saddle_minus.imag();
    const bool crosses = opt.saddle_line && side * saddle_im > 1.0 / n;
    const double im = crosses           ? saddle_im
                      : opt.saddle_line ? -side * std::max(1.0 / n, std::abs(saddle_im))
                                        : -side / n;
    const double half = detail::line_half_width(n, x);
    auto gauss = [&](cplx z) { return std::exp(-0.5 * n * z * z - I_unit * (n * x) * z); };
    auto g = [&](cplx z) { return gauss(z) * komega(spec, a2 * z, opt.transforms); };
    auto g_abs = [&](cplx z) { return std::abs(g(z)); };
    auto z_of = [im](double t) { return cplx(t, im); };
    auto integrand = [&](double t) -> cplx {
        const cplx z = z_of(t);
        return g(z) * detail::horner(c, z);
    };
    IntervalOptions io;
    io.initial_panels = 32;  // even, so t = 0 (where the line may cross the cut) is a panel edge
    double tol = std::max(opt.tol, detail::taylor_line_noise(c, g_abs, z_of, half));
    cplx v = integrate_interval(integrand, -half, half, tol, io);
    if (crosses) {
        const double top = std::abs(saddle_im);
        auto slit = [&](double u) -> cplx {
            const cplx z = I_unit * (side * u);
            return gauss(z) * detail::horner(c, z) * jtilde(spec, std::abs(a2) * u, opt.transforms);
        };
        IntervalOptions so;
        so.initial_panels = 4;
        v += 2.0 * std::numbers::pi * integrate_interval(slit, 0.0, top, tol, so);
    }
    return v.real() / (2.0 * std::numbers::pi);
}

struct LimitParts {
    double edge = 0.0;      // Theta term: rescaled Polya hard-edge kernel
    double bulk = 0.0;      // semicircle-weighted J omega K omega integral
    double bulk_imag = 0.0;  // residual imaginary part of the bulk integral
    double total() const { return edge + bulk; }
};

namespace detail {

// int_{-1}^{1} h(t) dt, split at 0 with t = +-u^2 near the origin, where h may
// jump (cut of K omega) or carry a logarithmic singularity.
template <class H>
cplx integrate_split_at_zero(H& h, double tol) {
    auto right = [&](double u) -> cplx { return 2.0 * u * h(u * u); };
    auto left = [&](double u) -> cplx { return 2.0 * u * h(-u * u); };
    IntervalOptions io;
    io.initial_panels = 4;
    return integrate_interval(right, 0.0, 1.0, tol, io) + integrate_interval(left, 0.0, 1.0, tol, io);
}

}  // namespace detail

/// Limiting product kernel: the Theta term plus the semicircle term.
inline LimitParts product_kernel_limit_parts(const MellinSpec& spec, double x, double a1, double a2,
                                             const KernelOptions& opt = {}) {
    if (spec.n) throw std::invalid_argument("product_kernel_limit: requires n = infinity");
    if (a1 == 0.0 || a2 == 0.0) throw std::domain_error("product_kernel_limit: a1, a2 must be nonzero");
    const GueMacro g = gue_macro(x);
    const double re_g = g.green.real();
    LimitParts parts;
    if (-re_g * a2 > 0.0) {
        parts.edge = std::abs(re_g) * polya_kernel_hard_edge(spec, -re_g * a1, std::abs(re_g * a2), opt);
    }
    if (g.density > 0.0) {
        const double prho = std::numbers::pi * g.density;
        auto h = [&](double t) -> cplx {
            const cplx w(prho * t, -re_g);
            return jomega(spec, a1 * w, opt.transforms) * komega(spec, a2 * w, opt.transforms);
        };
        const cplx v = 0.5 * g.density * detail::integrate_split_at_zero(h, opt.tol);
        parts.bulk = v.real();
        parts.bulk_imag = v.imag();
    }
    return parts;
}

inline double product_kernel_limit(const MellinSpec& spec, double x, double a1, double a2,
                                   const KernelOptions& opt = {}) {
    return product_kernel_limit_parts(spec, x, a1, a2, opt).total();
}

/// Ginibre hard-edge density of G(H - n x)G* from the explicit Bessel formula:
/// Theta(-x a) |Re G| int_0^1 J0^2(sqrt(4 |Re G a| t)) dt
/// + Theta(2 - |x|) sqrt(1 - x^2/4)/pi int_{-1}^{1} I0(u) K0(u) dt,
/// u = sqrt(2 x a + 2 i sqrt(4 - x^2) a t).
inline LimitParts ginibre_product_density_parts(double x, double a, double tol = 1e-11) {
    if (a == 0.0) throw std::domain_error("ginibre_product_density: a must be nonzero");
    const GueMacro g = gue_macro(x);
    const double re_g = std::abs(g.green.real());
    LimitParts parts;
    if (x * a < 0.0) {
        const double c = 4.0 * std::abs(re_g * a);
        auto h = [&](double t) {
            const double j = bessel_j(0, std::sqrt(c * t)).real();
            return j * j;
        };
        IntervalOptions io;
        io.initial_panels = 2 + static_cast<int>(std::sqrt(c));
        parts.edge = re_g * integrate_interval(h, 0.0, 1.0, tol, io);
    }
    if (std::abs(x) < 2.0) {
        const double root = std::sqrt(4.0 - x * x);
        auto h = [&](double t) -> cplx {
            const cplx u = std::sqrt(cplx(2.0 * x * a, 2.0 * root * a * t));
            return bessel_i(0, u) * bessel_k(0, u);
        };
        const cplx v = (std::sqrt(1.0 - 0.25 * x * x) / std::numbers::pi) * detail::integrate_split_at_zero(h, tol);
        parts.bulk = v.real();
        parts.bulk_imag = v.imag();
    }
    return parts;
}

inline double ginibre_product_density(double x, double a, double tol = 1e-11) {
    return ginibre_product_density_parts(x, a, tol).total();
}

/// k-point correlation det[K(a_b, a_c)] for k <= 6 points.
inline double kpoint_correlation(const std::function<double(double, double)>& kernel, const std::vector<double>& points) {
    const int k = static_cast<int>(points.size());
    if (k < 1 || k > 6) throw std::invalid_argument("kpoint_correlation: need 1 <= k <= 6 points");
    Eigen::MatrixXd m(k, k);
    for (int b = 0; b < k; ++b)
        for (int c = 0; c < k; ++c) m(b, c) = kernel(points[b], points[c]);
    return m.determinant();
}

enum class KernelKind { gue_finite, polya_finite, polya_limit, product_finite, product_limit };

inline std::string to_string(KernelKind k) {
    switch (k) {
        case KernelKind::gue_finite: return "gue-finite";
        case KernelKind::polya_finite: return "polya-finite";
        case KernelKind::polya_limit: return "polya-limit";
        case KernelKind::product_finite: return "product-finite";
        case KernelKind::product_limit: return "product-limit";
    }
    return "unknown";
}

struct KernelGrid {
    std::vector<double> a1;
    std::vector<double> a2;
    Eigen::MatrixXd values;  // values(i, j) = K(a1[i], a2[j])
    KernelKind kind = KernelKind::product_limit;
    std::optional<int> n;
    double x = 0.0;
    std::string spec_id;
    double tol = 0.0;
};

/// Point evaluator for one kernel kind; n and x are taken from the arguments,
/// the Mellin data from spec (n overridden as required by the kind).
inline std::function<double(double, double)> kernel_evaluator(KernelKind kind, const MellinSpec& spec,
                                                              std::optional<int> n, double x,
                                                              const KernelOptions& opt = {}) {
    switch (kind) {
        case KernelKind::gue_finite: {
            if (!n) throw std::invalid_argument("gue-finite kernel needs n");
            const int nn = *n;
            return [nn, x, opt](double a1, double a2) { return gue_kernel_finite(nn, a1, a2, x, opt); };
        }
        case KernelKind::polya_finite: {
            if (!n) throw std::invalid_argument("polya-finite kernel needs n");
            const MellinSpec s = with_n(spec, n);
            return [s, opt](double l1, double l2) { return polya_kernel_finite(s, l1, l2, opt); };
        }
        case KernelKind::polya_limit: {
            const MellinSpec s = with_n(spec, std::nullopt);
            return [s, opt](double y1, double y2) { return polya_kernel_hard_edge(s, y1, y2, opt); };
        }
        case KernelKind::product_finite: {
            if (!n) throw std::invalid_argument("product-finite kernel needs n");
            const MellinSpec s = with_n(spec, n);
            return [s, x, opt](double a1, double a2) { return product_kernel_finite(s, x, a1, a2, opt); };
        }
        case KernelKind::product_limit: {
            const MellinSpec s = with_n(spec, std::nullopt);
            return [s, x, opt](double a1, double a2) { return product_kernel_limit(s, x, a1, a2, opt); };
        }
    }
    throw std::invalid_argument("unknown kernel kind");
}

inline KernelGrid evaluate_kernel_grid(KernelKind kind, const MellinSpec& spec, std::optional<int> n, double x,
                                       const std::vector<double>& a1, const std::vector<double>& a2,
                                       const KernelOptions& opt = {}) {
    KernelGrid grid;
    grid.a1 = a1;
    grid.a2 = a2;
    grid.kind = kind;
    grid.n = n;
    grid.x = x;
    grid.spec_id = spec.id;
    grid.tol = opt.tol;
    grid.values.resize(static_cast<Eigen::Index>(a1.size()), static_cast<Eigen::Index>(a2.size()));
    const auto k = kernel_evaluator(kind, spec, n, x, opt);
    for (std::size_t i = 0; i < a1.size(); ++i)
        for (std::size_t j = 0; j < a2.size(); ++j) grid.values(i, j) = k(a1[i], a2[j]);
    return grid;
}

}  // namespace hardedge
