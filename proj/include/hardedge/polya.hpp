#pragma once

// Polya-ensemble transforms built from the Mellin data of the weight omega:
// the chi polynomial, the entire function J_omega, the cut function K_omega,
// its discontinuity J~_omega, and the finite-n weights p_{n-1}, q_n.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hardedge/complexmath.hpp"
#include "hardedge/errors.hpp"
#include "hardedge/quadrature.hpp"

namespace hardedge {

enum class Family { ginibre_charge, custom };

struct ClosedForms {
    bool jomega = false;  // n = infinity only
    bool komega = false;
    bool jtilde = false;
    bool finite_kernel = false;  // Laguerre forms of p_{n-1}, q_n
};

struct MellinSpec {
    Family family = Family::custom;
    int nu = 0;
    std::optional<int> n;  // empty means n = infinity
    double tilt = 0.25 * std::numbers::pi;
    ClosedForms closed_forms;
    std::function<cplx(cplx)> log_mellin;  // ln M omega(s)
    std::string id;

    cplx mellin(cplx s) const { return std::exp(log_mellin(s)); }
    bool finite() const { return n.has_value(); }
};

/// Complex Ginibre with charge nu: omega(l) = l^nu e^{-l}, M omega(s) = Gamma(s + nu).
inline MellinSpec ginibre(int nu = 0, std::optional<int> n = std::nullopt, bool closed_forms = true) {
    if (nu < 0) throw std::invalid_argument("ginibre: charge must be non-negative");
    if (n && *n < 1) throw std::invalid_argument("ginibre: n must be positive");
    MellinSpec s;
    s.family = Family::ginibre_charge;
    s.nu = nu;
    s.n = n;
    if (closed_forms) s.closed_forms = {true, true, true, nu == 0};
    s.log_mellin = [nu](cplx z) { return cgamma_ln(z + static_cast<double>(nu)); };
    s.id = "ginibre(nu=" + std::to_string(nu) + ",n=" + (n ? std::to_string(*n) : std::string("inf")) + ")";
    return s;
}

/// User-supplied Mellin data given as a log-Mellin evaluator.
inline MellinSpec custom_log_mellin(std::function<cplx(cplx)> log_mellin, std::optional<int> n, std::string id,
                                    double tilt = 0.25 * std::numbers::pi) {
    MellinSpec s;
    s.family = Family::custom;
    s.n = n;
    s.tilt = tilt;
    s.log_mellin = std::move(log_mellin);
    s.id = std::move(id);
    return s;
}

/// User-supplied Mellin data given as M omega(s) directly.
inline MellinSpec custom_mellin(std::function<cplx(cplx)> mellin_at, std::optional<int> n, std::string id,
                                double tilt = 0.25 * std::numbers::pi) {
    return custom_log_mellin([m = std::move(mellin_at)](cplx s) { return std::log(m(s)); }, n, std::move(id), tilt);
}

inline MellinSpec with_n(MellinSpec spec, std::optional<int> n) {
    spec.n = n;
    return spec;
}

struct TransformOptions {
    double quad_tol = 1e-12;
    int series_terms = 2000;
    bool use_closed_forms = true;
    std::optional<double> tilt;  // overrides spec.tilt
};

namespace detail {

inline double tilt_of(const MellinSpec& spec, const TransformOptions& opt) { return opt.tilt.value_or(spec.tilt); }

// ln(1/Gamma(w)); -inf at the poles, accurate near w = 0.
inline cplx log_rgamma(cplx w) {
    if (is_nonpositive_integer(w)) return {-std::numeric_limits<double>::infinity(), 0.0};
    if (std::abs(w) < 0.5) return std::log(w) - cgamma_ln(w + 1.0);
    return -cgamma_ln(w);
}

// Ray point sigma(s) = exp(i sign(s) theta) s and its Jacobian.
struct RayPoint {
    cplx sigma;
    cplx jac;
};
inline RayPoint ray_point(double s, double theta) {
    const cplx dir = std::polar(1.0, s >= 0.0 ? theta : -theta);
    return {dir * s, dir};
}

inline void require_finite_n(const MellinSpec& spec, const char* who) {
    if (!spec.n) throw std::invalid_argument(std::string(who) + ": requires finite n");
}

// Laguerre polynomials L_{m}(x) and L_{m+1}(x) by the three-term recurrence.
inline std::pair<double, double> laguerre_pair(int m, double x) {
    double lm1 = 0.0;
    double l = 1.0;
    for (int k = 0; k < m; ++k) {
        const double next = ((2.0 * k + 1.0 - x) * l - k * lm1) / (k + 1.0);
        lm1 = l;
        l = next;
    }
    const double next = ((2.0 * m + 1.0 - x) * l - m * lm1) / (m + 1.0);
    return {l, next};
}

}  // namespace detail

inline double laguerre(int m, double x) { return detail::laguerre_pair(m, x).first; }

/// chi(z) = sum_{j<n} z^j / M omega(j+1), by Horner's rule.
inline cplx chi(const MellinSpec& spec, cplx z) {
    detail::require_finite_n(spec, "chi");
    cplx acc = 0.0;
    for (int j = *spec.n - 1; j >= 0; --j) acc = acc * z + std::exp(-spec.log_mellin(cplx(j + 1.0)));
    return acc;
}

/// J omega(z) = sum_j (iz)^j / (j! M omega(j+1)); truncated at n-1 for finite
/// n, summed to convergence for n = infinity.
inline cplx jomega(const MellinSpec& spec, cplx z, const TransformOptions& opt = {}) {
    if (!spec.n && opt.use_closed_forms && spec.closed_forms.jomega) {
        const cplx iz = I_unit * z;
        if (iz == 0.0) return spec.nu == 0 ? 1.0 : 1.0 / detail::factorial(spec.nu);
        // (iz)^{-nu/2} I_nu(2 sqrt(iz)); even in sqrt(iz), so the branch is immaterial.
        const cplx w = std::sqrt(iz);
        return std::pow(w, -spec.nu) * bessel_i(spec.nu, 2.0 * w);
    }
    const cplx iz = I_unit * z;
    const int terms = spec.n ? *spec.n : opt.series_terms;
    cplx power = 1.0;  // (iz)^j / j!
    cplx sum = 0.0;
    double biggest = 0.0;
    for (int j = 0; j < terms; ++j) {
        if (j > 0) power *= iz / static_cast<double>(j);
        const cplx term = power * std::exp(-spec.log_mellin(cplx(j + 1.0)));
        sum += term;
        const double at = std::abs(term);
        biggest = std::max(biggest, at);
        if (!spec.n && j > std::abs(iz) && at < 0.1 * opt.quad_tol * std::max(1.0, biggest)) return sum;
    }
    if (!spec.n) throw convergence_error("jomega: series did not converge within series_terms");
    return sum;
}

/// K omega(z) = int ds/(2 pi) M omega(1+is) Gamma(1+is) (iz)^{-is-1}, holomorphic
/// off the cut i R_+^0. Untilted for Im z < 0 when Gamma alone decays fast
/// enough, otherwise on the tilted rays.
inline cplx komega(const MellinSpec& spec, cplx z, const TransformOptions& opt = {}) {
    if (z.real() == 0.0 && z.imag() >= 0.0) throw std::domain_error("komega: argument on the cut i*R_+");
    const cplx iz = I_unit * z;
    if (opt.use_closed_forms && spec.closed_forms.komega) {
        // 2 (iz)^{nu/2} K_nu(2 sqrt(iz)), principal branch; Re sqrt(iz) > 0 off the cut.
        const cplx w = std::sqrt(iz);
        return 2.0 * std::pow(w, spec.nu) * bessel_k(spec.nu, 2.0 * w);
    }
    const cplx log_iz = std::log(iz);
    const double tol = opt.quad_tol;
    const double s_max = default_s_max(tol);
    const double decay = 0.5 * std::numbers::pi - std::abs(log_iz.imag());
    if (z.imag() < 0.0 && decay > 0.25) {
        auto g = [&](double s) -> cplx {
            const cplx w = I_unit * s;
            return std::exp(spec.log_mellin(1.0 + w) + cgamma_ln(1.0 + w) - (w + 1.0) * log_iz) /
                   (2.0 * std::numbers::pi);
        };
        return integrate_real_line(g, s_max, tol);
    }
    const double theta = detail::tilt_of(spec, opt);
    auto g = [&](double s) -> cplx {
        const auto rp = detail::ray_point(s, theta);
        const cplx w = I_unit * rp.sigma;
        return rp.jac *
               std::exp(spec.log_mellin(1.0 + w) + cgamma_ln(1.0 + w) - (w + 1.0) * log_iz) /
               (2.0 * std::numbers::pi);
    };
    return integrate_tilted_rays(g, theta, s_max, tol);
}

/// Cut discontinuity J~omega(y) = int ds/(2 pi) M omega(1+i sigma)/Gamma(-i sigma)
/// y^{-1-i sigma} on the tilted rays sigma = exp(i sign(s) theta) s.
inline double jtilde(const MellinSpec& spec, double y, const TransformOptions& opt = {}) {
    if (!(y > 0.0)) throw std::domain_error("jtilde: requires y > 0");
    if (opt.use_closed_forms && spec.closed_forms.jtilde) {
        const double w = std::sqrt(y);
        return std::pow(w, spec.nu) * bessel_j(spec.nu, 2.0 * w).real();
    }
    const double theta = detail::tilt_of(spec, opt);
    const double log_y = std::log(y);
    auto g = [&](double s) -> cplx {
        const auto rp = detail::ray_point(s, theta);
        const cplx w = I_unit * rp.sigma;
        return rp.jac * std::exp(spec.log_mellin(1.0 + w) + detail::log_rgamma(-w) - (1.0 + w) * log_y) /
               (2.0 * std::numbers::pi);
    };
    return integrate_tilted_rays(g, theta, default_s_max(opt.quad_tol), opt.quad_tol).real();
}

/// J~omega on a fixed tilted-ray rule for y in (0, y_max]. The Mellin
/// factor M omega(1+i sigma)/Gamma(-i sigma) does not depend on y, so it is
/// tabulated once and each evaluation is a single weighted sum. Outside the
/// range, or when a closed form applies, this defers to jtilde.
class JtildeTable {
public:
    JtildeTable(const MellinSpec& spec, double y_max, const TransformOptions& opt = {})
        : spec_(spec), opt_(opt), y_max_(y_max) {
        if (!(y_max > 0.0)) throw std::invalid_argument("JtildeTable: requires y_max > 0");
        if (opt.use_closed_forms && spec.closed_forms.jtilde) return;
        const double theta = detail::tilt_of(spec, opt);
        // On both rays Re(i sigma) = -s sin(theta), so |y^{-i sigma}| grows like
        // exp(s sin(theta) ln y) for y > 1. March out until the Mellin factor
        // has beaten that by 1e-18.
        const double growth = std::sin(theta) * std::max(0.0, std::log(y_max));
        constexpr double step = 0.5;
        auto log_size = [&](double s) {
            double worst = -std::numeric_limits<double>::infinity();
            for (double sign : {1.0, -1.0}) {
                const cplx w = I_unit * detail::ray_point(sign * s, theta).sigma;
                worst = std::max(worst, (spec.log_mellin(1.0 + w) + detail::log_rgamma(-w)).real());
            }
            return worst + growth * s;
        };
        double s_cut = 2.0;
        const double s_limit = default_s_max(opt.quad_tol);
        while (log_size(s_cut) > std::log(1e-18) && s_cut < s_limit) s_cut += step;
        const QuadratureRule rule = tilted_ray_rule(theta, s_cut, static_cast<int>(std::ceil(s_cut / step)));
        w_.reserve(rule.nodes.size());
        log_factor_.reserve(rule.nodes.size());
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            const cplx w = I_unit * rule.nodes[k];
            w_.push_back(w);
            log_factor_.push_back(std::log(rule.weights[k] / (2.0 * std::numbers::pi)) + spec.log_mellin(1.0 + w) +
                                  detail::log_rgamma(-w));
        }
    }

    double operator()(double y) const {
        if (w_.empty() || !(y > 0.0) || y > y_max_) return jtilde(spec_, y, opt_);
        const double log_y = std::log(y);
        cplx acc = 0.0;
        for (std::size_t k = 0; k < w_.size(); ++k) acc += std::exp(log_factor_[k] - (1.0 + w_[k]) * log_y);
        return acc.real();
    }

    std::size_t nodes() const { return w_.size(); }

private:
    MellinSpec spec_;
    TransformOptions opt_;
    double y_max_;
    std::vector<cplx> w_;
    std::vector<cplx> log_factor_;
};

/// p_{n-1}(l) = sum_{j<n} C(n-1, j) (-l)^j / M omega(j+1).
inline double pn_poly(const MellinSpec& spec, double lam, const TransformOptions& opt = {}) {
    detail::require_finite_n(spec, "pn_poly");
    const int n = *spec.n;
    if (opt.use_closed_forms && spec.closed_forms.finite_kernel) return laguerre(n - 1, lam);
    double binom = 1.0;
    double power = 1.0;
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
        if (j > 0) {
            binom *= static_cast<double>(n - j) / j;
            power *= -lam;
        }
        sum += binom * power * std::exp(-spec.log_mellin(cplx(j + 1.0))).real();
    }
    return sum;
}

/// Weight q_n(l) = int ds/(2 pi) Gamma[n - i sigma] M omega(1 + i sigma)
/// / (Gamma[n] Gamma[-i sigma]) l^{-1 - i sigma} on the tilted rays.
inline double qn_weight(const MellinSpec& spec, double lam, const TransformOptions& opt = {}) {
    detail::require_finite_n(spec, "qn_weight");
    if (!(lam > 0.0)) throw std::domain_error("qn_weight: requires lam > 0");
    const int n = *spec.n;
    if (opt.use_closed_forms && spec.closed_forms.finite_kernel) {
        // Ginibre, nu = 0: q_n = n L_n(l) e^{-l}.
        return n * detail::laguerre_pair(n - 1, lam).second * std::exp(-lam);
    }
    const double theta = detail::tilt_of(spec, opt);
    const double log_lam = std::log(lam);
    const cplx log_gamma_n = cgamma_ln(cplx(n));
    auto g = [&](double s) -> cplx {
        const auto rp = detail::ray_point(s, theta);
        const cplx w = I_unit * rp.sigma;
        return rp.jac *
               std::exp(cgamma_ln(static_cast<double>(n) - w) + spec.log_mellin(1.0 + w) - log_gamma_n +
                        detail::log_rgamma(-w) - (1.0 + w) * log_lam) /
               (2.0 * std::numbers::pi);
    };
    return integrate_tilted_rays(g, theta, default_s_max(opt.quad_tol), opt.quad_tol).real();
}

/// Numerical check of the two admissibility conditions on the Mellin data.
struct AdmissibilityReport {
    double c_tilde = 0.0;       // max_j 1/M omega(j), j = 1..n
    double assump2_sup = 0.0;   // sup of |M omega(1+z)| over sampled rays arg z in [pi/2, pi)
    std::vector<std::string> warnings;
};

inline AdmissibilityReport check_admissibility(const MellinSpec& spec, int n_check = 64, double radius = 30.0) {
    AdmissibilityReport r;
    const int n = spec.n.value_or(n_check);
    for (int j = 1; j <= n; ++j) {
        const cplx m = spec.mellin(cplx(j));
        if (!(m.real() > 0.0) || std::abs(m.imag()) > 1e-12 * std::abs(m.real())) {
            r.warnings.push_back("M omega(" + std::to_string(j) + ") is not positive");
            continue;
        }
        r.c_tilde = std::max(r.c_tilde, 1.0 / m.real());
    }
    for (int a = 0; a < 8; ++a) {
        const double arg = 0.5 * std::numbers::pi + a * (0.5 * std::numbers::pi) / 8.5;
        for (int k = 1; k <= 60; ++k) {
            const cplx z = std::polar(radius * k / 60.0, arg);
            double v = 0.0;
            try {
                v = std::abs(spec.mellin(1.0 + z));
            } catch (const std::domain_error&) {
                v = std::numeric_limits<double>::infinity();
            }
            r.assump2_sup = std::max(r.assump2_sup, v);
        }
    }
    if (!std::isfinite(r.c_tilde) || r.c_tilde > 1e6) r.warnings.push_back("assump1: 1/M omega(j) is not bounded");
    if (!std::isfinite(r.assump2_sup) || r.assump2_sup > 1e6)
        r.warnings.push_back("assump2: M omega(1+z) is not bounded on the sampled rays");
    return r;
}

/// Convenience bundle of a spec with fixed options.
struct PolyaTransforms {
    MellinSpec spec;
    TransformOptions options;

    cplx chi(cplx z) const { return hardedge::chi(spec, z); }
    cplx jomega(cplx z) const { return hardedge::jomega(spec, z, options); }
    cplx komega(cplx z) const { return hardedge::komega(spec, z, options); }
    double jtilde(double y) const { return hardedge::jtilde(spec, y, options); }
};

}  // namespace hardedge
