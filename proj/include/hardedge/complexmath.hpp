#pragma once

// Complex special functions: log-Gamma, reciprocal Gamma and integer-order
// Bessel functions J, I, K of complex argument.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "hardedge/gauss_legendre.hpp"

namespace hardedge {

using cplx = std::complex<double>;

inline constexpr cplx I_unit{0.0, 1.0};
inline constexpr double euler_gamma = 0.57721566490153286061;

inline bool is_nonpositive_integer(cplx z) {
    return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real());
}

namespace detail {

constexpr double pi = std::numbers::pi;

// log sin(pi z) without overflow for large |Im z|; branch of the imaginary
// part is irrelevant to callers, which only exponentiate.
inline cplx log_sin_pi(cplx z) {
    const double y = z.imag();
    if (std::abs(y) < 15.0) return std::log(std::sin(pi * z));
    if (y > 0.0) {
        const cplx e = std::exp(2.0 * I_unit * pi * z);
        return -I_unit * pi * z + std::log((e - 1.0) / (2.0 * I_unit));
    }
    const cplx e = std::exp(-2.0 * I_unit * pi * z);
    return I_unit * pi * z + std::log((1.0 - e) / (2.0 * I_unit));
}

// Stirling series, valid for |z| >= 10 and Re z > 0.
inline cplx lgamma_stirling(cplx z) {
    static constexpr double c[] = {1.0 / 12.0,          -1.0 / 360.0,   1.0 / 1260.0,
                                   -1.0 / 1680.0,       1.0 / 1188.0,   -691.0 / 360360.0,
                                   1.0 / 156.0,         -3617.0 / 122400.0};
    const cplx zi = 1.0 / z;
    const cplx zi2 = zi * zi;
    cplx corr = 0.0;
    cplx p = zi;
    for (double ck : c) {
        corr += ck * p;
        p *= zi2;
    }
    return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * pi) + corr;
}

inline cplx lgamma_right(cplx z) {
    if (std::abs(z) >= 10.0 && z.real() > 0.0) return lgamma_stirling(z);
    int shift = std::max(0, static_cast<int>(std::ceil(10.0 - z.real())));
    cplx prod = 1.0;
    cplx w = z;
    for (int k = 0; k < shift; ++k, w += 1.0) prod *= w;
    return lgamma_stirling(w) - std::log(prod);
}

inline cplx wrap_imag(cplx v) {
    double im = std::remainder(v.imag(), 2.0 * pi);
    if (im <= -pi) im += 2.0 * pi;
    return {v.real(), im};
}

inline double factorial(int k) {
    double f = 1.0;
    for (int j = 2; j <= k; ++j) f *= j;
    return f;
}

inline cplx ipow(cplx z, int k) {
    cplx r = 1.0;
    for (int j = 0; j < k; ++j) r *= z;
    return r;
}

// (+i)^k or (-i)^k
inline cplx unit_power(int sign, int k) {
    switch (k & 3) {
        case 0: return 1.0;
        case 1: return cplx(0.0, sign);
        case 2: return -1.0;
        default: return cplx(0.0, -sign);
    }
}

inline cplx bessel_j_series(int nu, cplx z) {
    const cplx h = 0.5 * z;
    const cplx mh2 = -h * h;
    cplx term = ipow(h, nu) / factorial(nu);
    cplx sum = term;
    double biggest = std::abs(term);
    for (int k = 1; k < 500; ++k) {
        term *= mh2 / (static_cast<double>(k) * (k + nu));
        sum += term;
        const double at = std::abs(term);
        biggest = std::max(biggest, at);
        if (k > std::abs(h) && at <= 1e-18 * biggest) break;
    }
    return sum;
}

// Hankel expansion, |z| large and Re z >= 0.
inline cplx bessel_j_hankel(int nu, cplx z) {
    const double mu = 4.0 * nu * nu;
    cplx p = 0.0;
    cplx q = 0.0;
    cplx term = 1.0;
    double last = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 200; ++k) {
        const double at = std::abs(term);
        if (at > last) break;
        last = at;
        const int m = k / 2;
        const double sgn = (m % 2 == 0) ? 1.0 : -1.0;
        if (k % 2 == 0)
            p += sgn * term;
        else
            q += sgn * term;
        if (at < 1e-18) break;
        const double odd = 2.0 * k + 1.0;
        term *= (mu - odd * odd) / ((k + 1.0) * 8.0) / z;
    }
    const cplx chi = z - (0.5 * nu + 0.25) * pi;
    return std::sqrt(2.0 / (pi * z)) * (p * std::cos(chi) - q * std::sin(chi));
}

// Miller backward recurrence normalised with e^{+-iz} = J_0 + 2 sum (+-i)^k J_k,
// choosing the sign for which the exponential is the large one.
inline cplx bessel_j_miller(int nu, cplx z) {
    const double big = std::max(static_cast<double>(nu), std::abs(z));
    int top = static_cast<int>(big + 30.0 + 4.0 * std::sqrt(big));
    top += top % 2;
    const int sign = z.imag() > 0.0 ? -1 : 1;
    cplx f_next = 0.0;
    cplx f = 1e-30;
    cplx norm = 2.0 * unit_power(sign, top) * f;
    cplx at_nu = (top == nu) ? f : cplx(0.0);
    for (int k = top; k >= 1; --k) {
        const cplx f_prev = (2.0 * k / z) * f - f_next;
        f_next = f;
        f = f_prev;
        const int idx = k - 1;
        norm += (idx == 0 ? 1.0 : 2.0 * unit_power(sign, idx)) * f;
        if (idx == nu) at_nu = f;
        if (std::abs(f) > 1e200) {
            f *= 1e-200;
            f_next *= 1e-200;
            norm *= 1e-200;
            at_nu *= 1e-200;
        }
    }
    return at_nu * std::exp(static_cast<double>(sign) * I_unit * z) / norm;
}

inline cplx bessel_k01_series(int nu, cplx z) {
    const cplx q = 0.25 * z * z;
    const cplx lg = std::log(0.5 * z);
    if (nu == 0) {
        // K0 = -(ln(z/2) + gamma) I0(z) + sum_{k>=1} H_k q^k / (k!)^2
        cplx i0 = 1.0;
        cplx s = 0.0;
        cplx t = 1.0;
        double h = 0.0;
        for (int k = 1; k < 200; ++k) {
            t *= q / (static_cast<double>(k) * k);
            h += 1.0 / k;
            i0 += t;
            s += h * t;
            if (std::abs(t) * (h + 1.0) < 1e-18 * (std::abs(i0) + std::abs(s))) break;
        }
        return -(lg + euler_gamma) * i0 + s;
    }
    // K1 = 1/z + ln(z/2) I1(z) - (z/4) sum_k (psi(k+1)+psi(k+2)) q^k/(k!(k+1)!)
    cplx i1 = 0.0;
    cplx s = 0.0;
    cplx t = 1.0;
    double hk = 0.0;
    for (int k = 0; k < 200; ++k) {
        if (k > 0) {
            t *= q / (static_cast<double>(k) * (k + 1));
            hk += 1.0 / k;
        }
        const double psi_sum = (hk - euler_gamma) + (hk + 1.0 / (k + 1) - euler_gamma);
        i1 += t;
        s += psi_sum * t;
        if (k > 2 && std::abs(t) * (std::abs(psi_sum) + 1.0) < 1e-18 * (std::abs(i1) + std::abs(s)))
            break;
    }
    i1 *= 0.5 * z;
    return 1.0 / z + lg * i1 - 0.25 * z * s;
}

inline cplx bessel_k01_asymptotic(int nu, cplx z) {
    const double mu = 4.0 * nu * nu;
    cplx sum = 0.0;
    cplx term = 1.0;
    double last = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 200; ++k) {
        const double at = std::abs(term);
        if (at > last) break;
        last = at;
        sum += term;
        if (at < 1e-18) break;
        const double odd = 2.0 * k + 1.0;
        term *= (mu - odd * odd) / ((k + 1.0) * 8.0) / z;
    }
    return std::sqrt(pi / (2.0 * z)) * std::exp(-z) * sum;
}

// K_nu(z) = sqrt(pi) (z/2)^nu / Gamma(nu+1/2) int_1^inf e^{-zt} (t^2-1)^{nu-1/2} dt with
// the path t = 1 + v^2 e^{-i arg z}; the integrand becomes a Gaussian in v and the
// representation holds for |arg z| < pi.
inline cplx bessel_k01_integral(int nu, cplx z) {
    const double r = std::abs(z);
    const double alpha = std::arg(z);
    const cplx rot = std::polar(1.0, -alpha);
    const auto& gl = GaussLegendre<32>::get();
    constexpr int panels = 4;
    const double umax = std::sqrt(50.0);
    const double hw = 0.5 * umax / panels;
    cplx acc = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = (2 * p + 1) * hw;
        for (int i = 0; i < 32; ++i) {
            const double u = mid + hw * gl.x[i];
            const double v2 = u * u / r;
            const cplx base = 2.0 + v2 * rot;
            const cplx val = nu == 0 ? 1.0 / std::sqrt(base) : v2 * std::sqrt(base);
            acc += gl.w[i] * hw * std::exp(-u * u) * val;
        }
    }
    acc /= std::sqrt(r);  // dv = du / sqrt(r)
    const cplx phase = std::polar(1.0, -alpha * (nu + 0.5));
    const cplx pref = nu == 0 ? cplx(1.0) : z;
    return pref * 2.0 * std::exp(-z) * phase * acc;
}

inline cplx bessel_k01(int nu, cplx z) {
    const double r = std::abs(z);
    if (r <= 2.0) return bessel_k01_series(nu, z);
    if (r >= 18.0) return bessel_k01_asymptotic(nu, z);
    return bessel_k01_integral(nu, z);
}

}  // namespace detail

/// Log-Gamma with the imaginary part reduced to (-pi, pi], so that
/// exp(cgamma_ln(z)) == Gamma(z). Throws std::domain_error at the poles.
inline cplx cgamma_ln(cplx z) {
    if (is_nonpositive_integer(z)) throw std::domain_error("cgamma_ln: pole at non-positive integer");
    cplx v;
    if (z.real() < 0.5)
        v = std::log(detail::pi) - detail::log_sin_pi(z) - detail::lgamma_right(1.0 - z);
    else
        v = detail::lgamma_right(z);
    return detail::wrap_imag(v);
}

/// 1/Gamma(z); entire, exactly zero at the poles of Gamma.
inline cplx crgamma(cplx z) {
    if (is_nonpositive_integer(z)) return 0.0;
    return std::exp(-cgamma_ln(z));
}

/// Bessel function of the first kind J_nu(z), integer nu >= 0.
inline cplx bessel_j(int nu, cplx z) {
    if (nu < 0) throw std::domain_error("bessel_j: negative order");
    const double r = std::abs(z);
    if (r == 0.0) return nu == 0 ? 1.0 : 0.0;
    if (r <= 8.0) return detail::bessel_j_series(nu, z);
    if (r < 25.0) return detail::bessel_j_miller(nu, z);
    if (z.real() < 0.0) return (nu % 2 ? -1.0 : 1.0) * detail::bessel_j_hankel(nu, -z);
    return detail::bessel_j_hankel(nu, z);
}

/// Modified Bessel function I_nu(z) = i^{-nu} J_nu(iz).
inline cplx bessel_i(int nu, cplx z) {
    return detail::unit_power(-1, nu) * bessel_j(nu, I_unit * z);
}

/// Modified Bessel function of the second kind K_nu(z) for Re z > 0.
inline cplx bessel_k(int nu, cplx z) {
    if (nu < 0) throw std::domain_error("bessel_k: negative order");
    if (!(z.real() > 0.0)) throw std::domain_error("bessel_k: requires Re(z) > 0");
    if (nu <= 1) return detail::bessel_k01(nu, z);
    cplx km = detail::bessel_k01(0, z);
    cplx k = detail::bessel_k01(1, z);
    for (int j = 1; j < nu; ++j) {
        const cplx kp = km + (2.0 * j / z) * k;
        km = k;
        k = kp;
    }
    return k;
}

}  // namespace hardedge
