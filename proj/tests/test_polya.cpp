#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hardedge/polya.hpp"

using hardedge::cplx;
using hardedge::I_unit;

namespace {

hardedge::TransformOptions raw() {
    hardedge::TransformOptions t;
    t.use_closed_forms = false;
    return t;
}

// 2 K_nu(w) with w = 2 sqrt(iz) from int_0^inf exp(-w cosh t) cosh(nu t) dt.
cplx two_k_cosh(int nu, cplx w) {
    // Fine steps: for small Re w the integrand oscillates like exp(-i Im w cosh t).
    const double h = 1.0 / 1024.0;
    cplx acc = 0.5 * std::exp(-w);
    for (int k = 1; k < 1024 * 40; ++k) {
        const cplx term = std::exp(-w * std::cosh(k * h)) * std::cosh(nu * k * h);
        acc += term;
        if (std::abs(term) < 1e-300) break;
    }
    return 2.0 * h * acc;
}


}  // namespace

TEST(Chi, GinibreIsTruncatedExponential) {
    const auto spec = hardedge::ginibre(0, 7);
    for (cplx z : {cplx(0.5, 0.2), cplx(-2.0, 1.0), cplx(3.0, -4.0)}) {
        cplx want = 0.0, term = 1.0;
        for (int j = 0; j < 7; ++j) {
            if (j > 0) term *= z / static_cast<double>(j);
            want += term;
        }
        EXPECT_NEAR(std::abs(hardedge::chi(spec, z) - want), 0.0, 1e-13 * std::abs(want));
    }
    EXPECT_THROW(hardedge::chi(hardedge::ginibre(0), 1.0), std::invalid_argument);
}

TEST(Jomega, FiniteNIsTruncatedSeries) {
    const auto spec = hardedge::ginibre(0, 5);
    const cplx z(1.3, -0.7);
    cplx want = 0.0;
    double fact = 1.0;
    for (int j = 0; j < 5; ++j) {
        if (j > 0) fact *= j;
        want += std::pow(I_unit * z, j) / (fact * fact);
    }
    EXPECT_NEAR(std::abs(hardedge::jomega(spec, z) - want), 0.0, 1e-14);
}

TEST(Jomega, SeriesAgreesWithBesselForm) {
    for (int nu : {0, 1, 2}) {
        const auto spec = hardedge::ginibre(nu);
        for (cplx z : {cplx(0.0, 0.0), cplx(1.0, 0.0), cplx(-3.0, 2.0), cplx(0.0, -8.0), cplx(9.0, 9.0)}) {
            const cplx closed = hardedge::jomega(spec, z);
            const cplx series = hardedge::jomega(spec, z, raw());
            EXPECT_LT(std::abs(closed - series), 1e-12 * std::max(1.0, std::abs(series))) << nu << " " << z;
        }
    }
}

TEST(Komega, ContourAgreesWithBesselFormAndCoshIntegral) {
    for (int nu : {0, 1}) {
        const auto spec = hardedge::ginibre(nu);
        for (cplx z : {cplx(1.0, -1.0), cplx(-2.0, -0.5), cplx(3.0, 2.0), cplx(-0.5, 4.0), cplx(0.2, -6.0),
                       cplx(-5.0, 0.1)}) {
            const cplx closed = hardedge::komega(spec, z);
            const cplx contour = hardedge::komega(spec, z, raw());
            EXPECT_LT(std::abs(closed - contour), 1e-11) << nu << " " << z;
            const cplx w = std::sqrt(I_unit * z);
            const cplx oracle = std::pow(w, nu) * two_k_cosh(nu, 2.0 * w);
            EXPECT_LT(std::abs(closed - oracle), 1e-11) << nu << " " << z;
        }
    }
}

TEST(Komega, CutIsRejected) {
    const auto spec = hardedge::ginibre(0);
    EXPECT_THROW(hardedge::komega(spec, cplx(0.0, 2.0)), std::domain_error);
    EXPECT_THROW(hardedge::komega(spec, cplx(0.0, 0.0), raw()), std::domain_error);
    EXPECT_NO_THROW(hardedge::komega(spec, cplx(0.0, -2.0)));
}

TEST(Komega, TiltInvariance) {
    const auto spec = hardedge::ginibre(0);
    auto a = raw(), b = raw();
    a.tilt = 0.3;
    b.tilt = 1.1;
    for (cplx z : {cplx(2.0, 1.0), cplx(-1.0, 3.0), cplx(4.0, 0.2)})
        EXPECT_LT(std::abs(hardedge::komega(spec, z, a) - hardedge::komega(spec, z, b)), 1e-10) << z;
}

TEST(Jtilde, ContourAgreesWithBesselJ) {
    for (int nu : {0, 1}) {
        const auto spec = hardedge::ginibre(nu);
        for (double y : {0.05, 0.5, 3.0, 12.0, 40.0}) {
            const double oracle = std::pow(y, 0.5 * nu) * std::cyl_bessel_j(static_cast<double>(nu), 2.0 * std::sqrt(y));
            EXPECT_NEAR(hardedge::jtilde(spec, y), oracle, 1e-12) << nu << " " << y;
            EXPECT_NEAR(hardedge::jtilde(spec, y, raw()), oracle, 1e-10) << nu << " " << y;
        }
    }
    EXPECT_THROW(hardedge::jtilde(hardedge::ginibre(0), 0.0), std::domain_error);
}

TEST(Jtilde, IsTheCutDiscontinuityOfKomega) {
    const auto spec = hardedge::ginibre(0);
    for (double y : {0.3, 2.0, 9.0}) {
        const double eps = 1e-9;
        const cplx jump = hardedge::komega(spec, cplx(eps, y), raw()) - hardedge::komega(spec, cplx(-eps, y), raw());
        const cplx limit = I_unit / (2.0 * std::numbers::pi) * jump;
        EXPECT_NEAR(limit.real(), hardedge::jtilde(spec, y, raw()), 1e-6);
        EXPECT_NEAR(limit.imag(), 0.0, 1e-6);
    }
}

TEST(Jtilde, TabulatedRuleMatchesAdaptiveContour) {
    for (int nu : {0, 1}) {
        const auto spec = hardedge::ginibre(nu, std::nullopt, false);
        const hardedge::JtildeTable table(spec, 30.0);
        EXPECT_GT(table.nodes(), 0u);
        for (double y : {1e-3, 0.2, 1.0, 7.5, 30.0}) {
            EXPECT_NEAR(table(y), hardedge::jtilde(spec, y), 1e-12) << nu << " " << y;
            EXPECT_NEAR(table(y), std::pow(y, 0.5 * nu) * std::cyl_bessel_j(static_cast<double>(nu), 2.0 * std::sqrt(y)),
                        1e-12);
        }
        // Beyond y_max it defers to the adaptive route.
        EXPECT_NEAR(table(45.0), hardedge::jtilde(spec, 45.0), 1e-15);
    }
    EXPECT_THROW(hardedge::JtildeTable(hardedge::ginibre(0), 0.0), std::invalid_argument);
}

TEST(FiniteWeights, LowOrderGinibreValues) {
    // q_1 = (1 - l) e^{-l}, q_2 = 2 L_2(l) e^{-l}, p_0 = 1, p_1 = 1 - l.
    const auto s1 = hardedge::ginibre(0, 1, false);
    const auto s2 = hardedge::ginibre(0, 2, false);
    for (double l : {0.1, 0.5, 1.7, 4.0}) {
        EXPECT_NEAR(hardedge::qn_weight(s1, l, raw()), (1.0 - l) * std::exp(-l), 1e-11) << l;
        EXPECT_NEAR(hardedge::qn_weight(s2, l, raw()), 2.0 * (1.0 - 2.0 * l + 0.5 * l * l) * std::exp(-l), 1e-11);
        EXPECT_NEAR(hardedge::pn_poly(s1, l, raw()), 1.0, 4e-15);
        EXPECT_NEAR(hardedge::pn_poly(s2, l, raw()), 1.0 - l, 1e-14);
    }
}

TEST(FiniteWeights, ContourAgreesWithLaguerreForms) {
    for (int n : {3, 8, 15}) {
        const auto closed = hardedge::ginibre(0, n);
        for (double l : {0.05, 0.7, 2.5, 9.0}) {
            const double q_closed = hardedge::qn_weight(closed, l);
            EXPECT_NEAR(hardedge::qn_weight(closed, l, raw()), q_closed, 1e-10 * std::max(1.0, std::abs(q_closed)));
            EXPECT_NEAR(hardedge::pn_poly(closed, l, raw()), hardedge::pn_poly(closed, l),
                        1e-10 * std::max(1.0, std::abs(hardedge::pn_poly(closed, l))));
        }
    }
}

TEST(FiniteWeights, QnIsOrthogonalToLowerPowers) {
    // int_0^inf l^k q_n(l) dl = 0 for k < n.
    const auto spec = hardedge::ginibre(0, 4, false);
    // Fixed composite Gauss-Legendre: adaptive refinement towards l = 0 would
    // chase the contour's rounding noise, which grows like 1/l there.
    for (int k = 0; k < 4; ++k) {
        auto f = [&](double l) { return std::pow(l, k) * hardedge::qn_weight(spec, l, raw()); };
        auto g = [&](double l) { return std::abs(f(l)); };
        double total = 0.0, mass = 0.0;
        for (int p = 0; p < 60; ++p) {
            total += hardedge::detail::gl_panel(f, p, p + 1.0);
            mass += hardedge::detail::gl_panel(g, p, p + 1.0);
        }
        // Relative to int l^k |q_n|: the contour's absolute noise is ~1e-13 at large l.
        EXPECT_NEAR(total / mass, 0.0, 1e-8) << k;
    }
}

TEST(Admissibility, GinibreIsAdmissible) {
    const auto report = hardedge::check_admissibility(hardedge::ginibre(0));
    EXPECT_NEAR(report.c_tilde, 1.0, 1e-14);
    EXPECT_TRUE(report.warnings.empty());
}

TEST(Admissibility, FlagsBadMellinData) {
    // 1/M(j) = 1000^j is unbounded: the first condition fails.
    const auto bad = hardedge::custom_log_mellin([](cplx s) { return -s * std::log(1e3); }, 20, "bad");
    const auto report = hardedge::check_admissibility(bad);
    EXPECT_FALSE(report.warnings.empty());
}

TEST(CustomSpec, MatchesGinibreWhenGivenGamma) {
    const auto custom = hardedge::custom_mellin([](cplx s) { return std::exp(hardedge::cgamma_ln(s)); },
                                                std::nullopt, "gamma");
    const auto gin = hardedge::ginibre(0);
    EXPECT_LT(std::abs(hardedge::komega(custom, cplx(1.0, 1.0)) - hardedge::komega(gin, cplx(1.0, 1.0))), 1e-11);
    EXPECT_NEAR(hardedge::jtilde(custom, 2.0), hardedge::jtilde(gin, 2.0), 1e-11);
    EXPECT_LT(std::abs(hardedge::jomega(custom, cplx(2.0, -1.0)) - hardedge::jomega(gin, cplx(2.0, -1.0))), 1e-12);
}

TEST(Laguerre, ThreeTermValues) {
    EXPECT_DOUBLE_EQ(hardedge::laguerre(0, 3.0), 1.0);
    EXPECT_DOUBLE_EQ(hardedge::laguerre(1, 3.0), -2.0);
    EXPECT_NEAR(hardedge::laguerre(3, 2.0), (-8.0 + 9.0 * 4.0 - 18.0 * 2.0 + 6.0) / 6.0, 1e-15);
}
