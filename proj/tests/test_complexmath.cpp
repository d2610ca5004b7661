#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hardedge/complexmath.hpp"
#include "hardedge/gauss_legendre.hpp"

using hardedge::cplx;

namespace {

// Reference values computed with mpmath at 30 digits.
struct Ref {
    cplx z;
    cplx value;
};

double rel(cplx got, cplx want) { return std::abs(got - want) / std::abs(want); }

// K_nu(z) = int_0^inf exp(-z cosh t) cosh(nu t) dt for Re z > 0, by the
// trapezoid rule (spectrally accurate for this integrand).
cplx k_cosh_integral(int nu, cplx z) {
    const double h = 1.0 / 64.0;
    cplx acc = 0.5 * std::exp(-z);
    for (int k = 1; k < 64 * 40; ++k) {
        const double t = k * h;
        const cplx term = std::exp(-z * std::cosh(t)) * std::cosh(nu * t);
        acc += term;
        if (std::abs(term) < 1e-300) break;
    }
    return acc * h;
}

}  // namespace

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
    const auto& gl = hardedge::GaussLegendre<16>::get();
    for (int p = 0; p <= 31; ++p) {
        double acc = 0.0;
        for (int i = 0; i < 16; ++i) acc += gl.w[i] * std::pow(gl.x[i], p);
        const double want = p % 2 ? 0.0 : 2.0 / (p + 1);
        EXPECT_NEAR(acc, want, 1e-14) << "degree " << p;
    }
}

TEST(LogGamma, MatchesReferenceValues) {
    const Ref refs[] = {
        {{0.5, 0.3}, {1.2609927863965769, -0.73175950569183357}},
        {{-2.7, 1.1}, {-0.044545929693393146, -0.035800793669136181}},
        {{3, -7}, {-0.0044117241856449158, 0.0036521031574413263}},
        {{12.5, 40}, {1.3260257788349256e-08, -2.2179141144759094e-08}},
        {{-7.5, -0.2}, {0.00017049075157486753, -7.5327907493232571e-05}},
        {{0.001, 0}, {999.42377248459547, 0}},
    };
    for (const auto& r : refs) EXPECT_LT(rel(std::exp(hardedge::cgamma_ln(r.z)), r.value), 1e-13) << r.z;
    // Real part of the log is branch independent.
    EXPECT_NEAR(hardedge::cgamma_ln({12.5, 40}).real(), -17.47130985551788, 1e-12);
    EXPECT_NEAR(hardedge::cgamma_ln({-2.7, 1.1}).real(), -2.8620890268796968, 1e-12);
}

TEST(LogGamma, ImaginaryPartIsReduced) {
    const cplx v = hardedge::cgamma_ln({12.5, 40});
    EXPECT_GT(v.imag(), -std::numbers::pi);
    EXPECT_LE(v.imag(), std::numbers::pi);
}

TEST(LogGamma, FactorialsAndHalfInteger) {
    double fact = 1.0;
    for (int k = 1; k < 30; ++k) {
        fact *= k;
        EXPECT_NEAR(hardedge::cgamma_ln(cplx(k + 1.0)).real(), std::log(fact), 1e-13 * std::log(fact) + 4e-15);
    }
    EXPECT_NEAR(std::exp(hardedge::cgamma_ln(0.5)).real(), std::sqrt(std::numbers::pi), 1e-14);
}

TEST(LogGamma, PolesThrow) {
    EXPECT_THROW(hardedge::cgamma_ln(0.0), std::domain_error);
    EXPECT_THROW(hardedge::cgamma_ln(-3.0), std::domain_error);
}

TEST(ReciprocalGamma, ZeroAtPolesAndReflection) {
    EXPECT_EQ(hardedge::crgamma(-2.0), cplx(0.0));
    EXPECT_EQ(hardedge::crgamma(0.0), cplx(0.0));
    // Gamma(z) Gamma(1 - z) = pi / sin(pi z)
    for (cplx z : {cplx(0.3, 0.7), cplx(-1.4, 2.2), cplx(2.5, -4.0)}) {
        const cplx lhs = 1.0 / (hardedge::crgamma(z) * hardedge::crgamma(1.0 - z));
        const cplx rhs = std::numbers::pi / std::sin(std::numbers::pi * z);
        EXPECT_LT(rel(lhs, rhs), 1e-13) << z;
    }
}

TEST(BesselJ, MatchesReferenceValues) {
    struct R {
        int nu;
        cplx z, v;
    };
    const R refs[] = {
        {0, {1.5, 0.5}, {0.52951404854795658, -0.2874548129590187}},
        {0, {-6, 2}, {0.71356461401238935, -0.92198131540737049}},
        {0, {12, -3}, {0.74364883100416879, -2.153124703644842}},
        {0, {30, 1}, {-0.1309349050389251, 0.14003354166518239}},
        {0, {-40, -2}, {0.016289115100372654, -0.45709218930073753}},
        {0, {0, 9}, {1093.5883545113747, 0}},
        {1, {1.5, 0.5}, {0.60920292858976477, 0.071560677926852972}},
        {1, {-6, 2}, {0.88749970448762272, 0.75475465488323901}},
        {1, {12, -3}, {-2.1154722903124745, -0.82109351209781134}},
        {1, {30, 1}, {-0.18475921606889584, -0.096069994840210726}},
        {1, {-40, -2}, {-0.4740474477973487, -0.0091568371493683503}},
        {1, {0, 9}, {0, 1030.9147225169565}},
        {3, {1.5, 0.5}, {0.046883204071709948, 0.055467824613552451}},
        {3, {-6, 2}, {-0.22353527886668403, -0.93796981200535046}},
        {3, {12, -3}, {1.6359022881186309, 1.3483230194479094}},
        {3, {30, 1}, {0.19988250264917409, 0.076096421388370264}},
        {3, {-40, -2}, {0.47103544575803646, -0.03632923536831336}},
        {3, {0, 9}, {0, -646.69419187160042}},
    };
    for (const auto& r : refs) EXPECT_LT(rel(hardedge::bessel_j(r.nu, r.z), r.v), 1e-12) << r.nu << " " << r.z;
}

TEST(BesselJ, WronskianLikeIdentityOnRealAxis) {
    // J0' = -J1, checked by central differences, and J_{n-1} + J_{n+1} = 2n/x J_n.
    for (double x : {0.7, 4.3, 11.0, 27.5}) {
        const double h = 1e-5;
        const double d = (hardedge::bessel_j(0, x + h) - hardedge::bessel_j(0, x - h)).real() / (2 * h);
        EXPECT_NEAR(d, -hardedge::bessel_j(1, x).real(), 1e-8);
        const double lhs = (hardedge::bessel_j(1, x) + hardedge::bessel_j(3, x)).real();
        EXPECT_NEAR(lhs, 4.0 / x * hardedge::bessel_j(2, x).real(), 1e-12);
    }
}

TEST(BesselI, MatchesReferenceValues) {
    struct R {
        int nu;
        cplx z, v;
    };
    const R refs[] = {
        {0, {1.5, 0.5}, {1.5247265350575945, 0.47523949213396444}},
        {0, {-6, 2}, {-16.839902601937695, -63.091167098963034}},
        {0, {0.2, 15}, {-0.014785173517592108, 0.041291110260233868}},
        {1, {1.5, 0.5}, {0.88876268023930005, 0.47989197876288092}},
        {1, {-6, 2}, {17.26294430589391, 57.721055901997673}},
        {1, {0.2, 15}, {-0.0056344456776295975, 0.20916383895884846}},
        {2, {1.5, 0.5}, {0.26625452726528193, 0.25487418971422737}},
        {2, {-6, 2}, {-17.43312490036929, -44.048555897774342}},
        {2, {0.2, 15}, {-0.042658713290496489, 0.040168203639577862}},
    };
    for (const auto& r : refs) EXPECT_LT(rel(hardedge::bessel_i(r.nu, r.z), r.v), 1e-12) << r.nu << " " << r.z;
}

TEST(BesselK, MatchesReferenceValues) {
    struct R {
        int nu;
        cplx z, v;
    };
    const R refs[] = {
        {0, {0.3, 0.2}, {1.1799998084064247, -0.53066834259692952}},
        {0, {1.5, -0.5}, {0.16728456135094061, 0.12565741212241097}},
        {0, {5, 8}, {-0.0016333316274921754, -0.0021868957997157488}},
        {0, {0.01, -12}, {0.35030930430975799, 0.074018470171039033}},
        {0, {25, 3}, {-3.4403070007286894e-12, -2.8428976723934324e-13}},
        {0, {3, -0.1}, {0.03449922092040078, 0.0040055432760373166}},
        {1, {0.3, 0.2}, {2.0031791996818549, -1.6210739129237934}},
        {1, {1.5, -0.5}, {0.20233182387356657, 0.17364095652965528}},
        {1, {5, 8}, {-0.0017755942738417812, -0.0021779865823339448}},
        {1, {0.01, -12}, {0.34754355269615117, 0.08865552352778458}},
        {1, {25, 3}, {-3.5081612804068174e-12, -2.8185456519493289e-13}},
        {1, {3, -0.1}, {0.039853638857371067, 0.0047988461579374373}},
        {2, {0.3, 0.2}, {5.4375225364033124, -14.176176247420145}},
        {2, {5, 8}, {-0.0022243847517142085, -0.0021124054338940742}},
        {2, {0.01, -12}, {0.3355816638871964, 0.13195466865408303}},
        {4, {0.3, 0.2}, {-2011.5153855450526, -1988.3361556864882}},
        {4, {1.5, -0.5}, {1.0864967794687621, 6.4317601412306624}},
        {4, {25, 3}, {-4.6969089657620096e-12, -2.17140604499391e-13}},
        {4, {3, -0.1}, {0.30074276728967414, 0.052625851044928812}},
    };
    for (const auto& r : refs) EXPECT_LT(rel(hardedge::bessel_k(r.nu, r.z), r.v), 1e-12) << r.nu << " " << r.z;
}

TEST(BesselK, AgreesWithCoshIntegral) {
    for (int nu : {0, 1, 2}) {
        for (cplx z : {cplx(0.4, 0.1), cplx(2.5, 3.0), cplx(7.0, -9.0), cplx(15.0, 0.5), cplx(1.0, -1.7)}) {
            EXPECT_LT(rel(hardedge::bessel_k(nu, z), k_cosh_integral(nu, z)), 1e-11) << nu << " " << z;
        }
    }
}

TEST(BesselK, RejectsLeftHalfPlane) {
    EXPECT_THROW(hardedge::bessel_k(0, cplx(-1.0, 0.5)), std::domain_error);
    EXPECT_THROW(hardedge::bessel_k(0, cplx(0.0, 2.0)), std::domain_error);
    EXPECT_THROW(hardedge::bessel_j(-1, 1.0), std::domain_error);
}
