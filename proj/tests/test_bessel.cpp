#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <numbers>

#include "yorkl/bessel.hpp"
#include "yorkl/suites.hpp"

using namespace yorkl;

namespace {

constexpr double pi = std::numbers::pi;

struct KCase {
    double tau, x, value;
};

// Re K_{i tau}(x) from mpmath besselk at 40 digits
const std::array<KCase, 12> k_oracle{{
    {30.0, 1.0, -9.186127618251676667955e-22},
    {50.0, 0.1, 2.091513585765477208356e-35},
    {10.0, 20.0, 4.764583127515444526016e-11},
    {100.0, 1e-3, 2.364254473536104507992e-70},
    {20.0, 30.0, 2.336768947225934288933e-17},
    {8.0, 1.0, 2.049184651374575592634e-6},
    {3.0, 0.5, -0.01136253075247986953205},
    {1.0, 1.0, 0.2894280370259921276346},
    {0.5, 1.0, 0.3840430169050926986316},
    {2.0, 0.01, -0.07383484193838428167796},
    {15.0, 1e-20, -3.623201106279032876086e-11},
    {60.0, 60.0, 4.204597738941146302226e-42},
}};

TEST(BesselKImag, MatchesHighPrecisionOracle)
{
    for (const auto& c : k_oracle) {
        const double k = bessel_k_imag(c.tau, c.x);
        EXPECT_NEAR(k / c.value, 1.0, 1e-10) << "tau=" << c.tau << " x=" << c.x;
    }
}

TEST(BesselKImag, DerivativeMatchesOracle)
{
    EXPECT_NEAR(bessel_k_imag_dx(8.0, 1.0) / 1.8508550430363671129e-5, 1.0, 1e-9);
    EXPECT_NEAR(bessel_k_imag_dx(2.0, 0.5) / 0.29644979770011485705, 1.0, 1e-10);
    EXPECT_NEAR(bessel_k_imag_dx(0.5, 3.0) / -0.03835669191823905689, 1.0, 1e-10);
}

TEST(BesselKImag, ScaledResultReportsConvergence)
{
    const auto r = bessel_k_imag_scaled_result(5.0, 2.0);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(std::exp(-2.0) * r.value, bessel_k_imag(5.0, 2.0), 1e-25);
    EXPECT_LT(r.error_estimate, 1e-12 * std::abs(r.value) + 1e-20);
}

TEST(BesselKImag, SeriesAndContourAgreeAtSwitch)
{
    // the series is used for x^2 <= tau, the contour beyond
    for (double tau : {4.0, 9.0, 25.0, 64.0}) {
        const double x = std::sqrt(tau);
        const double below = bessel_k_imag(tau, std::nextafter(x, 0.0));
        const double above = bessel_k_imag(tau, std::nextafter(x, 10.0 * x));
        EXPECT_NEAR(below / above, 1.0, 1e-11) << "tau=" << tau;
    }
}

TEST(BesselKImag, BoundedByK0)
{
    for (double x : {0.02, 0.3, 1.5, 7.0})
        for (double tau = 0.0; tau <= 40.0; tau += 2.5)
            EXPECT_LE(std::abs(bessel_k_imag(tau, x)), bessel_k_real(0.0, x) * (1.0 + 1e-13));
}

TEST(BesselKImag, StencilMatchesPointValues)
{
    const std::array<double, 3> xs{0.9, 1.0, 1.1};
    for (double tau : {1.0, 6.0, 20.0}) {
        const auto s = bessel_k_imag_scaled_stencil(tau, xs);
        for (std::size_t i = 0; i < xs.size(); ++i)
            EXPECT_NEAR(s[i] / bessel_k_imag_scaled(tau, xs[i]), 1.0, 1e-11);
    }
}

TEST(BesselKImag, RejectsOutOfRange)
{
    EXPECT_THROW(bessel_k_imag(1.0, 0.0), std::domain_error);
    EXPECT_THROW(bessel_k_imag(1.0, -1.0), std::domain_error);
    EXPECT_THROW(bessel_k_imag(-0.5, 1.0), std::domain_error);
    EXPECT_THROW(bessel_k_imag(150.0, 1.0), frequency_cap_error);
}

TEST(BesselKReal, ClosedFormsAndValues)
{
    for (double x : {0.1, 1.0, 8.0, 40.0})
        EXPECT_NEAR(bessel_k_real(0.5, x) / (std::sqrt(pi / (2.0 * x)) * std::exp(-x)), 1.0, 1e-13);
    // K_{3/2}(x) = sqrt(pi/2x) e^{-x} (1 + 1/x)
    for (double x : {0.2, 3.0})
        EXPECT_NEAR(bessel_k_real(1.5, x) / (std::sqrt(pi / (2.0 * x)) * std::exp(-x) * (1.0 + 1.0 / x)), 1.0, 1e-13);
    EXPECT_NEAR(bessel_k_real(0.0, 1.0), 0.42102443824070833, 1e-15);
    EXPECT_NEAR(bessel_k_real(1.0, 1.0), 0.60190723019723457, 1e-15);
    EXPECT_NEAR(bessel_k_real(0.0, 1e-6) / 13.931442073626419, 1.0, 1e-13);
}

TEST(BesselKReal, RecurrenceHolds)
{
    // K_{nu+1} = K_{nu-1} + (2 nu / x) K_nu
    for (double nu : {1.0, 2.3, 10.0})
        for (double x : {0.5, 4.0}) {
            const double lhs = bessel_k_real(nu + 1.0, x);
            const double rhs = bessel_k_real(nu - 1.0, x) + 2.0 * nu / x * bessel_k_real(nu, x);
            EXPECT_NEAR(lhs / rhs, 1.0, 1e-12) << "nu=" << nu << " x=" << x;
        }
}

TEST(BesselKReal, Guards)
{
    EXPECT_THROW(bessel_k_real(61.0, 1.0), order_too_large_error);
    EXPECT_THROW(bessel_k_real(-1.0, 1.0), std::domain_error);
    EXPECT_THROW(bessel_k_real(60.0, 1e-10), order_too_large_error);
}

TEST(BesselIInt, ValuesAndParity)
{
    EXPECT_NEAR(bessel_i_int(0, 1.0), 1.2660658777520082, 1e-15);
    EXPECT_NEAR(bessel_i_int(1, 2.0), 1.5906368546373291, 1e-15);
    EXPECT_DOUBLE_EQ(bessel_i_int(0, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(bessel_i_int(2, 0.0), 0.0);
    for (int m = 0; m < 5; ++m)
        EXPECT_DOUBLE_EQ(bessel_i_int(m, -1.7), (m % 2 ? -1.0 : 1.0) * bessel_i_int(m, 1.7));
    EXPECT_THROW(bessel_i_int(-1, 1.0), std::domain_error);
}

TEST(BesselSuite, AllChecksPass)
{
    const auto suite = bessel_suite();
    for (const auto& c : suite.checks)
        EXPECT_TRUE(c.passed) << c.context << " lhs=" << c.lhs << " rhs=" << c.rhs;
}

} // namespace
