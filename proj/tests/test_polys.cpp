#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <numbers>
#include <vector>

#include "yorkl/polys.hpp"
#include "yorkl/suites.hpp"

using namespace yorkl;

namespace {

ExactPolynomial from(std::vector<long long> c)
{
    std::vector<BigInt> b;
    for (long long v : c)
        b.emplace_back(v);
    return ExactPolynomial(std::move(b));
}

// (-1)^n e^x A^n e^{-x} expanded symbolically with sympy
const std::vector<ExactPolynomial>& oracle()
{
    static const std::vector<ExactPolynomial> p{
        from({1}),
        from({0, -1}),
        from({0, -1, 3}),
        from({0, -1, 15, -15}),
        from({0, -1, 63, -210, 105}),
        from({0, -1, 255, -2205, 3150, -945}),
        from({0, -1, 1023, -21120, 65835, -51975, 10395}),
        from({0, -1, 4095, -195195, 1201200, -1891890, 945945, -135135}),
    };
    return p;
}

TEST(Polys, RecurrenceMatchesSymbolicOracle)
{
    for (int n = 0; n < static_cast<int>(oracle().size()); ++n)
        EXPECT_EQ(poly_recurrence(n), oracle()[static_cast<std::size_t>(n)]) << "n=" << n;
}

TEST(Polys, ExplicitEqualsRecurrenceUpTo30)
{
    const auto start = std::chrono::steady_clock::now();
    for (int n = 0; n <= 30; ++n)
        EXPECT_EQ(poly_explicit(n), poly_recurrence(n)) << "n=" << n;
    EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), 10.0);
}

TEST(Polys, LeadingCoefficientIsSignedDoubleFactorial)
{
    BigInt df = 1;
    for (int n = 1; n <= 30; ++n) {
        df *= 2 * n - 1;
        const BigInt expected = n % 2 ? BigInt(-df) : df;
        EXPECT_EQ(poly_recurrence(n).coeff(n), expected) << "n=" << n;
        EXPECT_EQ(poly_recurrence(n).degree(), n);
    }
    EXPECT_EQ(poly_recurrence(12).coeff(12), BigInt(316234143225LL));
}

TEST(Polys, LowCoefficientPattern)
{
    // a_{0,n} = 0, a_{1,n} = -1, a_{2,n} = 4^{n-1} - 1 for n >= 1
    BigInt four = 1;
    for (int n = 1; n <= 25; ++n) {
        const auto p = poly_recurrence(n);
        EXPECT_EQ(p.coeff(0), 0);
        EXPECT_EQ(p.coeff(1), -1);
        if (n >= 2)
            EXPECT_EQ(p.coeff(2), four - 1) << "n=" << n;
        four *= 4;
    }
}

TEST(Polys, CoefficientsExceedInt64)
{
    const auto p = poly_recurrence(30);
    EXPECT_GT(boost::multiprecision::abs(p.coeff(30)), BigInt(std::numeric_limits<long long>::max()));
}

TEST(Polys, Evaluation)
{
    EXPECT_DOUBLE_EQ(poly_eval(poly_recurrence(3), 2.0), -62.0);
    EXPECT_DOUBLE_EQ(poly_eval(poly_recurrence(0), 7.0), 1.0);
    EXPECT_DOUBLE_EQ(poly_eval(poly_recurrence(5), 0.0), 0.0);
}

TEST(Polys, IdentitySuitesPass)
{
    for (const auto& suite : {verify_identities(20), verify_constructions(30), verify_leading_coefficients(30)})
        for (const auto& c : suite.checks)
            EXPECT_TRUE(c.passed) << c.context;
}

TEST(Polys, BernoulliNumbers)
{
    using R = BigRational;
    EXPECT_EQ(bernoulli_exact(2), R(1, 6));
    EXPECT_EQ(bernoulli_exact(4), R(-1, 30));
    EXPECT_EQ(bernoulli_exact(8), R(-1, 30));
    EXPECT_EQ(bernoulli_exact(12), R(-691, 2730));
    EXPECT_THROW(bernoulli_exact(3), std::domain_error);
    for (int n = 1; n <= 3; ++n) {
        const auto r = verify_bernoulli_integral(n);
        EXPECT_TRUE(r.passed) << r.context << " rel " << r.rel_diff;
        EXPECT_LE(r.rel_diff, 1e-8);
    }
}

TEST(Polys, BesselSeriesMatchesExact)
{
    for (int n = 1; n <= 6; ++n)
        for (double x : {0.1, 1.0, 2.0, 5.0}) {
            const double exact = poly_eval(poly_recurrence(n), x);
            EXPECT_NEAR(poly_series_bessel(n, x, 200) / exact, 1.0, 1e-6) << "n=" << n << " x=" << x;
        }
    EXPECT_THROW(poly_series_bessel(6, 1.0, 5), truncation_error);
}

TEST(Polys, GeneratingFunction)
{
    EXPECT_TRUE(generating_check(1.0, 0.5, 12, 1e-10).passed);
    EXPECT_TRUE(generating_check(2.0, 1.0, 20, 1e-8).passed);
    // too few terms at large t is visible
    EXPECT_FALSE(generating_check(2.0, 3.0, 3, 1e-8).passed);
    EXPECT_THROW(generating_check(1.0, 5.0, 10), std::domain_error);
}

TEST(Polys, UpperBoundHolds)
{
    const BoundParams a{1.0, 2.0};
    const BoundParams b{0.5, BoundParams::alpha_max(0.5)};
    for (const auto& bp : {a, b})
        for (int n = 1; n <= 10; ++n)
            for (double x : {0.1, 1.0, 3.0})
                EXPECT_LE(std::abs(poly_eval(poly_recurrence(n), x)), poly_bound(n, x, bp))
                    << "n=" << n << " x=" << x << " eps=" << bp.epsilon;
    EXPECT_THROW(poly_bound(1, 1.0, BoundParams{0.1, 1.0}), std::domain_error);
    EXPECT_THROW(poly_bound(1, 1.0, BoundParams{1.0, 2.5}), std::domain_error);
}

TEST(Polys, KlImage)
{
    for (auto [n, tau] : std::vector<std::pair<int, double>>{{1, 1.0}, {2, 0.5}, {3, 2.0}}) {
        const auto r = poly_kl_image(n, tau);
        EXPECT_TRUE(r.passed) << r.context << " rel " << r.rel_diff;
    }
}

TEST(Polys, AsymptoticStudyShape)
{
    const std::vector<double> betas{0.5, 1.0, 1.5};
    const auto rows = poly_asymptotic_study(1.0, betas, 25);
    ASSERT_EQ(rows.size(), 75u);
    for (const auto& r : rows) {
        EXPECT_TRUE(std::isfinite(r.ratio)) << "beta=" << r.beta << " n=" << r.n;
        if (r.n == 1)
            EXPECT_TRUE(std::isnan(r.step_ratio));
    }
    EXPECT_THROW(poly_asymptotic_ratio(3, 1.0, 2.0), std::domain_error);
}

TEST(Polys, SuitePasses)
{
    const auto suite = polys_suite(20);
    for (const auto& c : suite.checks)
        EXPECT_TRUE(c.passed) << c.context;
}

} // namespace
