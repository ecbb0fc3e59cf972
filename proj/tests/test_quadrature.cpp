#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <numbers>

#include "yorkl/quadrature.hpp"

using namespace yorkl;

namespace {

constexpr double pi = std::numbers::pi;

TEST(IntegrateFinite, PolynomialExactOnOnePanel)
{
    // 10-point Gauss-Legendre is exact through degree 19
    auto f = [](double x) { return std::pow(x, 19); };
    const auto r = integrate_finite(f, 0.0, 1.0, {});
    EXPECT_NEAR(r.value, 1.0 / 20.0, 1e-15);
    EXPECT_TRUE(r.converged);
}

TEST(IntegrateFinite, SmoothIntegrals)
{
    const QuadratureSpec spec;
    EXPECT_NEAR(integrate_finite([](double x) { return std::sin(x); }, 0.0, pi, spec).value, 2.0, 1e-13);
    EXPECT_NEAR(integrate_finite([](double x) { return std::exp(-x * x); }, -6.0, 6.0, spec).value, std::sqrt(pi),
                1e-13);
    EXPECT_NEAR(integrate_finite([](double x) { return 1.0 / (1.0 + x * x); }, 0.0, 1.0, spec).value, pi / 4.0, 1e-14);
}

TEST(IntegrateFinite, EndpointSingularityRefines)
{
    const auto r = integrate_finite([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, {});
    EXPECT_NEAR(r.value, 2.0, 1e-9);
    EXPECT_GT(r.nodes_used, 100u);
}

TEST(IntegrateFinite, KinkAtBreakpoint)
{
    const std::array<double, 1> cut{0.3};
    const auto r = integrate_finite([](double x) { return std::abs(x - 0.3); }, 0.0, 1.0, {}, cut);
    EXPECT_NEAR(r.value, 0.5 * (0.09 + 0.49), 1e-15);
    EXPECT_TRUE(r.converged);
}

TEST(IntegrateFinite, VectorValuedSharesNodes)
{
    auto f = [](double x) { return std::array<double, 3>{1.0, x, x * x}; };
    const auto r = integrate_finite(f, 0.0, 2.0, {});
    EXPECT_NEAR(r.value[0], 2.0, 1e-15);
    EXPECT_NEAR(r.value[1], 2.0, 1e-15);
    EXPECT_NEAR(r.value[2], 8.0 / 3.0, 1e-14);
}

TEST(IntegrateFinite, ErrorEstimateBoundsTrueError)
{
    QuadratureSpec spec;
    spec.rel_tol = 1e-6;
    spec.abs_tol = 1e-30;
    for (double k : {1.0, 5.0, 20.0}) {
        const auto r = integrate_finite([k](double x) { return std::cos(k * x) * std::exp(-x); }, 0.0, 3.0, spec);
        const double exact = (std::exp(-3.0) * (k * std::sin(3.0 * k) - std::cos(3.0 * k)) + 1.0) / (1.0 + k * k);
        EXPECT_LE(std::abs(r.value - exact), 10.0 * r.error_estimate + 1e-15) << "k=" << k;
    }
}

TEST(IntegrateFinite, RejectsBadInput)
{
    EXPECT_THROW(integrate_finite([](double) { return 1.0; }, 1.0, 1.0, {}), std::invalid_argument);
    QuadratureSpec bad;
    bad.rel_tol = 0.0;
    EXPECT_THROW(integrate_finite([](double) { return 1.0; }, 0.0, 1.0, bad), std::invalid_argument);
    EXPECT_THROW(integrate_finite([](double x) { return 1.0 / (x - 0.5); }, 0.0, 1.0, {}, std::array<double, 1>{0.5}),
                 evaluation_error);
}

TEST(IntegrateFinite, BudgetExhaustionReportsUnconverged)
{
    QuadratureSpec spec;
    spec.max_refinements = 3;
    const auto r = integrate_finite([](double x) { return std::sin(200.0 * x); }, 0.0, 10.0, spec);
    EXPECT_FALSE(r.converged);
}

TEST(SemiInfinite, ExponentialAndGaussian)
{
    const QuadratureSpec spec;
    const auto e = integrate_semi_infinite([](double x) { return std::exp(-x); }, [](double x) { return x; }, spec);
    EXPECT_NEAR(e.value, 1.0, 1e-13);
    const auto g = integrate_semi_infinite([](double x) { return std::exp(-x * x / 2.0); },
                                           [](double x) { return x * x / 2.0; }, spec);
    EXPECT_NEAR(g.value, std::sqrt(pi / 2.0), 1e-13);
}

TEST(SemiInfinite, NonDecayingDampingThrows)
{
    EXPECT_THROW(integrate_semi_infinite([](double) { return 1.0; }, [](double) { return 0.0; }, {}),
                 unbounded_tail_error);
}

TEST(TruncationPoint, MatchesThreshold)
{
    const double x = truncation_point([](double v) { return v * v; }, 0.0, 100.0);
    EXPECT_NEAR(x, 10.0, 1e-9);
}

TEST(DampedOscillatory, CosineAndSineTransforms)
{
    const QuadratureSpec spec;
    for (double w : {0.0, 1.0, 10.0, 100.0}) {
        const auto c = integrate_damped_oscillatory([](double x) { return std::exp(-x); }, [](double x) { return x; },
                                                    w, Oscillation::cosine, spec);
        EXPECT_NEAR(c.value, 1.0 / (1.0 + w * w), 1e-12) << "w=" << w;
        const auto s = integrate_damped_oscillatory([](double x) { return std::exp(-x); }, [](double x) { return x; },
                                                    w, Oscillation::sine, spec);
        EXPECT_NEAR(s.value, w / (1.0 + w * w), 1e-12) << "w=" << w;
    }
}

TEST(DampedOscillatory, FrequencyCap)
{
    auto env = [](double x) { return std::exp(-x); };
    auto damp = [](double x) { return x; };
    EXPECT_THROW(integrate_damped_oscillatory(env, damp, 2e4, Oscillation::cosine, {}), frequency_cap_error);
    EXPECT_THROW(integrate_damped_oscillatory(env, damp, -1.0, Oscillation::cosine, {}), std::domain_error);
}

TEST(TrapezoidHalfline, DoubleExponentialDecay)
{
    // int_0^inf exp(-cosh t) dt = K_0(1)
    const auto r = integrate_trapezoid_halfline([](double t) { return std::exp(-std::cosh(t)); }, 6.0, 0.5, 1e-14,
                                                1e-300);
    EXPECT_NEAR(r.value, 0.42102443824070833, 1e-15);
    EXPECT_TRUE(r.converged);
}

TEST(QuadratureSpec, NestedTightensTolerances)
{
    QuadratureSpec s;
    const auto n = s.nested();
    EXPECT_DOUBLE_EQ(n.rel_tol, s.rel_tol / 10.0);
    EXPECT_DOUBLE_EQ(n.abs_tol, s.abs_tol / 10.0);
    EXPECT_DOUBLE_EQ(s.tail_exponent(), 40.0 * std::numbers::ln10);
}

} // namespace
