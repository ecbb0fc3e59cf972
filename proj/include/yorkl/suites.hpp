#ifndef YORKL_SUITES_HPP
#define YORKL_SUITES_HPP

// Invariant grids of each module, as CheckSuites. These drive `yorkl suite`.
//
// The yor suite checks the squared norm against its exact value
// e^{pi^2/4t} / (2t sqrt(pi t)) and the diffusion equation in the form it
// takes for r F_t(r); yor_squared_norm and diffusion_residual keep the
// uncorrected forms and are reported separately by the acceptance run.

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "yorkl/bessel.hpp"
#include "yorkl/kl.hpp"
#include "yorkl/polys.hpp"
#include "yorkl/quadrature.hpp"
#include "yorkl/report.hpp"
#include "yorkl/yor.hpp"

namespace yorkl {

inline const std::array<double, 4> cross_grid_t{0.5, 1.0, 2.0, 5.0};
inline const std::array<double, 5> cross_grid_r{0.5, 1.0, 2.0, 5.0, 10.0};
inline const std::array<double, 3> kl_image_grid{0.5, 1.0, 2.0};
inline const std::array<double, 4> norm_grid_t{0.5, 1.0, 2.0, 4.0};
// (r, t) points for the diffusion equation
inline const std::array<std::array<double, 2>, 9> diffusion_grid{{
    {1.0, 1.0}, {3.0, 2.0}, {0.5, 0.5}, {1.0, 0.5}, {2.0, 1.0}, {0.5, 2.0}, {3.0, 1.0}, {1.0, 2.0}, {2.0, 0.5},
}};

namespace detail {

inline std::string fmt(double v)
{
    std::ostringstream os;
    os << v;
    return os.str();
}

/// Spec for the triple integrals: the checks are at 1e-4, so the inner
/// levels need not run at the default depth.
inline QuadratureSpec relaxed(const QuadratureSpec& spec)
{
    QuadratureSpec s = spec;
    s.rel_tol = std::max(spec.rel_tol, 1e-8);
    s.truncation_log_decades = std::min(spec.truncation_log_decades, 20.0);
    return s;
}

} // namespace detail

/// |p_n(x)| <= poly_bound(n, x, params) on n = 1..n_max, x in {0.1, 1, 3}
/// for (eps, alpha) = (1, 2) and (0.5, alpha_max(0.5)).
inline CheckSuite poly_bound_suite(int n_max = 10)
{
    CheckSuite suite{"polys.bound", {}};
    const std::array<BoundParams, 2> params{BoundParams{1.0, 2.0}, BoundParams{0.5, BoundParams::alpha_max(0.5)}};
    for (const auto& bp : params)
        for (int n = 1; n <= n_max; ++n)
            for (double x : {0.1, 1.0, 3.0}) {
                const double v = std::abs(poly_eval(poly_recurrence(n), x));
                const double b = poly_bound(n, x, bp);
                suite.add(make_predicate_report("bound n=" + std::to_string(n) + " x=" + detail::fmt(x)
                                                    + " eps=" + detail::fmt(bp.epsilon)
                                                    + " alpha=" + detail::fmt(bp.alpha),
                                                v, b, v <= b));
            }
    return suite;
}

/// Bessel series for p_n against the exact polynomial, n <= 6.
inline CheckSuite poly_series_suite()
{
    CheckSuite suite{"polys.series", {}};
    for (int n = 1; n <= 6; ++n)
        for (double x : {0.1, 1.0, 2.0, 5.0}) {
            const double exact = poly_eval(poly_recurrence(n), x);
            suite.add(make_report("Bessel series p_" + std::to_string(n) + "(" + detail::fmt(x) + ")",
                                  poly_series_bessel(n, x, 200), exact, 1e-6));
        }
    return suite;
}

inline CheckSuite polys_suite(int n_max = 20, const QuadratureSpec& spec = {})
{
    CheckSuite suite{"polys", {}};
    suite.append(verify_constructions(n_max));
    suite.append(verify_identities(n_max));
    suite.append(verify_leading_coefficients(n_max));
    int sign_violations = 0;
    for (int n = 1; n <= n_max; ++n) {
        const ExactPolynomial p = poly_recurrence(n);
        for (int k = 1; k <= n; ++k)
            if ((p.coeff(k) > 0) != (k % 2 == 0))
                ++sign_violations;
    }
    suite.add(make_predicate_report("sign of a_{k,n} is (-1)^k, n <= " + std::to_string(n_max), sign_violations,
                                    0.0, sign_violations == 0));
    suite.append(poly_bound_suite());
    suite.append(poly_series_suite());
    suite.add(generating_check(0.0, 1.0, 12));
    suite.add(generating_check(1.0, 0.5, 12, 1e-10));
    suite.add(generating_check(2.0, 1.0, 20, 1e-8));
    for (int n = 1; n <= 3; ++n)
        suite.add(verify_bernoulli_integral(n, spec));
    suite.add(poly_kl_image(1, 1.0, spec));
    suite.add(poly_kl_image(2, 0.5, spec));
    suite.add(poly_kl_image(3, 2.0, spec));
    return suite;
}

inline CheckSuite bessel_suite()
{
    CheckSuite suite{"bessel", {}};
    const double pi = std::numbers::pi;
    for (double x : {0.1, 1.0, 5.0})
        suite.add(make_report("K_{i0}(" + detail::fmt(x) + ") = K_0", bessel_k_imag(0.0, x), bessel_k_real(0.0, x),
                              1e-13));
    for (double x : {0.5, 2.0, 10.0})
        suite.add(make_report("K_{1/2}(" + detail::fmt(x) + ") closed form", bessel_k_real(0.5, x),
                              std::sqrt(pi / (2.0 * x)) * std::exp(-x), 1e-12));
    const std::array<double, 6> xs{0.01, 0.1, 0.5, 1.0, 2.0, 5.0};
    const std::array<double, 7> taus{0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 30.0};
    int over = 0, bound_violations = 0;
    double worst = 0.0;
    for (double x : xs) {
        const double k0 = bessel_k_real(0.0, x);
        for (double tau : taus) {
            const double k = bessel_k_imag(tau, x);
            if (std::abs(k) > k0 * (1.0 + 1e-13))
                ++over;
            const double dk = std::abs(bessel_k_imag_dx(tau, x));
            for (double delta : {0.0, pi / 4.0}) {
                const double bound = std::exp(-delta * tau) * bessel_k_real(1.0, x * std::cos(delta));
                worst = std::max(worst, dk / bound);
                if (dk > bound * (1.0 + 1e-12))
                    ++bound_violations;
            }
        }
    }
    suite.add(make_predicate_report("|K_{i tau}(x)| <= K_0(x) on the grid", over, 0.0, over == 0));
    suite.add(make_predicate_report("|dK_{i tau}/dx| <= e^{-delta tau} K_1(x cos delta), delta in {0, pi/4}; worst ratio",
                                    worst, 1.0, bound_violations == 0));
    const std::array<double, 3> large{10.0, 20.0, 40.0};
    const std::array<double, 3> small{1e-2, 1e-3, 1e-4};
    suite.append(check_k_asymptotics(large));
    suite.append(check_k_asymptotics(small));
    suite.add(make_report("K_0(1e-6) / -log(1e-6)", bessel_k_real(0.0, 1e-6) / -std::log(1e-6), 1.0, 0.1));
    for (int m : {0, 1, 3})
        suite.add(make_report("I_" + std::to_string(m) + "(-2) = (-1)^m I_m(2)", bessel_i_int(m, -2.0),
                              (m % 2 ? -1.0 : 1.0) * bessel_i_int(m, 2.0), 1e-15));
    return suite;
}

inline CheckSuite yor_cross_representation(const QuadratureSpec& spec = {})
{
    CheckSuite suite{"yor.cross", {}};
    int negative = 0;
    for (double t : cross_grid_t)
        for (double r : cross_grid_r) {
            const double d = yor_direct(r, t, spec).value;
            const double s = yor_spectral(r, t, spec).value;
            if (!(s > 0.0))
                ++negative;
            suite.add(make_report("direct vs spectral F_" + detail::fmt(t) + "(" + detail::fmt(r) + ")", d, s, 1e-8));
        }
    suite.add(make_predicate_report("F_t(r) > 0 on the cross grid", negative, 0.0, negative == 0));
    return suite;
}

inline CheckSuite yor_kl_image_grid(const QuadratureSpec& spec = {})
{
    CheckSuite suite{"yor.kl_image", {}};
    for (double tau : kl_image_grid)
        for (double t : kl_image_grid)
            suite.add(yor_kl_image(tau, t, spec));
    return suite;
}

/// Derivative bound for m = 0..4 on the diffusion grid.
inline CheckSuite yor_derivative_bounds(const QuadratureSpec& spec = {})
{
    CheckSuite suite{"yor.derivative_bound", {}};
    for (const auto& [r, t] : diffusion_grid)
        for (int m = 0; m <= yor_max_t_derivative; ++m)
            suite.add(derivative_bound_check(r, t, m, spec));
    return suite;
}

inline CheckSuite yor_suite(const QuadratureSpec& spec = {})
{
    CheckSuite suite{"yor", {}};
    suite.append(yor_cross_representation(spec));
    suite.append(yor_kl_image_grid(spec));
    for (double t : norm_grid_t) {
        const auto norm = yor_squared_norm(t, spec);
        suite.add(make_report("int F_" + detail::fmt(t) + "^2 r dr = e^{pi^2/4t}/(2t sqrt(pi t))", norm.lhs,
                              yor_squared_norm_exact(t), 1e-5));
    }
    const double h = 1e-4;
    auto fd1 = [&](double r, double t) {
        return (yor_spectral(r, t + h, spec).value - yor_spectral(r, t - h, spec).value) / (2.0 * h);
    };
    auto fd2 = [&](double r, double t) {
        return (yor_spectral(r, t + h, spec).value - 2.0 * yor_spectral(r, t, spec).value
                + yor_spectral(r, t - h, spec).value) / (h * h);
    };
    suite.add(make_report("dF/dt at r=1, t=1 vs central difference", yor_dt_derivative(1.0, 1.0, 1, spec), fd1(1.0, 1.0),
                          1e-6));
    suite.add(make_report("d2F/dt2 at r=2, t=1 vs second difference", yor_dt_derivative(2.0, 1.0, 2, spec),
                          fd2(2.0, 1.0), 1e-4));
    suite.add(make_report("m=0 derivative = spectral F at r=1, t=1", yor_dt_derivative(1.0, 1.0, 0, spec),
                          yor_spectral(1.0, 1.0, spec).value, 1e-14));
    for (const auto& [r, t] : diffusion_grid)
        suite.add(diffusion_residual_rf(r, t, spec));
    suite.append(yor_derivative_bounds(spec));
    const double f12 = yor_spectral(1.0, 2.0, spec).value;
    const auto ps6 = yor_polyseries(1.0, 2.0, 6, spec);
    const auto ps8 = yor_polyseries(1.0, 2.0, 8, spec);
    suite.add(make_report("polynomial expansion K=8 at r=1, t=2", ps8.value, f12, 1e-3));
    suite.add(make_predicate_report("K=8 closer than K=6 at r=1, t=2", std::abs(ps8.value - f12),
                                    std::abs(ps6.value - f12), std::abs(ps8.value - f12) < std::abs(ps6.value - f12)));
    return suite;
}

inline CheckSuite kl_suite(const QuadratureSpec& spec = {})
{
    CheckSuite suite{"kl", {}};
    const double pi = std::numbers::pi;
    const QuadratureSpec fast = detail::relaxed(spec);
    auto em = [](double u) { return std::exp(-u); };

    for (double tau : {0.0, 0.5, 1.0})
        for (const auto& [x, y] : std::array<std::array<double, 2>, 3>{{{1.0, 1.0}, {1.0, 2.0}, {2.0, 3.0}}})
            suite.add(macdonald_check(tau, x, y, spec));

    for (double tau : {0.0, 1.0, 2.0})
        suite.add(make_report("G[1](" + detail::fmt(tau) + ") = pi / (2 cosh(pi tau/2))",
                              kl_forward([](double) { return 1.0; }, tau, spec),
                              pi / (2.0 * std::cosh(pi * tau / 2.0)), 1e-8));
    suite.add(make_report("G[-e^{-r}](1) = -pi / sinh(pi)", kl_forward([](double r) { return -std::exp(-r); }, 1.0, spec),
                          -pi / std::sinh(pi), 1e-8));
    suite.add(make_report("inverse of e^{-t tau^2/2} at t=1, r=1",
                          kl_inverse([](double tau) { return std::exp(-tau * tau / 2.0); },
                                     [](double tau) { return tau * tau / 2.0; }, 1.0, spec),
                          yor_spectral(1.0, 1.0, spec).value, 1e-8));
    // sinh(pi tau) amplifies the absolute error of G f, so the inner
    // transforms run to a tiny abs_tol and the tau integral stops at 1e-8
    QuadratureSpec fwd = spec.nested();
    fwd.truncation_log_decades = 20.0;
    fwd.abs_tol = 1e-24;
    QuadratureSpec inv = spec;
    inv.rel_tol = std::max(spec.rel_tol, 1e-9);
    inv.truncation_log_decades = 8.0;
    auto g_em = [&](double tau) { return kl_forward(em, tau, fwd); };
    auto d_em = [&](double tau) { return pi * tau - std::log1p(2.0 * pi * tau); };
    for (double r : {0.5, 1.0, 2.0})
        suite.add(make_report("roundtrip inverse(forward(e^{-r})) at r=" + detail::fmt(r),
                              kl_inverse(g_em, d_em, r, inv), std::exp(-r), 1e-6));

    const auto h12 = heat_kernel(1.0, 1.0, 2.0, spec);
    const auto h21 = heat_kernel(1.0, 2.0, 1.0, spec);
    suite.add(make_report("x h_1(x,y) = y h_1(y,x) at x=1, y=2", h12.x * h12.value, h21.x * h21.value, 1e-10));
    suite.add(make_report("heat kernel translation form at t=1, x=1, y=2",
                          heat_kernel_translation(1.0, 1.0, 2.0, spec).value, h12.value, 1e-6));
    const double h11 = heat_kernel(1.0, 1.0, 1.0, spec).value;
    suite.add(make_predicate_report("h_1(1,1) > 0", h11, 0.0, h11 > 0.0));

    suite.add(parseval_check(em, d_em, spec, "e^{-r}"));
    auto f1 = [](double r) { return detail::yor_direct_unchecked(r, 1.0, {}).value; };
    suite.add(parseval_check(f1, [](double tau) { return tau * tau / 2.0; }, spec, "F_1"));

    const auto n0 = l_alpha_norm(em, 0.0, spec);
    suite.add(make_predicate_report("L^0 norm of e^{-x} finite", n0.value, 0.0, n0.finite));
    const auto np = l_alpha_norm(em, 0.5, spec), nm = l_alpha_norm(em, -0.5, spec);
    suite.add(make_report("L^{1/2} norm = L^{-1/2} norm of e^{-x}", np.value, nm.value, 1e-12));
    const SampledFunction s1 = sample_yor_density(1.0, 1000, spec);
    const auto nf = l_alpha_norm(s1, 0.0, spec);
    suite.add(make_predicate_report("L^0 norm of F_1 finite", nf.value, 0.0, nf.finite));

    const SampledFunction s2 = sample_yor_density(2.0, 1000, spec);
    auto xe = [](double u) { return u * std::exp(-u); };
    suite.add(make_report("convolution symmetric at x=1", kl_convolution(em, xe, 1.0, spec),
                          kl_convolution(xe, em, 1.0, spec), 1e-10));
    suite.add(index_law_check(1.0, 1.0, 1.0, spec));
    suite.add(index_law_check(0.5, 1.5, 2.0, spec));
    const auto sg_a = semigroup_check(1.0, 1.0, 1.0, spec);
    suite.add(sg_a);
    suite.add(semigroup_check(0.5, 1.5, 2.0, spec));
    const auto sg_b = semigroup_check(1.5, 0.5, 1.0, spec);
    suite.add(make_report("semigroup (1,1) vs (1.5,0.5) at r=1", sg_a.lhs, sg_b.lhs, 2e-4));

    suite.add(factorization_check(em, em, 1.0, fast, "e^{-u} * e^{-u}"));
    const SampledFunction s05 = sample_yor_density(0.5, 1000, spec);
    QuadratureSpec loose = fast;
    loose.rel_tol = std::max(spec.rel_tol, 1e-6);
    suite.add(make_report("G[F_0.5 * F_0.5](1) = e^{-1/2}",
                          kl_forward([&](double x) { return kl_convolution(s05, s05, x, loose.nested(), false); }, 1.0,
                                     loose),
                          std::exp(-0.5), 1e-4));
    suite.add(factorization_check(em, s1, 0.5, fast, "e^{-u} * F_1"));

    // k = 1 term of the polynomial expansion: convolution form against a_1
    const double conv_a1 = kl_convolution([](double u) { return -std::exp(-u); }, s2, 1.0, spec);
    suite.add(make_report("a_1(1,2) as convolution vs heat-kernel integral", conv_a1,
                          polyseries_coefficients(1.0, 2.0, 1, spec)[0], 1e-6));
    return suite;
}

inline CheckSuite all_suites(int n_max = 20, const QuadratureSpec& spec = {})
{
    CheckSuite suite{"all", {}};
    suite.append(polys_suite(n_max, spec));
    suite.append(bessel_suite());
    suite.append(yor_suite(spec));
    suite.append(kl_suite(spec));
    return suite;
}

} // namespace yorkl

#endif // YORKL_SUITES_HPP
