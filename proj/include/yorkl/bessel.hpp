#ifndef YORKL_BESSEL_HPP
#define YORKL_BESSEL_HPP

// Modified Bessel functions from the integral
//
//     K_nu(x) = int_0^inf exp(-x cosh u) cosh(nu u) du,
//
// which stays real for imaginary order nu = i tau (cosh -> cos). The
// integrand is even, entire and decays double-exponentially, so the plain
// trapezoidal rule converges geometrically; steps are halved until two
// levels agree. Internally everything is exponentially scaled, e^x K(x),
// using cosh u - 1 = 2 sinh^2(u/2) to avoid cancellation.
//
// For large tau the cosine integral is O(1) while K_{i tau} ~ e^{-pi tau/2},
// so its absolute rounding error swamps the value. There the path is lifted
// to Im u = theta (below pi/2), which gives the equally real form
//
//     K_{i tau}(x) = e^{-tau theta} int_0^inf e^{-x cos(theta) cosh u}
//                    cos(tau u - x sin(theta) sinh u) du,
//
// with theta near the saddle point asin(tau/x) so the integrand has the
// size of the result.
//
// For small x the ascending series
//
//     K_{i tau}(x) = Re[Gamma(i tau) (x/2)^{-i tau}
//                       sum_k (x^2/4)^k / (k! (1 - i tau)_k)]
//
// is used instead once tau is past the lift threshold and x <= sqrt(tau);
// there the sum stays O(1) and the lifted path would need many nodes.
//
// Caps: real order <= 60, imaginary order <= 100. Beyond those the
// integral needs an impractical number of nodes and is refused.

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>

#include <gsl/gsl_sf_gamma.h>

#include "yorkl/errors.hpp"
#include "yorkl/quadrature.hpp"
#include "yorkl/report.hpp"

namespace yorkl {

inline constexpr double max_real_order = 60.0;
inline constexpr double max_imag_order = 100.0;

namespace detail {

// Tail cut for the Bessel integrals, in units of ln: exp(-92) ~ 1e-40.
inline constexpr double bessel_tail_exponent = 92.0;
inline constexpr double bessel_rel_tol = 1e-14;

inline void check_argument(double x, const char* who)
{
    if (!(x > 0.0) || !std::isfinite(x))
        throw std::domain_error(std::string(who) + ": argument must be positive and finite");
}

inline void check_imag_order(double tau, const char* who)
{
    if (!(tau >= 0.0))
        throw std::domain_error(std::string(who) + ": order must be >= 0");
    if (tau > max_imag_order) {
        std::ostringstream msg;
        msg << who << ": imaginary order " << tau << " exceeds cap " << max_imag_order;
        throw frequency_cap_error(msg.str());
    }
}

/// Smallest U with 2 x sinh^2(U/2) >= T.
inline double scaled_cutoff(double x, double exponent)
{
    return 2.0 * std::asinh(std::sqrt(exponent / (2.0 * x)));
}

/// Orders above this use the lifted path.
inline constexpr double lift_threshold = 3.0;

/// Integration path Im u = theta and the first trapezoid step. The step
/// follows the trapezoid error exp(-2 pi d / h) for a strip of half-width
/// d = pi/2 - theta, inflated by up to e^{tau d} inside the strip.
struct ImagPath {
    double theta = 0.0;
    double step = 0.5;
};

inline ImagPath imag_path(double tau, double x)
{
    constexpr double pi = std::numbers::pi;
    ImagPath p;
    if (tau > lift_threshold)
        p.theta = std::max(0.0, std::min(std::asin(std::min(1.0, tau / x)), pi / 2.0 - 6.0 / tau));
    const double d = pi / 2.0 - p.theta;
    p.step = std::min(0.5, 2.0 * pi * d / (2.0 * d * tau + 40.0));
    return p;
}

inline bool use_series(double tau, double x) { return tau > lift_threshold && x * x <= tau; }

/// Ascending series for K_{i tau}(x) and x dK/dx.
struct SeriesValue {
    double k = 0.0;
    double x_dk = 0.0;
    double l1 = 0.0; // |Gamma(i tau)| sum_k |term_k|
};

inline SeriesValue k_imag_series(double tau, double x)
{
    gsl_sf_result lnr, arg;
    gsl_sf_lngamma_complex_e(0.0, tau, &lnr, &arg);
    const double mod = std::exp(lnr.val);
    const std::complex<double> lead = std::polar(mod, arg.val - tau * std::log(0.5 * x));
    const std::complex<double> nu(0.0, tau);
    const double q = 0.25 * x * x;
    std::complex<double> term = 1.0, sum = 0.0, dsum = 0.0;
    double l1 = 0.0;
    for (int k = 0; k < 200; ++k) {
        if (k > 0)
            term *= q / (static_cast<double>(k) * (static_cast<double>(k) - nu));
        sum += term;
        dsum += (2.0 * k - nu) * term;
        l1 += std::abs(term);
        if (std::abs(term) < 1e-17 * std::abs(sum))
            break;
    }
    return {std::real(lead * sum), std::real(lead * dsum), mod * l1};
}

} // namespace detail

/// e^x K_{i tau}(x) with its quadrature error estimate.
inline EvalResult bessel_k_imag_scaled_result(double tau, double x)
{
    detail::check_argument(x, "bessel_k_imag");
    detail::check_imag_order(tau, "bessel_k_imag");
    if (detail::use_series(tau, x)) {
        const auto sv = detail::k_imag_series(tau, x);
        const double ex = std::exp(x);
        EvalResult r;
        r.value = ex * sv.k;
        r.l1_norm = ex * sv.l1;
        r.error_estimate = 1e-15 * (1.0 + tau * std::abs(std::log(x))) * r.l1_norm;
        r.converged = true;
        return r;
    }
    const auto path = detail::imag_path(tau, x);
    const double c = std::cos(path.theta), sn = std::sin(path.theta);
    const double upper = detail::scaled_cutoff(x * c, detail::bessel_tail_exponent);
    auto f = [=](double u) {
        const double s = std::sinh(0.5 * u);
        return std::exp(-2.0 * x * c * s * s) * std::cos(tau * u - x * sn * std::sinh(u));
    };
    auto r = integrate_trapezoid_halfline(f, upper, path.step, detail::bessel_rel_tol, 1e-300);
    const double scale = std::exp(x * (1.0 - c) - tau * path.theta);
    r.value *= scale;
    r.error_estimate *= scale;
    r.l1_norm *= scale;
    return r;
}

inline double bessel_k_imag_scaled(double tau, double x) { return bessel_k_imag_scaled_result(tau, x).value; }

/// K_{i tau}(x), tau >= 0, x > 0.
inline double bessel_k_imag(double tau, double x) { return std::exp(-x) * bessel_k_imag_scaled(tau, x); }

/// e^{x_i} K_{i tau}(x_i) for several arguments on one shared set of nodes,
/// so differences between entries are free of independent quadrature noise.
template <std::size_t N>
std::array<double, N> bessel_k_imag_scaled_stencil(double tau, const std::array<double, N>& xs)
{
    detail::check_imag_order(tau, "bessel_k_imag_scaled_stencil");
    double xmin = std::numeric_limits<double>::infinity();
    double xmax = 0.0;
    for (double x : xs) {
        detail::check_argument(x, "bessel_k_imag_scaled_stencil");
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
    }
    if (detail::use_series(tau, xmax)) {
        std::array<double, N> v{};
        for (std::size_t i = 0; i < N; ++i)
            v[i] = std::exp(xs[i]) * detail::k_imag_series(tau, xs[i]).k;
        return v;
    }
    const auto path = detail::imag_path(tau, xmin);
    const double c = std::cos(path.theta), sn = std::sin(path.theta);
    const double upper = detail::scaled_cutoff(xmin * c, detail::bessel_tail_exponent);
    auto f = [&xs, tau, c, sn](double u) {
        const double s = std::sinh(0.5 * u);
        const double su = std::sinh(u);
        std::array<double, N> out{};
        for (std::size_t i = 0; i < N; ++i)
            out[i] = std::exp(-2.0 * xs[i] * c * s * s) * std::cos(tau * u - xs[i] * sn * su);
        return out;
    };
    auto v = integrate_trapezoid_halfline(f, upper, path.step, detail::bessel_rel_tol, 1e-300).value;
    for (std::size_t i = 0; i < N; ++i)
        v[i] *= std::exp(xs[i] * (1.0 - c) - tau * path.theta);
    return v;
}

/// dK_{i tau}(x)/dx = -int_0^inf cosh u e^{-x cosh u} cos(tau u) du, on the
/// same path or series as bessel_k_imag.
inline double bessel_k_imag_dx(double tau, double x)
{
    detail::check_argument(x, "bessel_k_imag_dx");
    detail::check_imag_order(tau, "bessel_k_imag_dx");
    if (detail::use_series(tau, x))
        return detail::k_imag_series(tau, x).x_dk / x;
    const auto path = detail::imag_path(tau, x);
    const double c = std::cos(path.theta), sn = std::sin(path.theta);
    // cosh u adds at most u to the exponent
    double upper = detail::scaled_cutoff(x * c, detail::bessel_tail_exponent);
    while (2.0 * x * c * std::pow(std::sinh(0.5 * upper), 2) - upper < detail::bessel_tail_exponent)
        upper += 0.5;
    // Re[cosh(u + i theta) e^{i phi}], phi = tau u - x sin(theta) sinh u
    auto f = [=](double u) {
        const double s = std::sinh(0.5 * u);
        const double phi = tau * u - x * sn * std::sinh(u);
        return std::exp(-2.0 * x * c * s * s)
             * (std::cosh(u) * c * std::cos(phi) - std::sinh(u) * sn * std::sin(phi));
    };
    const auto r = integrate_trapezoid_halfline(f, upper, path.step, detail::bessel_rel_tol, 1e-300);
    return -std::exp(-x * c - tau * path.theta) * r.value;
}
/// K_nu(x) for real nu in [0, 60], x > 0.
inline double bessel_k_real(double nu, double x)
{
    detail::check_argument(x, "bessel_k_real");
    if (!(nu >= 0.0))
        throw std::domain_error("bessel_k_real: order must be >= 0");
    if (nu > max_real_order) {
        std::ostringstream msg;
        msg << "bessel_k_real: order " << nu << " exceeds cap " << max_real_order;
        throw order_too_large_error(msg.str());
    }
    // log of the scaled integrand: nu u - 2x sinh^2(u/2) + log((1 + e^{-2 nu u}) / 2)
    auto log_f = [nu, x](double u) {
        const double s = std::sinh(0.5 * u);
        return nu * u - 2.0 * x * s * s + std::log1p(std::exp(-2.0 * nu * u)) - std::numbers::ln2;
    };
    const double peak_u = std::asinh(nu / x);
    const double peak = log_f(peak_u);
    if (peak - x > std::log(std::numeric_limits<double>::max()) - 1.0) {
        std::ostringstream msg;
        msg << "bessel_k_real: K_" << nu << "(" << x << ") overflows double precision";
        throw order_too_large_error(msg.str());
    }
    double upper = std::max(peak_u, 1.0);
    double step = 0.5;
    while (peak - log_f(upper) < detail::bessel_tail_exponent) {
        upper += step;
        step *= 1.5;
    }
    auto f = [&](double u) { return std::exp(log_f(u) - peak); };
    const double h0 = std::min(0.5, 1.0 / std::sqrt(x * std::cosh(peak_u) + 1.0));
    const auto r = integrate_trapezoid_halfline(f, upper, h0, detail::bessel_rel_tol, 1e-300);
    return std::exp(peak - x) * r.value;
}

/// I_m(x) for integer m >= 0 by its power series (at most 500 terms).
inline double bessel_i_int(int m, double x)
{
    if (m < 0)
        throw std::domain_error("bessel_i_int: order must be >= 0");
    if (!std::isfinite(x))
        throw std::domain_error("bessel_i_int: argument must be finite");
    if (x == 0.0)
        return m == 0 ? 1.0 : 0.0;
    const double ax = std::abs(x);
    const double half = 0.5 * ax;
    double term = std::exp(m * std::log(half) - std::lgamma(m + 1.0));
    double sum = term;
    const double q = half * half;
    for (int k = 1; k < 500; ++k) {
        term *= q / (static_cast<double>(k) * (k + m));
        sum += term;
        if (term < 1e-17 * sum || term == 0.0)
            break;
    }
    return (x < 0.0 && (m % 2 == 1)) ? -sum : sum;
}

/// K_0 against its large- and small-argument behaviour at each grid point.
///
/// x >= 1: ratio K_0(x) / (sqrt(pi/2x) e^{-x}) against 1, tolerance 0.2/x.
/// x < 1:  K_0(x) against -log x, passing when the gap stays O(1) (<= 1).
/// A final entry records whether the deviation shrinks monotonically as the
/// grid moves deeper into each regime.
inline CheckSuite check_k_asymptotics(std::span<const double> x_grid)
{
    CheckSuite suite{"bessel.asymptotics", {}};
    double last_large = std::numeric_limits<double>::infinity();
    double last_large_x = 0.0;
    double last_small = std::numeric_limits<double>::infinity();
    double last_small_x = std::numeric_limits<double>::infinity();
    int violations = 0;
    // limit of K_0(x) + log x as x -> 0
    const double small_limit = std::numbers::ln2 - std::numbers::egamma;
    for (double x : x_grid) {
        detail::check_argument(x, "check_k_asymptotics");
        const double k0 = bessel_k_real(0.0, x);
        std::ostringstream ctx;
        ctx.precision(6);
        if (x >= 1.0) {
            const double ratio = k0 / (std::sqrt(std::numbers::pi / (2.0 * x)) * std::exp(-x));
            ctx << "K_0(" << x << ") / large-argument asymptote";
            suite.add(make_report(ctx.str(), ratio, 1.0, 0.2 / x));
            const double dev = std::abs(ratio - 1.0);
            if (x > last_large_x) {
                if (dev > last_large)
                    ++violations;
                last_large = dev;
                last_large_x = x;
            }
        } else {
            ctx << "K_0(" << x << ") vs -log x";
            suite.add(make_report(ctx.str(), k0, -std::log(x), 1.0));
            const double dev = std::abs(k0 + std::log(x) - small_limit);
            if (x < last_small_x) {
                if (dev > last_small)
                    ++violations;
                last_small = dev;
                last_small_x = x;
            }
        }
    }
    suite.add(make_predicate_report("asymptotic deviation decreases along the grid", violations, 0.0,
                                    violations == 0));
    return suite;
}

} // namespace yorkl

#endif // YORKL_BESSEL_HPP
