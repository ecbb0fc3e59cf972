#ifndef YORKL_YOR_HPP
#define YORKL_YOR_HPP

// The Yor integral F_t(r) and its spectral companions.
//
// Direct form:
//     F_t(r) = 2 e^{pi^2/2t} / sqrt(2 pi^3 t)
//              * int_0^inf e^{-y^2/2t - r cosh y} sinh y sin(pi y / t) dy
// Spectral form:
//     F_t(r) = 2/(r pi^2) int_0^inf e^{-t tau^2/2} tau sinh(pi tau) K_{i tau}(r) dtau
//
// Both are restricted to t in [0.2, 10], r in (0, 50]. Below t = 0.2 the
// direct integrand is e^{pi^2/2t} times a fast oscillation and loses most of
// its digits to cancellation.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "yorkl/bessel.hpp"
#include "yorkl/errors.hpp"
#include "yorkl/polys.hpp"
#include "yorkl/quadrature.hpp"
#include "yorkl/report.hpp"

namespace yorkl {

inline constexpr double yor_t_min = 0.2;
inline constexpr double yor_t_max = 10.0;
inline constexpr double yor_r_max = 50.0;
inline constexpr int yor_max_t_derivative = 4;
inline constexpr int yor_max_series_terms = 8;

enum class YorMethod { direct, spectral, polyseries };

inline const char* to_string(YorMethod m)
{
    switch (m) {
    case YorMethod::direct: return "direct";
    case YorMethod::spectral: return "spectral";
    case YorMethod::polyseries: return "polyseries";
    }
    return "?";
}

struct DensityPoint {
    double r = 0.0;
    double t = 0.0;
    double value = 0.0;
    YorMethod method = YorMethod::direct;
    double error_estimate = 0.0;
};

namespace detail {

inline void check_time(double t, const char* who)
{
    if (!(t > 0.0) || !std::isfinite(t))
        throw std::domain_error(std::string(who) + ": t must be positive");
    std::ostringstream msg;
    if (t < yor_t_min) {
        msg << who << ": t = " << t << " is below the supported window [" << yor_t_min << ", " << yor_t_max
            << "]; small t makes the oscillatory integral cancel catastrophically (small-t instability)";
        throw window_error(msg.str());
    }
    if (t > yor_t_max) {
        msg << who << ": t = " << t << " is above the supported window [" << yor_t_min << ", " << yor_t_max
            << "]";
        throw window_error(msg.str());
    }
}

inline void check_window(double r, double t, const char* who)
{
    check_time(t, who);
    if (!(r > 0.0) || !std::isfinite(r))
        throw std::domain_error(std::string(who) + ": r must be positive");
    if (r > yor_r_max) {
        std::ostringstream msg;
        msg << who << ": r = " << r << " exceeds the supported window (0, " << yor_r_max << "]";
        throw window_error(msg.str());
    }
}

/// Direct form without window checks, as e^{-r} * integral. Used by the
/// transform checks, which need F_t slightly beyond r = 50.
inline DensityPoint yor_direct_unchecked(double r, double t, const QuadratureSpec& spec)
{
    const double pi = std::numbers::pi;
    const double lift = pi * pi / (2.0 * t);
    auto envelope = [=](double y) {
        const double s = std::sinh(0.5 * y);
        return std::exp(lift - y * y / (2.0 * t) - 2.0 * r * s * s) * std::sinh(y);
    };
    // sinh y <= e^y
    auto damping = [=](double y) {
        const double s = std::sinh(0.5 * y);
        return y * y / (2.0 * t) + 2.0 * r * s * s - y - lift;
    };
    const auto res = integrate_damped_oscillatory(envelope, damping, pi / t, Oscillation::sine, spec);
    const double scale = 2.0 / std::sqrt(2.0 * pi * pi * pi * t) * std::exp(-r);
    DensityPoint p{r, t, scale * res.value, YorMethod::direct, 0.0};
    p.error_estimate = scale * (res.error_estimate + roundoff_floor(res.l1_norm));
    return p;
}

/// Largest tau needed for int e^{-t tau^2/2} tau^{2m+1} sinh(pi tau) K_{i tau} dtau:
/// the root of t tau^2/2 - pi tau/2 - (2m+1) ln(1+tau) = D ln 10. For m = 0 the
/// log term only nudges the classic root pi/2t + sqrt((pi/2t)^2 + 2 D ln10 / t).
inline double spectral_cutoff(double t, int m, const QuadratureSpec& spec)
{
    const double pi = std::numbers::pi;
    auto damping = [=](double tau) {
        return t * tau * tau / 2.0 - pi * tau / 2.0 - (2.0 * m + 1.0) * std::log1p(tau);
    };
    return truncation_point(damping, 0.0, spec.tail_exponent());
}

inline void check_spectral_cutoff(double tau_max, const char* who)
{
    if (tau_max > max_imag_order) {
        std::ostringstream msg;
        msg << who << ": spectral truncation tau_max = " << tau_max << " exceeds the Bessel order cap "
            << max_imag_order << "; parameters are outside the supported window";
        throw window_error(msg.str());
    }
}

inline std::vector<double> unit_cuts(double a, double b, double step = 1.0)
{
    std::vector<double> cuts;
    for (double x = std::floor(a / step + 1.0) * step; x < b; x += step)
        cuts.push_back(x);
    return cuts;
}

/// Walks s = start, start - 1, ... until |g| has stayed below `ratio` times
/// its running peak for two consecutive steps (or s reaches floor). Meant for
/// integrands with Gaussian-like decay in s whose far tail is only rounding
/// noise; ratio should sit above that noise and below the target accuracy.
template <class G>
double scan_lower_limit(G&& g, double start, double ratio, double floor)
{
    double peak = 0.0;
    int quiet = 0;
    double s = start;
    while (s > floor) {
        const double v = std::abs(g(s));
        peak = std::max(peak, v);
        quiet = (peak > 0.0 && v <= ratio * peak) ? quiet + 1 : 0;
        if (quiet >= 2)
            return s;
        s -= 1.0;
    }
    return floor;
}

/// Point for a t-derivative moment: value is d^m F_t(r) / dt^m.
struct SpectralPoint {
    double r;
    double t;
    int m;
};

/// d^m F / dt^m = 2^{1-m} (-1)^m / (pi^2 r) int e^{-t tau^2/2} tau^{2m+1} sinh(pi tau) K_{i tau}(r) dtau
/// for several points on one shared set of tau nodes (and shared Bessel nodes).
template <std::size_t N>
BasicEvalResult<std::array<double, N>> spectral_moments(const std::array<SpectralPoint, N>& pts,
                                                        const QuadratureSpec& spec)
{
    const double pi = std::numbers::pi;
    double tau_max = 0.0;
    std::array<double, N> radii{};
    for (std::size_t i = 0; i < N; ++i) {
        if (pts[i].m < 0 || pts[i].m > yor_max_t_derivative)
            throw std::domain_error("spectral_moments: derivative order must be in [0, 4]");
        radii[i] = pts[i].r;
        tau_max = std::max(tau_max, spectral_cutoff(pts[i].t, pts[i].m, spec));
    }
    check_spectral_cutoff(tau_max, "spectral_moments");
    auto f = [&](double tau) {
        const auto k = bessel_k_imag_scaled_stencil(tau, radii);
        std::array<double, N> out{};
        for (std::size_t i = 0; i < N; ++i) {
            const double g = -pts[i].t * tau * tau / 2.0;
            const double sh = 0.5 * (std::exp(g + pi * tau) - std::exp(g - pi * tau));
            out[i] = std::pow(tau, 2 * pts[i].m + 1) * sh * k[i];
        }
        return out;
    };
    const auto cuts = unit_cuts(0.0, tau_max);
    auto res = integrate_finite(f, 0.0, tau_max, spec, cuts);
    for (std::size_t i = 0; i < N; ++i) {
        const double c = std::ldexp(1.0, 1 - pts[i].m) * (pts[i].m % 2 == 0 ? 1.0 : -1.0)
                       * std::exp(-pts[i].r) / (pi * pi * pts[i].r);
        res.value[i] *= c;
    }
    // error estimate stays in the scaled units of the integrand
    return res;
}

/// int e^{-t tau^2/2} tau sinh(pi tau) e^x K_{i tau}(x) e^y K_{i tau}(y) dtau.
inline EvalResult heat_kernel_scaled(double t, double x, double y, const QuadratureSpec& spec)
{
    const double pi = std::numbers::pi;
    const double tau_max = spectral_cutoff(t, 0, spec);
    check_spectral_cutoff(tau_max, "heat_kernel");
    const std::array<double, 2> xy{x, y};
    auto f = [&](double tau) {
        const auto k = bessel_k_imag_scaled_stencil(tau, xy);
        const double g = -t * tau * tau / 2.0;
        return tau * 0.5 * (std::exp(g + pi * tau) - std::exp(g - pi * tau)) * k[0] * k[1];
    };
    const auto cuts = unit_cuts(0.0, tau_max);
    return integrate_finite(f, 0.0, tau_max, spec, cuts);
}

} // namespace detail

/// F_t(r) from the elementary oscillatory integral.
inline DensityPoint yor_direct(double r, double t, const QuadratureSpec& spec = {})
{
    spec.validate();
    detail::check_window(r, t, "yor_direct");
    return detail::yor_direct_unchecked(r, t, spec);
}

/// F_t(r) from the Kontorovich-Lebedev inversion of e^{-t tau^2/2}.
inline DensityPoint yor_spectral(double r, double t, const QuadratureSpec& spec = {})
{
    spec.validate();
    detail::check_window(r, t, "yor_spectral");
    const auto res = detail::spectral_moments<1>({detail::SpectralPoint{r, t, 0}}, spec);
    const double scale = 2.0 * std::exp(-r) / (std::numbers::pi * std::numbers::pi * r);
    return {r, t, res.value[0], YorMethod::spectral, scale * res.error_estimate};
}

/// d^m F_t(r) / dt^m, m <= 4. m = 0 is yor_spectral.
inline double yor_dt_derivative(double r, double t, int m, const QuadratureSpec& spec = {})
{
    spec.validate();
    detail::check_window(r, t, "yor_dt_derivative");
    if (m < 0 || m > yor_max_t_derivative)
        throw std::domain_error("yor_dt_derivative: m must be in [0, 4]");
    return detail::spectral_moments<1>({detail::SpectralPoint{r, t, m}}, spec).value[0];
}

/// int_0^inf K_{i tau}(r) F_t(r) dr against e^{-t tau^2 / 2}.
inline CrossCheckReport yor_kl_image(double tau, double t, const QuadratureSpec& spec = {})
{
    spec.validate();
    detail::check_time(t, "yor_kl_image");
    detail::check_imag_order(tau, "yor_kl_image");
    const QuadratureSpec inner = spec.nested();
    // s = ln r; K_{i tau}(r) F_t(r) decays like e^{-2r}
    auto f = [&](double s) {
        const double r = std::exp(s);
        return bessel_k_imag(tau, r) * detail::yor_direct_unchecked(r, t, inner).value * r;
    };
    const double tail = spec.tail_exponent();
    const double s_lo = -tail;
    const double s_hi = std::log(tail / 2.0 + 5.0);
    const auto lhs = integrate_finite(f, s_lo, s_hi, spec, detail::unit_cuts(-12.0, s_hi));
    std::ostringstream ctx;
    ctx << "KL image of F_t at tau=" << tau << ", t=" << t;
    return make_report(ctx.str(), lhs.value, std::exp(-t * tau * tau / 2.0), 1e-6);
}

/// int_0^inf F_t(r)^2 r dr against e^{pi^2/4t} / (t sqrt(pi t)). With F_t
/// normalised so that its KL transform is e^{-t tau^2/2}, Parseval gives
/// half of that value, so this check reports rel_diff = 0.5.
/// yor_squared_norm_exact is the corrected closed form.
inline double yor_squared_norm_exact(double t)
{
    const double pi = std::numbers::pi;
    return std::exp(pi * pi / (4.0 * t)) / (2.0 * t * std::sqrt(pi * t));
}

inline CrossCheckReport yor_squared_norm(double t, const QuadratureSpec& spec = {})
{
    spec.validate();
    detail::check_time(t, "yor_squared_norm");
    const QuadratureSpec inner = spec.nested();
    auto f = [&](double s) {
        const double r = std::exp(s);
        const double v = detail::yor_direct_unchecked(r, t, inner).value;
        return v * v * r * r;
    };
    const double tail = spec.tail_exponent();
    const double s_lo = -tail / 2.0;
    const double s_hi = std::log(tail / 2.0 + 5.0);
    const auto lhs = integrate_finite(f, s_lo, s_hi, spec, detail::unit_cuts(-12.0, s_hi));
    const double pi = std::numbers::pi;
    std::ostringstream ctx;
    ctx << "squared norm of F_t at t=" << t;
    return make_report(ctx.str(), lhs.value, std::exp(pi * pi / (4.0 * t)) / (t * std::sqrt(pi * t)), 1e-5);
}

/// 2 dF/dt against r^2 F'' + r F' - r^2 F, r-derivatives by central
/// differences with step 1e-4 r. Passes when the residual is at most
/// 1e-4 max(1, |F|).
inline CrossCheckReport diffusion_residual(double r, double t, const QuadratureSpec& spec = {})
{
    spec.validate();
    detail::check_window(r, t, "diffusion_residual");
    const double h = 1e-4 * r;
    if (r - h <= 0.0 || r + h > yor_r_max * (1.0 + 1e-4))
        throw window_error("diffusion_residual: stencil leaves the window");
    const std::array<detail::SpectralPoint, 4> pts{
        detail::SpectralPoint{r - h, t, 0}, {r, t, 0}, {r + h, t, 0}, {r, t, 1}};
    const auto v = detail::spectral_moments(pts, spec).value;
    const double f = v[1];
    const double d1 = (v[2] - v[0]) / (2.0 * h);
    const double d2 = (v[2] - 2.0 * v[1] + v[0]) / (h * h);
    const double lhs = 2.0 * v[3];
    const double rhs = r * r * d2 + r * d1 - r * r * f;
    const double tol = 1e-4 * std::max(1.0, std::abs(f));
    std::ostringstream ctx;
    ctx << "diffusion equation residual at r=" << r << ", t=" << t;
    auto rep = make_report(ctx.str(), lhs, rhs, tol);
    rep.passed = rep.abs_diff <= tol;
    return rep;
}

/// The same equation for u = r F_t(r), i.e. for the t-moment integral
/// without the 1/r factor. F itself then obeys
/// 2 F_t = r^2 F'' + 3 r F' + F - r^2 F. Same step and tolerance as above.
inline CrossCheckReport diffusion_residual_rf(double r, double t, const QuadratureSpec& spec = {})
{
    spec.validate();
    detail::check_window(r, t, "diffusion_residual_rf");
    const double h = 1e-4 * r;
    const std::array<detail::SpectralPoint, 4> pts{
        detail::SpectralPoint{r - h, t, 0}, {r, t, 0}, {r + h, t, 0}, {r, t, 1}};
    const auto v = detail::spectral_moments(pts, spec).value;
    const std::array<double, 3> u{(r - h) * v[0], r * v[1], (r + h) * v[2]};
    const double d1 = (u[2] - u[0]) / (2.0 * h);
    const double d2 = (u[2] - 2.0 * u[1] + u[0]) / (h * h);
    const double lhs = 2.0 * r * v[3];
    const double rhs = r * r * d2 + r * d1 - r * r * u[1];
    const double tol = 1e-4 * std::max(1.0, std::abs(u[1]));
    std::ostringstream ctx;
    ctx << "diffusion equation residual for r F_t(r) at r=" << r << ", t=" << t;
    auto rep = make_report(ctx.str(), lhs, rhs, tol);
    rep.passed = rep.abs_diff <= tol;
    return rep;
}

/// Right side of |d^m F / dt^m| <= 2^{1/4-m} e^{pi^2/t} K_0(2r)^{1/2}
/// Gamma(4m+5/2)^{1/4} / (t^{m+3/4} pi^{11/8}).
inline double derivative_bound(double r, double t, int m)
{
    const double pi = std::numbers::pi;
    const double log_bound = (0.25 - m) * std::numbers::ln2 + pi * pi / t + 0.5 * std::log(bessel_k_real(0.0, 2.0 * r))
                           + 0.25 * std::lgamma(4.0 * m + 2.5) - (m + 0.75) * std::log(t)
                           - 1.375 * std::log(pi);
    return std::exp(log_bound);
}

inline CrossCheckReport derivative_bound_check(double r, double t, int m, const QuadratureSpec& spec = {})
{
    const double d = std::abs(yor_dt_derivative(r, t, m, spec));
    const double bound = derivative_bound(r, t, m);
    std::ostringstream ctx;
    ctx << "|d^" << m << "F/dt^" << m << "| <= bound at r=" << r << ", t=" << t;
    return make_predicate_report(ctx.str(), d, bound, d <= bound);
}

/// a_k(r, t) = int_0^inf e^{-u} h_t(r, u) p_k(u) du/u for k = 1..K, with
/// h_t the spectral heat kernel.
inline std::vector<double> polyseries_coefficients(double r, double t, int K, const QuadratureSpec& spec = {},
                                                   double* error_estimate = nullptr)
{
    spec.validate();
    detail::check_window(r, t, "polyseries_coefficients");
    if (K < 1 || K > yor_max_series_terms)
        throw std::domain_error("polyseries_coefficients: K must be in [1, 8]");
    constexpr std::size_t N = yor_max_series_terms;
    // p_k(u)/u has integer coefficients since p_k(0) = 0
    std::array<std::vector<double>, N> q{};
    for (int k = 1; k <= K; ++k) {
        const ExactPolynomial p = poly_recurrence(k);
        for (int j = 1; j <= p.degree(); ++j)
            q[k - 1].push_back(p.coeff(j).convert_to<double>());
    }
    auto horner = [](const std::vector<double>& c, double u) {
        double acc = 0.0;
        for (auto it = c.rbegin(); it != c.rend(); ++it)
            acc = acc * u + *it;
        return acc;
    };
    const double pi = std::numbers::pi;
    QuadratureSpec inner = spec.nested();
    inner.abs_tol = std::max(inner.abs_tol * 1e-30,
                             inner.rel_tol * std::abs(detail::heat_kernel_scaled(t, r, r, inner).value));
    // in s = ln u: e^{-u} h_t(r,u) p_k(u) ds, with h_t = 2 e^{-r-u}/(r pi^2) * scaled integral
    auto f = [&](double s) {
        const double u = std::exp(s);
        const double h = detail::heat_kernel_scaled(t, r, u, inner).value;
        const double w = 2.0 * std::exp(-r - 2.0 * u) / (r * pi * pi) * h * u;
        std::array<double, N> out{};
        for (int k = 1; k <= K; ++k)
            out[k - 1] = w * horner(q[k - 1], u);
        return out;
    };
    double c_max = 0.0;
    for (int k = 1; k <= K; ++k)
        for (double c : q[k - 1])
            c_max = std::max(c_max, std::abs(c));
    // |u p_K(u)/u| <= c_max (1+u)^K; the integrand then decays like e^{-2u}
    auto damping = [&](double u) { return 2.0 * u - K * std::log1p(u) - std::log(c_max * K); };
    const double tail = spec.tail_exponent();
    const double s_hi = std::log(truncation_point(damping, 0.0, tail));
    auto weight = [&](double s) { return f(s)[0]; };
    const double s_lo = detail::scan_lower_limit(weight, std::min(std::log(r), s_hi - 1.0),
                                                  1e-3 * spec.rel_tol, -tail);
    const auto res = integrate_finite(f, s_lo, s_hi, spec, detail::unit_cuts(s_lo, s_hi));
    if (error_estimate)
        *error_estimate = res.error_estimate;
    return std::vector<double>(res.value.begin(), res.value.begin() + K);
}

/// F_t(r) = sum_{k>=1} (-1)^k pi^{2(k-1)} / (2k-1)! a_k(r, t), truncated at K
/// terms. The tail is estimated from the ratio of the last two terms; a
/// non-decreasing pair at the cutoff is refused.
inline DensityPoint yor_polyseries(double r, double t, int K, const QuadratureSpec& spec = {})
{
    if (K < 2)
        throw std::domain_error("yor_polyseries: K must be at least 2");
    double quad_err = 0.0;
    const auto a = polyseries_coefficients(r, t, K, spec, &quad_err);
    const double pi = std::numbers::pi;
    std::vector<double> terms;
    double sum = 0.0;
    for (int k = 1; k <= K; ++k) {
        const double c = (k % 2 == 0 ? 1.0 : -1.0) * std::pow(pi, 2 * (k - 1)) / std::tgamma(2.0 * k);
        terms.push_back(c * a[k - 1]);
        sum += terms.back();
    }
    const double last = std::abs(terms[K - 1]);
    const double prev = std::abs(terms[K - 2]);
    const double ratio = prev > 0.0 ? last / prev : std::numeric_limits<double>::infinity();
    if (!(ratio < 1.0)) {
        std::ostringstream msg;
        msg << "yor_polyseries: terms are not decreasing at K=" << K << " (|T_K/T_{K-1}| = " << ratio
            << "); truncation would be unsound";
        throw truncation_error(msg.str());
    }
    const double tail = last * ratio / (1.0 - ratio);
    return {r, t, sum, YorMethod::polyseries, tail + quad_err};
}

} // namespace yorkl

#endif // YORKL_YOR_HPP
