#ifndef YORKL_KL_HPP
#define YORKL_KL_HPP

// Kontorovich-Lebedev transform pair
//
//     (G f)(tau) = int_0^inf K_{i tau}(r) f(r) dr,
//     f(r) = 2/(r pi^2) int_0^inf tau sinh(pi tau) K_{i tau}(r) (G f)(tau) dtau,
//
// the convolution
//
//     (f * h)(x) = 1/(2x) int int exp(-(x (u^2+y^2)/(u y) + y u / x) / 2) f(u) h(y) du dy,
//
// and the heat kernel built from them. Integrals over the positive axis are
// taken in s = ln r; test functions are assumed bounded near 0 unless a
// check says otherwise.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <gsl/gsl_spline.h>

#include "yorkl/bessel.hpp"
#include "yorkl/errors.hpp"
#include "yorkl/quadrature.hpp"
#include "yorkl/report.hpp"
#include "yorkl/yor.hpp"

namespace yorkl {

enum class Interpolation { linear, cubic };

struct TailModel {
    enum class Kind { zero, exponential };
    Kind kind = Kind::zero;
    double rate = 0.0;

    static TailModel zero() { return {}; }
    static TailModel exponential(double rate) { return {Kind::exponential, rate}; }
};

/// Tabulated function on a positive, strictly increasing grid. Interpolates
/// in ln x, piecewise linear or by a natural cubic spline; holds the first
/// value to the left of the grid and follows the declared tail model to the
/// right.
class SampledFunction {
public:
    SampledFunction(std::vector<double> grid, std::vector<double> values,
                    Interpolation interp = Interpolation::cubic, TailModel tail = TailModel::zero())
        : grid_(std::move(grid)), values_(std::move(values)), interp_(interp), tail_(tail)
    {
        if (grid_.size() != values_.size())
            throw std::invalid_argument("SampledFunction: grid and values differ in length");
        const std::size_t min_size = interp_ == Interpolation::cubic ? 4 : 2;
        if (grid_.size() < min_size)
            throw std::invalid_argument("SampledFunction: too few samples for the interpolation");
        if (!(grid_.front() > 0.0))
            throw std::invalid_argument("SampledFunction: grid must be positive");
        for (std::size_t i = 1; i < grid_.size(); ++i)
            if (!(grid_[i] > grid_[i - 1]))
                throw std::invalid_argument("SampledFunction: grid must be strictly increasing");
        for (double v : values_)
            if (!std::isfinite(v))
                throw std::invalid_argument("SampledFunction: non-finite sample");
        if (tail_.kind == TailModel::Kind::exponential && !(tail_.rate > 0.0))
            throw tail_model_error("SampledFunction: exponential tail needs a positive rate");
        log_grid_.reserve(grid_.size());
        for (double x : grid_)
            log_grid_.push_back(std::log(x));
        if (interp_ == Interpolation::cubic) {
            gsl_spline* sp = gsl_spline_alloc(gsl_interp_cspline, grid_.size());
            gsl_spline_init(sp, log_grid_.data(), values_.data(), grid_.size());
            spline_ = std::shared_ptr<gsl_spline>(sp, gsl_spline_free);
        }
    }

    const std::vector<double>& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    Interpolation interpolation() const { return interp_; }
    const TailModel& tail() const { return tail_; }

    double operator()(double x) const
    {
        if (!(x > 0.0))
            throw std::domain_error("SampledFunction: argument must be positive");
        if (x <= grid_.front())
            return values_.front();
        if (x >= grid_.back()) {
            if (tail_.kind == TailModel::Kind::zero)
                return x == grid_.back() ? values_.back() : 0.0;
            return values_.back() * std::exp(-tail_.rate * (x - grid_.back()));
        }
        const double s = std::log(x);
        if (interp_ == Interpolation::cubic)
            return gsl_spline_eval(spline_.get(), s, nullptr);
        const auto it = std::upper_bound(log_grid_.begin(), log_grid_.end(), s);
        const auto i = static_cast<std::size_t>(it - log_grid_.begin()) - 1;
        const double w = (s - log_grid_[i]) / (log_grid_[i + 1] - log_grid_[i]);
        return values_[i] + w * (values_[i + 1] - values_[i]);
    }

    /// Throws tail_model_error when the last samples contradict the declared
    /// tail: a zero tail needs the data to have died out (last |value| at most
    /// 1e-12 of the peak), an exponential tail needs positive samples whose
    /// local decay rate is within 50% of the declared one.
    void check_tail() const
    {
        const std::size_t n = values_.size();
        double peak = 0.0;
        for (double v : values_)
            peak = std::max(peak, std::abs(v));
        std::ostringstream msg;
        if (tail_.kind == TailModel::Kind::zero) {
            if (std::abs(values_.back()) > 1e-12 * peak) {
                msg << "SampledFunction: declared zero tail but last sample " << values_.back()
                    << " has not decayed (peak " << peak << ")";
                throw tail_model_error(msg.str());
            }
            return;
        }
        const double a = values_[n - 2], b = values_[n - 1];
        if (!(a > 0.0) || !(b > 0.0)) {
            msg << "SampledFunction: exponential tail declared but last samples are not positive";
            throw tail_model_error(msg.str());
        }
        const double rate = std::log(a / b) / (grid_[n - 1] - grid_[n - 2]);
        if (std::abs(rate - tail_.rate) > 0.5 * tail_.rate) {
            msg << "SampledFunction: declared tail rate " << tail_.rate << " but samples decay at rate " << rate;
            throw tail_model_error(msg.str());
        }
    }

private:
    std::vector<double> grid_;
    std::vector<double> values_;
    std::vector<double> log_grid_;
    Interpolation interp_;
    TailModel tail_;
    std::shared_ptr<gsl_spline> spline_;
};

struct HeatKernelPoint {
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
    double value = 0.0;
};

/// Result of an L^alpha norm: finite is false when the integrand does not
/// decay towards x = 0.
struct LAlphaNorm {
    double value = 0.0;
    bool finite = false;
};

/// |alpha| beyond this overflows K_alpha at the truncation point e^{-D ln 10}.
inline constexpr double max_l_alpha_order = 7.0;

namespace detail {

inline void check_positive(double v, const char* who, const char* name)
{
    if (!(v > 0.0) || !std::isfinite(v))
        throw std::domain_error(std::string(who) + ": " + name + " must be positive");
}

/// Unit cuts in [lo, hi] but none below `dense_from`; far-left panels of
/// these log-variable integrals carry almost no mass.
inline std::vector<double> log_cuts(double lo, double hi, double dense_from = -12.0)
{
    return unit_cuts(std::max(lo, dense_from - 1.0), hi);
}

/// int_0^inf K_{i tau}(r) f(r) dr in s = ln r over [-T, ln(T + 10)].
template <class F>
EvalResult kl_forward_result(F&& f, double tau, const QuadratureSpec& spec)
{
    spec.validate();
    check_imag_order(tau, "kl_forward");
    auto g = [&](double s) {
        const double r = std::exp(s);
        return bessel_k_imag(tau, r) * f(r) * r;
    };
    const double tail = spec.tail_exponent();
    const double s_lo = -tail;
    const double s_hi = std::log(tail + 10.0);
    return integrate_finite(g, s_lo, s_hi, spec, log_cuts(s_lo, s_hi));
}

/// Upper limit of the inversion tau integral: where damping(tau) - pi tau/2
/// - ln(1+tau) reaches D ln 10. Throws divergence_error when it cannot
/// before the Bessel order cap.
template <class D>
double inversion_cutoff(D&& damping, const QuadratureSpec& spec, const char* who)
{
    const double pi = std::numbers::pi;
    auto total = [&](double tau) { return damping(tau) - pi * tau / 2.0 - std::log1p(tau); };
    if (total(max_imag_order) < spec.tail_exponent()) {
        std::ostringstream msg;
        msg << who << ": declared decay of the spectral function is too weak; the tau integral does not "
            << "reach 1e-" << spec.truncation_log_decades << " before tau = " << max_imag_order;
        throw divergence_error(msg.str());
    }
    return truncation_point(total, 0.0, spec.tail_exponent());
}

/// Root of e^sigma/(2x) - sigma = T, the right edge of sigma = ln(u y).
inline double convolution_sigma_max(double x, double exponent)
{
    double sigma = std::log(2.0 * x * exponent);
    for (int i = 0; i < 50; ++i)
        sigma = std::log(2.0 * x * (exponent + std::max(sigma, 0.0)));
    return sigma + 1.0;
}

} // namespace detail

/// (G f)(tau) for a callable f(r).
template <class F>
double kl_forward(F&& f, double tau, const QuadratureSpec& spec = {})
{
    return detail::kl_forward_result(f, tau, spec).value;
}

/// (G f)(tau) for tabulated data, after checking the declared tail.
inline double kl_forward(const SampledFunction& f, double tau, const QuadratureSpec& spec = {})
{
    f.check_tail();
    return detail::kl_forward_result(f, tau, spec).value;
}

/// f(r) = 2/(r pi^2) int tau sinh(pi tau) K_{i tau}(r) g(tau) dtau. `damping`
/// is a lower bound on -ln|g(tau)|, increasing for large tau.
template <class G, class D>
double kl_inverse(G&& g, D&& damping, double r, const QuadratureSpec& spec = {})
{
    spec.validate();
    detail::check_positive(r, "kl_inverse", "r");
    const double pi = std::numbers::pi;
    const double tau_max = detail::inversion_cutoff(damping, spec, "kl_inverse");
    auto f = [&](double tau) {
        const double sh = tau > 0.0 ? std::exp(pi * tau + std::log1p(-std::exp(-2.0 * pi * tau))) / 2.0 : 0.0;
        return tau * sh * bessel_k_imag(tau, r) * g(tau);
    };
    const auto res = integrate_finite(f, 0.0, tau_max, spec, detail::unit_cuts(0.0, tau_max));
    return 2.0 / (r * pi * pi) * res.value;
}

/// int tau sinh(pi tau) |G f|^2 dtau against (pi^2/2) int |f|^2 r dr, at 1e-5.
/// `spectral_damping` is a lower bound on -ln|(G f)(tau)|.
template <class F, class D>
CrossCheckReport parseval_check(F&& f, D&& spectral_damping, const QuadratureSpec& spec = {},
                                std::string label = "f")
{
    spec.validate();
    const double pi = std::numbers::pi;
    const QuadratureSpec inner = spec.nested();
    // |G f|^2 halves the decay the inversion needs
    auto doubled = [&](double tau) { return 2.0 * spectral_damping(tau) - pi * tau / 2.0; };
    const double tau_max = detail::inversion_cutoff(doubled, spec, "parseval_check");
    // every transform visits the same r nodes
    std::unordered_map<double, double> memo;
    auto f_memo = [&](double r) {
        const auto it = memo.find(r);
        if (it != memo.end())
            return it->second;
        const double v = f(r);
        memo.emplace(r, v);
        return v;
    };
    auto lhs_f = [&](double tau) {
        const double g = detail::kl_forward_result(f_memo, tau, inner).value;
        const double sh = tau > 0.0 ? std::exp(pi * tau + std::log1p(-std::exp(-2.0 * pi * tau))) / 2.0 : 0.0;
        return tau * sh * g * g;
    };
    const auto lhs = integrate_finite(lhs_f, 0.0, tau_max, spec);
    auto rhs_f = [&](double s) {
        const double r = std::exp(s);
        const double v = f(r);
        return v * v * r * r;
    };
    const double tail = spec.tail_exponent();
    const double s_lo = -tail / 2.0;
    const double s_hi = std::log(tail + 10.0);
    const auto rhs = integrate_finite(rhs_f, s_lo, s_hi, spec, detail::log_cuts(s_lo, s_hi));
    return make_report("Parseval identity for " + label, lhs.value, pi * pi / 2.0 * rhs.value, 1e-5);
}

/// int_0^inf |f(x)| K_alpha(x) dx. The integral runs over [-T, ln(T+10)] in
/// s = ln x; the part left of -T is added from the local exponential decay
/// rate there. A rate that is not clearly positive means the integral
/// diverges at 0 and finite is false.
template <class F>
LAlphaNorm l_alpha_norm(F&& f, double alpha, const QuadratureSpec& spec = {})
{
    spec.validate();
    const double a = std::abs(alpha);
    if (!std::isfinite(alpha) || a > max_l_alpha_order) {
        std::ostringstream msg;
        msg << "l_alpha_norm: |alpha| = " << a << " exceeds the overflow guard " << max_l_alpha_order;
        throw order_too_large_error(msg.str());
    }
    auto g = [&](double s) {
        const double x = std::exp(s);
        return std::abs(f(x)) * bessel_k_real(a, x) * x;
    };
    const double tail = spec.tail_exponent();
    const double s_lo = -tail;
    const double s_hi = std::log(tail + 10.0);
    const auto res = integrate_finite(g, s_lo, s_hi, spec, detail::log_cuts(s_lo, s_hi));
    LAlphaNorm out{res.value, true};
    const double g0 = g(s_lo);
    if (g0 > 0.0) {
        const double rate = std::log(g(s_lo + 1.0) / g0);
        if (!(rate > 1e-3)) {
            out.finite = false;
            out.value = std::numeric_limits<double>::infinity();
        } else {
            out.value += g0 / rate;
        }
    }
    return out;
}

/// (f * h)(x). Both functions must have finite L^0 norms, which is checked
/// unless check_membership is false.
///
/// In s = ln u, w = ln y the kernel is exp(-x cosh(s - w) - e^{s+w}/(2x))
/// e^{s+w}; it is evaluated as e^{-x} exp(-2x sinh^2(d/2) - e^sigma/(2x) + sigma)
/// with d = s - w, sigma = s + w, so no factor overflows on its own. The
/// domain is cut where that exponent passes -D ln 10.
template <class F, class H>
double kl_convolution(F&& f, H&& h, double x, const QuadratureSpec& spec = {}, bool check_membership = true)
{
    spec.validate();
    detail::check_positive(x, "kl_convolution", "x");
    if (check_membership) {
        if (!l_alpha_norm(f, 0.0, spec).finite || !l_alpha_norm(h, 0.0, spec).finite)
            throw ring_membership_error("kl_convolution: an operand has infinite L^0 norm");
    }
    const double tail = spec.tail_exponent();
    const double delta = detail::scaled_cutoff(x, tail);
    const double sigma_hi = detail::convolution_sigma_max(x, tail);
    const double sigma_lo = -tail;
    const double w_lo = 0.5 * (sigma_lo - delta);
    const double w_hi = 0.5 * (sigma_hi + delta);
    const QuadratureSpec inner = spec.nested();

    auto outer = [&](double w) {
        const double s_lo = std::max(w - delta, sigma_lo - w);
        const double s_hi = std::min(w + delta, sigma_hi - w);
        if (!(s_lo < s_hi))
            return 0.0;
        const double hw = h(std::exp(w));
        if (hw == 0.0)
            return 0.0;
        auto in = [&](double s) {
            const double d = 0.5 * (s - w);
            const double sigma = s + w;
            const double sh = std::sinh(d);
            return std::exp(-2.0 * x * sh * sh - std::exp(sigma) / (2.0 * x) + sigma) * f(std::exp(s));
        };
        return hw * integrate_finite(in, s_lo, s_hi, inner, detail::log_cuts(s_lo, s_hi)).value;
    };
    const auto res = integrate_finite(outer, w_lo, w_hi, spec, detail::log_cuts(w_lo, w_hi, -6.0));
    return std::exp(-x) / (2.0 * x) * res.value;
}

/// G[f * h](tau) by triple quadrature against (G f)(tau) (G h)(tau), at 1e-4.
template <class F, class H>
CrossCheckReport factorization_check(F&& f, H&& h, double tau, const QuadratureSpec& spec = {},
                                     std::string label = "f * h")
{
    spec.validate();
    detail::check_imag_order(tau, "factorization_check");
    if (!l_alpha_norm(f, 0.0, spec).finite || !l_alpha_norm(h, 0.0, spec).finite)
        throw ring_membership_error("factorization_check: an operand has infinite L^0 norm");
    const QuadratureSpec inner = spec.nested();
    auto conv = [&](double x) { return kl_convolution(f, h, x, inner, false); };
    const double lhs = detail::kl_forward_result(conv, tau, spec).value;
    const double rhs = detail::kl_forward_result(f, tau, spec).value * detail::kl_forward_result(h, tau, spec).value;
    std::ostringstream ctx;
    ctx << "factorization G[" << label << "] = G f G h at tau=" << tau;
    return make_report(ctx.str(), lhs, rhs, 1e-4);
}

/// K_{i tau}(x) K_{i tau}(y) against 1/2 int exp(-(t (x^2+y^2)/(xy) + xy/t)/2) K_{i tau}(t) dt/t, at 1e-8.
inline CrossCheckReport macdonald_check(double tau, double x, double y, const QuadratureSpec& spec = {})
{
    spec.validate();
    detail::check_positive(x, "macdonald_check", "x");
    detail::check_positive(y, "macdonald_check", "y");
    detail::check_imag_order(tau, "macdonald_check");
    // in s = ln t the exponent is phi(s) = (c+2) e^s / 2 + x y e^{-s} / 2 with
    // c = (x^2+y^2)/(xy) once K is scaled; phi is minimal (= x + y) at s*
    const double c2 = (x * x + y * y) / (x * y) + 2.0;
    const double s_star = 0.5 * std::log(x * y / c2);
    const double phi_star = x + y;
    auto phi = [&](double s) { return 0.5 * c2 * std::exp(s) + 0.5 * x * y * std::exp(-s); };
    const double budget = spec.tail_exponent() + 5.0;
    const double right = truncation_point([&](double d) { return phi(s_star + d) - phi_star; }, 0.0, budget);
    const double left = truncation_point([&](double d) { return phi(s_star - d) - phi_star; }, 0.0, budget);
    auto g = [&](double s) { return 0.5 * std::exp(phi_star - phi(s)) * bessel_k_imag_scaled(tau, std::exp(s)); };
    const double a = s_star - left, b = s_star + right;
    const auto res = integrate_finite(g, a, b, spec, detail::unit_cuts(a, b));
    const double lhs = bessel_k_imag_scaled(tau, x) * bessel_k_imag_scaled(tau, y);
    std::ostringstream ctx;
    ctx << "Macdonald formula at nu=i*" << tau << ", x=" << x << ", y=" << y << " (scaled by e^{x+y})";
    return make_report(ctx.str(), lhs, res.value, 1e-8);
}

/// h_t(x, y) = 2/(x pi^2) int e^{-t tau^2/2} tau sinh(pi tau) K_{i tau}(x) K_{i tau}(y) dtau.
inline HeatKernelPoint heat_kernel(double t, double x, double y, const QuadratureSpec& spec = {})
{
    spec.validate();
    detail::check_time(t, "heat_kernel");
    detail::check_positive(x, "heat_kernel", "x");
    detail::check_positive(y, "heat_kernel", "y");
    const double pi = std::numbers::pi;
    const double v = detail::heat_kernel_scaled(t, x, y, spec).value;
    return {t, x, y, 2.0 * std::exp(-x - y) / (x * pi * pi) * v};
}

/// h_t(x, y) = 1/(2x) int exp(-(r (x^2+y^2)/(xy) + xy/r)/2) F_t(r) dr.
inline HeatKernelPoint heat_kernel_translation(double t, double x, double y, const QuadratureSpec& spec = {})
{
    spec.validate();
    detail::check_time(t, "heat_kernel_translation");
    detail::check_positive(x, "heat_kernel_translation", "x");
    detail::check_positive(y, "heat_kernel_translation", "y");
    const double c = (x * x + y * y) / (x * y);
    // exponent E(s) = (c e^s + x y e^{-s}) / 2 with F_t(r) = e^{-r} * (scaled)
    const double c1 = c + 2.0;
    const double s_star = 0.5 * std::log(x * y / c1);
    auto e = [&](double s) { return 0.5 * c1 * std::exp(s) + 0.5 * x * y * std::exp(-s); };
    const double e_star = e(s_star);
    const double budget = spec.tail_exponent() + 5.0;
    const double right = truncation_point([&](double d) { return e(s_star + d) - e_star; }, 0.0, budget);
    const double left = truncation_point([&](double d) { return e(s_star - d) - e_star; }, 0.0, budget);
    const QuadratureSpec inner = spec.nested();
    auto g = [&](double s) {
        const double r = std::exp(s);
        const double f_scaled = detail::yor_direct_unchecked(r, t, inner).value * std::exp(r);
        return std::exp(e_star - e(s) + s) * f_scaled;
    };
    const double a = s_star - left, b = s_star + right;
    const auto res = integrate_finite(g, a, b, spec, detail::unit_cuts(a, b));
    return {t, x, y, std::exp(-e_star) / (2.0 * x) * res.value};
}

/// F_t sampled on a log grid over [e^{-12}, 80] with an e^{-r} tail, for the
/// convolution checks.
inline SampledFunction sample_yor_density(double t, std::size_t points = 1000, const QuadratureSpec& spec = {})
{
    detail::check_time(t, "sample_yor_density");
    QuadratureSpec fine = spec;
    fine.rel_tol = std::min(spec.rel_tol, 1e-12);
    const double s_lo = -12.0, s_hi = std::log(80.0);
    std::vector<double> grid(points), values(points);
    for (std::size_t i = 0; i < points; ++i) {
        const double s = s_lo + (s_hi - s_lo) * static_cast<double>(i) / static_cast<double>(points - 1);
        grid[i] = std::exp(s);
        values[i] = detail::yor_direct_unchecked(grid[i], t, fine).value;
    }
    return SampledFunction(std::move(grid), std::move(values), Interpolation::cubic, TailModel::exponential(1.0));
}

/// int h_{t1}(r, y) F_{t2}(y) dy against F_{t1+t2}(r), at 1e-4.
inline CrossCheckReport semigroup_check(double t1, double t2, double r, const QuadratureSpec& spec = {})
{
    spec.validate();
    detail::check_time(t1, "semigroup_check");
    detail::check_time(t2, "semigroup_check");
    detail::check_window(r, t1 + t2, "semigroup_check");
    const double pi = std::numbers::pi;
    QuadratureSpec inner = spec.nested();
    inner.abs_tol = std::max(inner.abs_tol * 1e-30,
                             inner.rel_tol * std::abs(detail::heat_kernel_scaled(t1, r, r, inner).value));
    auto g = [&](double s) {
        const double y = std::exp(s);
        const double h = detail::heat_kernel_scaled(t1, r, y, inner).value;
        const double f_scaled = detail::yor_direct_unchecked(y, t2, inner).value * std::exp(y);
        return 2.0 * std::exp(-r - 2.0 * y) / (r * pi * pi) * h * f_scaled * y;
    };
    const double tail = spec.tail_exponent();
    const double s_hi = std::log(tail / 2.0 + 10.0);
    const double s_lo = detail::scan_lower_limit(g, std::min(std::log(r), s_hi - 1.0), 1e-3 * spec.rel_tol, -tail);
    const auto lhs = integrate_finite(g, s_lo, s_hi, spec, detail::unit_cuts(s_lo, s_hi));
    const double rhs = yor_spectral(r, t1 + t2, spec).value;
    std::ostringstream ctx;
    ctx << "semigroup int h_" << t1 << "(r,y) F_" << t2 << "(y) dy = F_" << t1 + t2 << "(r) at r=" << r;
    return make_report(ctx.str(), lhs.value, rhs, 1e-4);
}

/// (F_{t1} * F_{t2})(r) against F_{t1+t2}(r), at 1e-4. F_{t1}, F_{t2} enter
/// as sampled tables.
inline CrossCheckReport index_law_check(double t1, double t2, double r, const QuadratureSpec& spec = {})
{
    spec.validate();
    detail::check_window(r, t1 + t2, "index_law_check");
    const SampledFunction f1 = sample_yor_density(t1, 1000, spec);
    const SampledFunction f2 = sample_yor_density(t2, 1000, spec);
    f1.check_tail();
    f2.check_tail();
    QuadratureSpec conv_spec = spec;
    conv_spec.rel_tol = std::max(spec.rel_tol, 1e-8);
    const double lhs = kl_convolution(f1, f2, r, conv_spec);
    const double rhs = yor_spectral(r, t1 + t2, spec).value;
    std::ostringstream ctx;
    ctx << "index law (F_" << t1 << " * F_" << t2 << ")(r) = F_" << t1 + t2 << "(r) at r=" << r;
    return make_report(ctx.str(), lhs, rhs, 1e-4);
}

} // namespace yorkl

#endif // YORKL_KL_HPP
