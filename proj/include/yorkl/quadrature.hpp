#ifndef YORKL_QUADRATURE_HPP
#define YORKL_QUADRATURE_HPP

// Adaptive integration on finite and semi-infinite intervals.
//
// The workhorse is a globally adaptive bisection scheme built on a 10-point
// Gauss-Legendre panel rule. Each panel carries two refinement levels: the
// rule applied to the whole panel and the sum over its two halves. Their
// difference is the panel's error estimate and the finer value is what gets
// summed. The panel with the largest estimate is bisected until the total
// meets max(rel_tol*|I|, abs_tol) or the refinement budget runs out.
//
// Semi-infinite integrals are truncated where a caller-supplied lower bound
// on the damping exponent reaches D*ln(10), D = truncation_log_decades.
//
// All integrators accept integrands returning either double or
// std::array<double, N>; the array form integrates several functions on one
// shared set of nodes, which finite-difference stencils rely on.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <queue>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "yorkl/errors.hpp"

namespace yorkl {

struct QuadratureSpec {
    double rel_tol = 1e-10;
    double abs_tol = 1e-14;
    int max_refinements = 20000;          // bisections allowed per integral
    double truncation_log_decades = 40.0; // D

    void validate() const
    {
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
            throw std::invalid_argument("QuadratureSpec: tolerances must be positive");
        if (max_refinements < 1)
            throw std::invalid_argument("QuadratureSpec: max_refinements must be >= 1");
        if (!(truncation_log_decades > 0.0))
            throw std::invalid_argument("QuadratureSpec: truncation_log_decades must be positive");
    }

    /// Damping exponent at which tails are dropped.
    double tail_exponent() const { return truncation_log_decades * std::numbers::ln10; }

    /// Tolerances for the inner level of an iterated integral.
    QuadratureSpec nested() const
    {
        QuadratureSpec inner = *this;
        inner.rel_tol = rel_tol / 10.0;
        inner.abs_tol = abs_tol / 10.0;
        return inner;
    }
};

template <class V>
struct BasicEvalResult {
    V value{};
    double error_estimate = 0.0;
    double l1_norm = 0.0; // integral of |f|, the scale of summation rounding
    std::size_t nodes_used = 0;
    bool converged = false;
};

using EvalResult = BasicEvalResult<double>;

enum class Oscillation { cosine, sine };

/// Frequencies above this are refused by integrate_damped_oscillatory.
inline constexpr double max_oscillation_frequency = 1e4;

namespace detail {

template <class V>
struct value_ops;

template <>
struct value_ops<double> {
    static double zero() { return 0.0; }
    static double norm(double v) { return std::abs(v); }
    static bool finite(double v) { return std::isfinite(v); }
    static void axpy(double& acc, double w, double v) { acc += w * v; }
    static double sub(double a, double b) { return a - b; }
    static double add(double a, double b) { return a + b; }
    static double scale(double v, double s) { return v * s; }
};

template <std::size_t N>
struct value_ops<std::array<double, N>> {
    using V = std::array<double, N>;
    static V zero() { return V{}; }
    static double norm(const V& v)
    {
        double m = 0.0;
        for (double x : v)
            m = std::max(m, std::abs(x));
        return m;
    }
    static bool finite(const V& v)
    {
        return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
    }
    static void axpy(V& acc, double w, const V& v)
    {
        for (std::size_t i = 0; i < N; ++i)
            acc[i] += w * v[i];
    }
    static V sub(V a, const V& b)
    {
        for (std::size_t i = 0; i < N; ++i)
            a[i] -= b[i];
        return a;
    }
    static V add(V a, const V& b)
    {
        for (std::size_t i = 0; i < N; ++i)
            a[i] += b[i];
        return a;
    }
    static V scale(V v, double s)
    {
        for (double& x : v)
            x *= s;
        return v;
    }
};

template <class F>
using integrand_value_t = std::decay_t<std::invoke_result_t<F&, double>>;

/// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_N.
template <int N>
struct gauss_legendre {
    std::array<double, N> nodes{};
    std::array<double, N> weights{};

    gauss_legendre()
    {
        for (int i = 0; i < N; ++i) {
            double x = std::cos(std::numbers::pi * (i + 0.75) / (N + 0.5));
            double dp = 0.0;
            for (int iter = 0; iter < 100; ++iter) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= N; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = N * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16)
                    break;
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
    }

    static const gauss_legendre& get()
    {
        static const gauss_legendre rule;
        return rule;
    }
};

inline constexpr int panel_points = 10;

template <class V>
struct panel_sum {
    V value;
    double l1 = 0.0;
};

template <class F, class V = integrand_value_t<F>>
panel_sum<V> apply_panel_rule(F& f, double a, double b)
{
    using ops = value_ops<V>;
    const auto& rule = gauss_legendre<panel_points>::get();
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    panel_sum<V> out{ops::zero(), 0.0};
    for (int i = 0; i < panel_points; ++i) {
        const double x = mid + half * rule.nodes[i];
        const V fx = f(x);
        if (!ops::finite(fx)) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "non-finite integrand value at x = " << x;
            throw evaluation_error(msg.str(), x);
        }
        ops::axpy(out.value, rule.weights[i] * half, fx);
        out.l1 += rule.weights[i] * std::abs(half) * ops::norm(fx);
    }
    return out;
}

// Differences below this are indistinguishable from summation rounding.
inline double roundoff_floor(double l1) { return 50.0 * std::numeric_limits<double>::epsilon() * l1; }

} // namespace detail

/// Adaptive integral of f over [a, b]. Optional interior breakpoints seed the
/// initial partition (they must lie strictly inside (a, b), any order).
template <class F>
auto integrate_finite(F&& f, double a, double b, const QuadratureSpec& spec,
                      std::span<const double> breakpoints = {})
    -> BasicEvalResult<detail::integrand_value_t<F>>
{
    using V = detail::integrand_value_t<F>;
    using ops = detail::value_ops<V>;
    spec.validate();
    if (!(a < b))
        throw std::invalid_argument("integrate_finite: requires a < b");

    struct Panel {
        double a, b;
        V left, right;
        double l1, err;
        bool splittable;
    };

    std::vector<double> cuts{a};
    for (double p : breakpoints)
        if (p > a && p < b)
            cuts.push_back(p);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::vector<Panel> panels;
    std::vector<bool> live;
    panels.reserve(cuts.size() * 4);
    std::priority_queue<std::pair<double, std::size_t>> worst;
    std::size_t nodes = 0;
    V total = ops::zero();
    double total_err = 0.0;

    auto build = [&](double pa, double pb, const V& coarse) {
        const double mid = 0.5 * (pa + pb);
        auto l = detail::apply_panel_rule(f, pa, mid);
        auto r = detail::apply_panel_rule(f, mid, pb);
        nodes += 2 * detail::panel_points;
        const V fine = ops::add(l.value, r.value);
        const double l1 = l.l1 + r.l1;
        const double diff = ops::norm(ops::sub(fine, coarse));
        const double err = std::max(0.0, diff - detail::roundoff_floor(l1));
        const double width_floor = 64.0 * std::numeric_limits<double>::epsilon()
                                 * std::max(std::abs(pa), std::abs(pb));
        Panel p{pa, pb, l.value, r.value, l1, err, (pb - pa) > width_floor};
        total = ops::add(total, fine);
        total_err += err;
        panels.push_back(p);
        live.push_back(true);
        worst.emplace(err, panels.size() - 1);
    };

    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        auto whole = detail::apply_panel_rule(f, cuts[i], cuts[i + 1]);
        nodes += detail::panel_points;
        build(cuts[i], cuts[i + 1], whole.value);
    }

    int splits = 0;
    bool resolution_limited = false;
    auto target = [&] { return std::max(spec.rel_tol * ops::norm(total), spec.abs_tol); };
    while (total_err > target() && splits < spec.max_refinements && !worst.empty()) {
        const auto [err, idx] = worst.top();
        worst.pop();
        Panel p = panels[idx];
        if (!p.splittable) {
            resolution_limited = true;
            continue;
        }
        total = ops::sub(total, ops::add(p.left, p.right));
        total_err -= p.err;
        live[idx] = false;
        const double mid = 0.5 * (p.a + p.b);
        build(p.a, mid, p.left);
        build(mid, p.b, p.right);
        ++splits;
    }

    // Recompute sums from the live panels to shed accumulated drift.
    BasicEvalResult<V> out;
    out.value = ops::zero();
    for (std::size_t i = 0; i < panels.size(); ++i) {
        if (!live[i])
            continue;
        out.value = ops::add(out.value, ops::add(panels[i].left, panels[i].right));
        out.error_estimate += panels[i].err;
        out.l1_norm += panels[i].l1;
    }
    out.nodes_used = nodes;
    out.converged = !resolution_limited
                 && out.error_estimate <= std::max(spec.rel_tol * ops::norm(out.value), spec.abs_tol);
    return out;
}

/// Smallest x >= a (to bisection accuracy) at which the monotone damping
/// exponent reaches `threshold`.
template <class D>
double truncation_point(D&& damping, double a, double threshold, double cap = 1e8)
{
    double step = 1.0;
    double lo = a;
    while (damping(a + step) < threshold) {
        lo = a + step;
        step *= 2.0;
        if (step > cap)
            throw unbounded_tail_error("no truncation point: damping exponent stays below threshold up to x = "
                                       + std::to_string(a + step));
    }
    double hi = a + step;
    for (int i = 0; i < 60 && hi - lo > 1e-12 * std::max(1.0, std::abs(hi)); ++i) {
        const double mid = 0.5 * (lo + hi);
        (damping(mid) < threshold ? lo : hi) = mid;
    }
    return hi;
}

/// Integral of f over [a, inf). `damping(x)` is a monotone lower bound on
/// -ln|f(x)|; the tail beyond the point where it reaches D*ln(10) is dropped.
template <class F, class D>
auto integrate_semi_infinite(F&& f, D&& damping, const QuadratureSpec& spec, double a = 0.0)
    -> BasicEvalResult<detail::integrand_value_t<F>>
{
    spec.validate();
    const double upper = truncation_point(damping, a, spec.tail_exponent());
    std::array<double, 7> seeds{};
    for (std::size_t i = 0; i < seeds.size(); ++i)
        seeds[i] = a + (upper - a) * (i + 1.0) / (seeds.size() + 1.0);
    return integrate_finite(f, a, upper, spec, seeds);
}

/// Integral over [0, inf) of envelope(x) * cos(omega x) (or sin). Each
/// half-period pi/omega is split into 8 panels before adaptive refinement.
template <class F, class D>
auto integrate_damped_oscillatory(F&& envelope, D&& damping, double omega, Oscillation kind,
                                  const QuadratureSpec& spec)
    -> BasicEvalResult<detail::integrand_value_t<F>>
{
    using V = detail::integrand_value_t<F>;
    using ops = detail::value_ops<V>;
    spec.validate();
    if (!(omega >= 0.0))
        throw std::domain_error("integrate_damped_oscillatory: frequency must be >= 0");
    if (omega > max_oscillation_frequency)
        throw frequency_cap_error("integrate_damped_oscillatory: frequency " + std::to_string(omega)
                                  + " exceeds cap " + std::to_string(max_oscillation_frequency));

    const double upper = truncation_point(damping, 0.0, spec.tail_exponent());
    auto integrand = [&](double x) -> V {
        const double c = kind == Oscillation::cosine ? std::cos(omega * x) : std::sin(omega * x);
        return ops::scale(envelope(x), c);
    };
    std::vector<double> cuts;
    if (omega > 0.0) {
        const double panel = std::numbers::pi / omega / 8.0;
        const auto count = static_cast<std::size_t>(upper / panel);
        cuts.reserve(count);
        for (std::size_t i = 1; i <= count; ++i)
            cuts.push_back(panel * static_cast<double>(i));
    } else {
        for (int i = 1; i < 8; ++i)
            cuts.push_back(upper * i / 8.0);
    }
    return integrate_finite(integrand, 0.0, upper, spec, cuts);
}

/// Trapezoidal rule for h*(f(0)/2 + sum_k f(kh)) on [0, upper], halving the
/// step until two levels agree. Intended for even integrands analytic in a
/// strip and decaying double-exponentially, where the rule converges
/// geometrically in 1/h and the level difference overstates the error.
template <class F>
auto integrate_trapezoid_halfline(F&& f, double upper, double initial_step, double rel_tol,
                                  double abs_tol, int max_levels = 14)
    -> BasicEvalResult<detail::integrand_value_t<F>>
{
    using V = detail::integrand_value_t<F>;
    using ops = detail::value_ops<V>;
    if (!(upper > 0.0) || !(initial_step > 0.0))
        throw std::invalid_argument("integrate_trapezoid_halfline: bad interval or step");

    auto sample = [&](double x) -> V {
        V v = f(x);
        if (!ops::finite(v)) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "non-finite integrand value at x = " << x;
            throw evaluation_error(msg.str(), x);
        }
        return v;
    };

    double h = initial_step;
    std::size_t nodes = 1;
    V sum = ops::scale(sample(0.0), 0.5);
    double l1 = ops::norm(sum);
    const auto count = static_cast<std::size_t>(upper / h);
    for (std::size_t k = 1; k <= count; ++k) {
        const V v = sample(static_cast<double>(k) * h);
        sum = ops::add(sum, v);
        l1 += ops::norm(v);
        ++nodes;
    }
    BasicEvalResult<V> out;
    out.value = ops::scale(sum, h);
    out.error_estimate = std::numeric_limits<double>::infinity();
    for (int level = 0; level < max_levels; ++level) {
        V odd = ops::zero();
        double odd_l1 = 0.0;
        const auto odd_count = static_cast<std::size_t>(upper / h + 0.5);
        for (std::size_t k = 0; k < odd_count; ++k) {
            const V v = sample((static_cast<double>(k) + 0.5) * h);
            odd = ops::add(odd, v);
            odd_l1 += ops::norm(v);
            ++nodes;
        }
        sum = ops::add(sum, odd);
        l1 += odd_l1;
        h *= 0.5;
        const V refined = ops::scale(sum, h);
        const double diff = ops::norm(ops::sub(refined, out.value));
        out.value = refined;
        out.error_estimate = std::max(0.0, diff - detail::roundoff_floor(l1 * h));
        if (out.error_estimate <= std::max(rel_tol * ops::norm(out.value), abs_tol)) {
            out.converged = true;
            break;
        }
    }
    out.l1_norm = l1 * h;
    out.nodes_used = nodes;
    return out;
}

} // namespace yorkl

#endif // YORKL_QUADRATURE_HPP
