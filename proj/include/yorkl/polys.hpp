#ifndef YORKL_POLYS_HPP
#define YORKL_POLYS_HPP

// The polynomial system p_n(x) = (-1)^n e^x A^n e^{-x}, A = x^2 - x d/dx x d/dx.
//
// Coefficients are exact big integers. Two independent constructions are
// provided: the differential recurrence
//
//     p_{n+1} = x^2 p_n'' + x(1 - 2x) p_n' - x p_n,   p_0 = 1,
//
// and the closed triple sum for a_{k,n}. Floating point enters only at
// evaluation time.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "yorkl/bessel.hpp"
#include "yorkl/errors.hpp"
#include "yorkl/quadrature.hpp"
#include "yorkl/report.hpp"

namespace yorkl {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// Polynomial with exact integer coefficients, coeffs[k] multiplying x^k.
class ExactPolynomial {
public:
    ExactPolynomial() : coeffs_{BigInt(0)} {}
    explicit ExactPolynomial(std::vector<BigInt> coeffs) : coeffs_(std::move(coeffs))
    {
        if (coeffs_.empty())
            coeffs_.push_back(0);
        while (coeffs_.size() > 1 && coeffs_.back() == 0)
            coeffs_.pop_back();
    }

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    const BigInt& coeff(int k) const
    {
        static const BigInt zero{0};
        return (k >= 0 && k <= degree()) ? coeffs_[static_cast<std::size_t>(k)] : zero;
    }
    const std::vector<BigInt>& coeffs() const { return coeffs_; }

    friend bool operator==(const ExactPolynomial&, const ExactPolynomial&) = default;

private:
    std::vector<BigInt> coeffs_;
};

namespace detail {

inline BigInt binomial(int n, int k)
{
    if (k < 0 || k > n)
        return 0;
    k = std::min(k, n - k);
    BigInt r = 1;
    for (int i = 1; i <= k; ++i)
        r = r * (n - k + i) / i;
    return r;
}

inline BigInt factorial(int n)
{
    BigInt r = 1;
    for (int i = 2; i <= n; ++i)
        r *= i;
    return r;
}

/// 2^k times the inner double sum for a_{k,n}:
///   sum_r sum_j (-1)^{r+j} 2^{k-r-j} C(k,r) C(k-r,j) (r-j)^{2n}.
/// Scaling by 2^k keeps everything integral.
inline BigInt scaled_triple_sum(int k, int n)
{
    BigInt total = 0;
    for (int r = 0; r <= k; ++r) {
        const BigInt cr = binomial(k, r);
        for (int j = 0; j <= k - r; ++j) {
            const int diff = r - j;
            if (diff == 0 && n > 0)
                continue;
            BigInt term = cr * binomial(k - r, j) * pow(BigInt(diff < 0 ? -diff : diff), 2 * n);
            term <<= (k - r - j);
            if (((r + j) & 1) != 0)
                term = -term;
            total += term;
        }
    }
    return total;
}

} // namespace detail

/// (2n - 1)!!, with (-1)!! = 1.
inline BigInt double_factorial_odd(int n)
{
    BigInt r = 1;
    for (int k = 1; k <= 2 * n - 1; k += 2)
        r *= k;
    return r;
}

/// p_n from the closed triple sum; the division by 2^k k! is done last and
/// must be exact.
inline ExactPolynomial poly_explicit(int n)
{
    if (n < 0)
        throw std::domain_error("poly_explicit: degree must be >= 0");
    if (n == 0)
        return ExactPolynomial({BigInt(1)});
    std::vector<BigInt> c(static_cast<std::size_t>(n) + 1, BigInt(0));
    for (int k = 1; k <= n; ++k) {
        const BigInt num = detail::scaled_triple_sum(k, n);
        const BigInt den = detail::factorial(k) << k;
        BigInt q, rem;
        divide_qr(num, den, q, rem);
        if (rem != 0) {
            std::ostringstream msg;
            msg << "poly_explicit: a_{" << k << "," << n << "} is not an integer (" << num << " / " << den << ")";
            throw consistency_error(msg.str());
        }
        c[static_cast<std::size_t>(k)] = q;
    }
    return ExactPolynomial(std::move(c));
}

/// p_n by iterating the differential recurrence from p_0 = 1. On
/// coefficients: c'_k = k^2 c_k - (2k - 1) c_{k-1}.
inline ExactPolynomial poly_recurrence(int n)
{
    if (n < 0)
        throw std::domain_error("poly_recurrence: degree must be >= 0");
    std::vector<BigInt> c{BigInt(1)};
    for (int step = 0; step < n; ++step) {
        std::vector<BigInt> next(c.size() + 1, BigInt(0));
        for (std::size_t k = 0; k < next.size(); ++k) {
            const long kk = static_cast<long>(k);
            if (k < c.size())
                next[k] += kk * kk * c[k];
            if (k >= 1)
                next[k] -= (2 * kk - 1) * c[k - 1];
        }
        c = std::move(next);
    }
    return ExactPolynomial(std::move(c));
}

/// Horner evaluation with coefficients rounded to double.
inline double poly_eval(const ExactPolynomial& p, double x)
{
    double acc = 0.0;
    for (int k = p.degree(); k >= 0; --k)
        acc = acc * x + p.coeff(k).convert_to<double>();
    return acc;
}

/// Exact checks of the vanishing sums (k = n+1..2n) and the k = n value
/// (-1)^n n! (2n-1)!!, for every n <= n_max. Sums are compared scaled by 2^k.
inline CheckSuite verify_identities(int n_max)
{
    if (n_max < 1)
        throw std::domain_error("verify_identities: n_max must be >= 1");
    CheckSuite suite{"polys.identities", {}};
    for (int n = 1; n <= n_max; ++n) {
        for (int k = n; k <= 2 * n; ++k) {
            const BigInt lhs = detail::scaled_triple_sum(k, n);
            BigInt rhs = 0;
            if (k == n) {
                rhs = (detail::factorial(n) * double_factorial_odd(n)) << n;
                if (n % 2 == 1)
                    rhs = -rhs;
            }
            const BigInt diff = lhs - rhs;
            CrossCheckReport r;
            std::ostringstream ctx;
            ctx << "identity n=" << n << " k=" << k << (k == n ? " (leading)" : " (vanishing)");
            r.context = ctx.str();
            r.lhs = BigRational(lhs, BigInt(1) << k).convert_to<double>();
            r.rhs = BigRational(rhs, BigInt(1) << k).convert_to<double>();
            r.abs_diff = std::abs(BigRational(diff, BigInt(1) << k).convert_to<double>());
            r.rel_diff = r.rhs != 0.0 ? r.abs_diff / std::abs(r.rhs) : r.abs_diff;
            r.tolerance = 0.0;
            r.passed = diff == 0;
            suite.add(std::move(r));
        }
    }
    return suite;
}

/// Leading coefficient (-1)^n (2n-1)!! and p_n(0) = 0, exactly, for n <= n_max.
inline CheckSuite verify_leading_coefficients(int n_max)
{
    CheckSuite suite{"polys.leading", {}};
    for (int n = 1; n <= n_max; ++n) {
        const ExactPolynomial p = poly_recurrence(n);
        BigInt expected = double_factorial_odd(n);
        if (n % 2 == 1)
            expected = -expected;
        const bool ok = p.degree() == n && p.coeff(n) == expected && p.coeff(0) == 0;
        suite.add(make_predicate_report("leading coefficient and p_n(0)=0, n=" + std::to_string(n),
                                        p.coeff(n).convert_to<double>(), expected.convert_to<double>(), ok));
    }
    return suite;
}

/// Both constructions agree coefficient by coefficient for n <= n_max.
inline CheckSuite verify_constructions(int n_max)
{
    CheckSuite suite{"polys.constructions", {}};
    for (int n = 0; n <= n_max; ++n) {
        const bool same = poly_explicit(n) == poly_recurrence(n);
        suite.add(make_predicate_report("explicit == recurrence, n=" + std::to_string(n), n, n, same));
    }
    return suite;
}

/// Partial sum sum_{n<=N} p_n(x) t^{2n}/(2n)! against exp(-2x sinh^2(t/2)).
/// The partial sum is formed exactly (x and t as the dyadic rationals they
/// are in binary) and rounded once.
inline CrossCheckReport generating_check(double x, double t, int N, double tolerance = 1e-8)
{
    if (N < 2)
        throw std::domain_error("generating_check: N must be >= 2");
    if (!std::isfinite(x) || !std::isfinite(t) || std::abs(t) > 4.0)
        throw std::domain_error("generating_check: |t| must be <= 4");
    const BigRational xr(x);
    const BigRational t2 = BigRational(t) * BigRational(t);
    BigRational sum = 0;
    BigRational tpow = 1;
    BigInt fact = 1;
    std::vector<BigInt> c{BigInt(1)};
    for (int n = 0; n <= N; ++n) {
        if (n > 0) {
            fact *= BigInt(2 * n - 1) * (2 * n);
            tpow *= t2;
            std::vector<BigInt> next(c.size() + 1, BigInt(0));
            for (std::size_t k = 0; k < next.size(); ++k) {
                const long kk = static_cast<long>(k);
                if (k < c.size())
                    next[k] += kk * kk * c[k];
                if (k >= 1)
                    next[k] -= (2 * kk - 1) * c[k - 1];
            }
            c = std::move(next);
        }
        BigRational pn = 0;
        for (std::size_t k = c.size(); k-- > 0;)
            pn = pn * xr + BigRational(c[k]);
        sum += pn * tpow / BigRational(fact);
    }
    const double s = std::sinh(0.5 * t);
    const double direct = std::exp(-2.0 * x * s * s);
    std::ostringstream ctx;
    ctx << "generating function x=" << x << " t=" << t << " N=" << N;
    return make_report(ctx.str(), sum.convert_to<double>(), direct, tolerance);
}

/// Truncated p_n(x) = 2 e^x sum_{m>=1} (-1)^m m^{2n} I_m(x).
///
/// Summation runs until m >= 2n and the term falls below 1e-16 of the
/// partial sum. M caps the number of terms; a cap below the peak index
/// max(2n, e x / 2) of m^{2n} I_m(x), or a cap reached before the terms
/// became negligible, is a truncation error.
inline double poly_series_bessel(int n, double x, int M)
{
    if (n < 1)
        throw std::domain_error("poly_series_bessel: n must be >= 1");
    if (!(x > 0.0))
        throw std::domain_error("poly_series_bessel: x must be positive");
    const double peak = std::max(2.0 * n, std::numbers::e * x / 2.0);
    if (M < peak) {
        std::ostringstream msg;
        msg << "poly_series_bessel: M=" << M << " is below the peak index " << peak;
        throw truncation_error(msg.str());
    }
    double sum = 0.0;
    for (int m = 1; m <= M; ++m) {
        const double term = std::pow(static_cast<double>(m), 2 * n) * bessel_i_int(m, x);
        sum += (m % 2 == 0) ? term : -term;
        if (m >= peak && std::abs(term) < 1e-16 * std::abs(sum))
            return 2.0 * std::exp(x) * sum;
    }
    std::ostringstream msg;
    msg << "poly_series_bessel: series not converged after M=" << M << " terms";
    throw truncation_error(msg.str());
}

struct BoundParams {
    double epsilon = 1.0;
    double alpha = 2.0;

    /// Largest alpha admissible for a given epsilon.
    static double alpha_max(double epsilon)
    {
        const double d = 1.0 - epsilon;
        return 2.0 * std::acos(std::sqrt(1.0 + 4.0 * d * d) / 2.0);
    }

    void validate() const
    {
        const double eps_min = 1.0 - std::sqrt(3.0) / 2.0;
        if (!(epsilon > eps_min && epsilon <= 1.0))
            throw std::domain_error("BoundParams: epsilon must lie in (1 - sqrt(3)/2, 1]");
        if (!(alpha > 0.0 && alpha <= alpha_max(epsilon) * (1.0 + 1e-15)))
            throw std::domain_error("BoundParams: alpha outside (0, 2 arccos(sqrt(1 + 4(1-eps)^2)/2)]");
    }
};

/// Right side of the upper bound
///   |p_n(x)| <= sqrt((2^{4n}-1)(4n)! sin(a/2) / (pi n a^{4n} (2^{4n-2} + 6/pi^2 - 1))) e^{eps x} / 2,
/// assembled in logs.
inline double poly_bound(int n, double x, const BoundParams& params)
{
    params.validate();
    if (n < 1)
        throw std::domain_error("poly_bound: n must be >= 1");
    if (!(x > 0.0))
        throw std::domain_error("poly_bound: x must be positive");
    const double pi = std::numbers::pi;
    const double a = params.alpha;
    const double log_num = std::log(std::pow(2.0, 4 * n) - 1.0) + std::lgamma(4.0 * n + 1.0) + std::log(std::sin(a / 2.0));
    const double log_den = std::log(pi * n) + 4.0 * n * std::log(a) + std::log(std::pow(2.0, 4 * n - 2) + 6.0 / (pi * pi) - 1.0);
    return std::exp(0.5 * (log_num - log_den) + params.epsilon * x - std::numbers::ln2);
}

/// 6 x (-1)^n sin(beta) (2n)! e^x / (pi beta^{2n} (2n+1)^3).
inline double poly_asymptotic_main_term(int n, double x, double beta)
{
    const double log_mag = std::log(6.0 * x * std::sin(beta)) + std::lgamma(2.0 * n + 1.0) + x
                         - std::log(std::numbers::pi) - 2.0 * n * std::log(beta) - 3.0 * std::log(2.0 * n + 1.0);
    return (n % 2 == 0 ? 1.0 : -1.0) * std::exp(log_mag);
}

/// p_n(x) divided by the large-n main term for a given beta in (0, pi/2).
/// p_n is evaluated exactly before the division.
inline double poly_asymptotic_ratio(int n, double x, double beta)
{
    if (n < 1)
        throw std::domain_error("poly_asymptotic_ratio: n must be >= 1");
    if (!(beta > 0.0 && beta < std::numbers::pi / 2.0))
        throw std::domain_error("poly_asymptotic_ratio: beta must lie in (0, pi/2)");
    if (!(x > 0.0))
        throw std::domain_error("poly_asymptotic_ratio: x must be positive");
    const ExactPolynomial p = poly_recurrence(n);
    const BigRational xr(x);
    BigRational v = 0;
    for (int k = p.degree(); k >= 0; --k)
        v = v * xr + BigRational(p.coeff(k));
    // divide in logs: both sides can leave double range for large n
    const double pv = v.convert_to<double>();
    const double main = poly_asymptotic_main_term(n, x, beta);
    if (std::isfinite(pv) && std::isfinite(main) && main != 0.0)
        return pv / main;
    throw std::overflow_error("poly_asymptotic_ratio: values leave double range");
}

/// One row of the large-n study: ratio at n and the step ratio r_n / r_{n-1}.
struct AsymptoticStudyRow {
    int n;
    double beta;
    double ratio;
    double step_ratio;
};

inline std::vector<AsymptoticStudyRow> poly_asymptotic_study(double x, std::span<const double> betas, int n_max)
{
    std::vector<AsymptoticStudyRow> rows;
    for (double beta : betas) {
        double prev = std::numeric_limits<double>::quiet_NaN();
        for (int n = 1; n <= n_max; ++n) {
            const double r = poly_asymptotic_ratio(n, x, beta);
            rows.push_back({n, beta, r, n > 1 ? r / prev : std::numeric_limits<double>::quiet_NaN()});
            prev = r;
        }
    }
    return rows;
}

namespace detail {

inline std::vector<BigRational> bernoulli_table(int k_max)
{
    static std::mutex mtx;
    static std::vector<BigRational> table{BigRational(1)};
    std::lock_guard lock(mtx);
    // B_0..B_m from sum_{j=0}^{m} C(m+1, j) B_j = 0
    for (int m = static_cast<int>(table.size()); m <= k_max; ++m) {
        BigRational s = 0;
        BigInt c = 1; // C(m+1, 0)
        for (int j = 0; j < m; ++j) {
            if (table[static_cast<std::size_t>(j)] != 0)
                s += BigRational(c) * table[static_cast<std::size_t>(j)];
            c = c * (m + 1 - j) / (j + 1);
        }
        table.push_back(-s / BigRational(m + 1));
    }
    return {table.begin(), table.begin() + k_max + 1};
}

} // namespace detail

/// Exact Bernoulli number B_k, k even in [2, 400].
inline BigRational bernoulli_exact(int k)
{
    if (k < 2 || k % 2 != 0 || k > 400)
        throw std::domain_error("bernoulli_exact: k must be even and in [2, 400]");
    return detail::bernoulli_table(k)[static_cast<std::size_t>(k)];
}

/// int_0^inf tau^{4n-1}/sinh(tau) dtau against -B_{4n} (2^{4n}-1) pi^{4n} / (4n).
inline CrossCheckReport verify_bernoulli_integral(int n, const QuadratureSpec& spec = {})
{
    if (n < 1 || n > 10)
        throw std::domain_error("verify_bernoulli_integral: n must be in [1, 10]");
    const int p = 4 * n - 1;
    auto f = [p](double tau) {
        // tau^p / sinh(tau) = 2 tau^p e^{-tau} / (1 - e^{-2 tau})
        return 2.0 * std::exp(p * std::log(tau) - tau) / -std::expm1(-2.0 * tau);
    };
    auto damping = [p](double tau) { return tau - p * std::log(std::max(tau, 1.0)) - std::numbers::ln2 - 1.0; };
    const auto lhs = integrate_semi_infinite(f, damping, spec);
    const BigRational b = bernoulli_exact(4 * n);
    const double rhs = -b.convert_to<double>() * (std::pow(2.0, 4 * n) - 1.0)
                     * std::pow(std::numbers::pi, 4 * n) / (4.0 * n);
    return make_report("Bernoulli integral n=" + std::to_string(n), lhs.value, rhs, 1e-8);
}

/// int_0^inf K_{i tau}(x) e^{-x} p_n(x) dx/x against (-1)^n pi tau^{2n-1} / sinh(pi tau).
inline CrossCheckReport poly_kl_image(int n, double tau, const QuadratureSpec& spec = {})
{
    if (n < 1 || n > 10)
        throw std::domain_error("poly_kl_image: n must be in [1, 10]");
    if (!(tau > 0.0))
        throw std::domain_error("poly_kl_image: tau must be positive");
    detail::check_imag_order(tau, "poly_kl_image");
    const ExactPolynomial p = poly_recurrence(n);
    // p_n(0) = 0, so p_n(x)/x is the polynomial with the coefficients shifted down.
    std::vector<BigInt> shifted(p.coeffs().begin() + 1, p.coeffs().end());
    const ExactPolynomial q(std::move(shifted));
    // in s = ln x: int K_{i tau}(e^s) e^{-e^s} q(e^s) e^s ds
    auto f = [&](double s) {
        const double x = std::exp(s);
        return std::exp(-2.0 * x) * bessel_k_imag_scaled(tau, x) * poly_eval(q, x) * x;
    };
    const double tail = spec.tail_exponent();
    const double s_lo = -tail;
    const double s_hi = std::log(tail / 2.0 + 10.0 * n + 10.0);
    std::vector<double> cuts;
    for (double s = std::ceil(s_lo); s < s_hi; s += 1.0)
        cuts.push_back(s);
    const auto lhs = integrate_finite(f, s_lo, s_hi, spec, cuts);
    const double rhs = (n % 2 == 0 ? 1.0 : -1.0) * std::numbers::pi * std::pow(tau, 2 * n - 1)
                     / std::sinh(std::numbers::pi * tau);
    std::ostringstream ctx;
    ctx << "KL image of e^{-x} p_" << n << "(x)/x at tau=" << tau;
    return make_report(ctx.str(), lhs.value, rhs, 1e-6);
}

} // namespace yorkl

#endif // YORKL_POLYS_HPP
