// SPDX-License-Identifier: Apache-2.0
#include "antsel/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "antsel/errors.hpp"

namespace antsel::analytic
{

namespace
{

using int128 = __int128;

// Flipping this exponent is the mutation the verify suite must catch.
#ifdef ANTSEL_MUTATE_THETA_EXPONENT
constexpr double kThetaExponentSign = -1.0;
#else
constexpr double kThetaExponentSign = 1.0;
#endif

constexpr double kHalfPi = std::numbers::pi / 2;

void require_open_angle(double theta)
{
    if (!(theta > 0.0 && theta < kHalfPi))
        throw DomainError("angle " + std::to_string(theta) + " outside (0, pi/2)");
}

void require_closed_angle(double theta)
{
    if (!(theta >= 0.0 && theta <= kHalfPi))
        throw DomainError("angle " + std::to_string(theta) + " outside [0, pi/2]");
}

void require_pair_dimensions(std::size_t n_t, std::size_t n_r)
{
    if (n_t < 2 || n_r < 2)
        throw DimensionError("need n_t >= 2 and n_r >= 2, got (" + std::to_string(n_t) + ", " +
                             std::to_string(n_r) + ")");
}

double sin_sq(double theta)
{
    const double s = std::sin(theta);
    return s * s;
}

int128 gcd128(int128 a, int128 b)
{
    if (a < 0)
        a = -a;
    if (b < 0)
        b = -b;
    while (b != 0)
    {
        const int128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

// n! as an exact integer; NumericError when it does not fit.
int128 factorial128(std::uint64_t n)
{
    int128 f = 1;
    constexpr int128 limit = static_cast<int128>((~static_cast<unsigned __int128>(0)) >> 1);
    for (std::uint64_t i = 2; i <= n; ++i)
    {
        if (f > limit / static_cast<int128>(i))
            throw NumericError(std::to_string(n) + "! overflows 127-bit integers");
        f *= static_cast<int128>(i);
    }
    return f;
}

// M int_0^1 F_z(x/t) t^{M-1} dt with z ~ Gamma(n, 1).
double outage_integral(double x, std::uint64_t M, std::size_t n)
{
    const double dn = static_cast<double>(n);
    const double dm = static_cast<double>(M);
    const double y_end = dn + 50.0 + 10.0 * std::sqrt(dn);
    if (x >= y_end)
        return chi2n_cdf(x, n);
    // t = e^{-u}: M int_0^inf F_z(x e^u) e^{-M u} du, with F_z = 1 beyond u_end.
    const double u_end = std::log(y_end / x);
    auto integrand = [&](double u) { return dm * chi2n_cdf(x * std::exp(u), n) * std::exp(-dm * u); };
    double error = 0.0;
    double l1 = 0.0;
    const double body = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, u_end, 20,
                                                                                       1e-13, &error, &l1);
    const double tail = std::exp(-dm * u_end);
    if (!std::isfinite(body) || error > 1e-10 * l1 + 1e-300)
        throw NumericError("outage quadrature did not converge: x=" + std::to_string(x) +
                           ", estimate=" + std::to_string(body) + ", error=" + std::to_string(error));
    return std::clamp(body + tail, 0.0, 1.0);
}

double expint_e1(double x)
{
    constexpr double euler_gamma = std::numbers::egamma;
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (x <= 1.0)
    {
        double sum = 0.0;
        double term = 1.0;
        for (int j = 1; j < 200; ++j)
        {
            term *= -x / j;
            const double contribution = -term / j;
            sum += contribution;
            if (std::abs(contribution) < eps * std::abs(sum))
                break;
        }
        return -euler_gamma - std::log(x) + sum;
    }
    // modified Lentz evaluation of the continued fraction
    constexpr double tiny = 1e-300;
    double b = x + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i)
    {
        const double an = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        const double delta = c * d;
        h *= delta;
        if (std::abs(delta - 1.0) < eps)
            return h * std::exp(-x);
    }
    throw NumericError("continued fraction for E_1 did not converge at x=" + std::to_string(x));
}

} // namespace

AnalyticConfig AnalyticConfig::make(std::size_t n_t, std::size_t n_r, std::size_t L)
{
    const DiversityBounds bounds = diversity_bounds(n_t, n_r, L);
    const double psi0 = n_t > 1 ? kHalfPi / static_cast<double>(n_t - 1) : kHalfPi;
    return {n_t, n_r, L, static_cast<std::uint64_t>((n_t - 1) * (n_r - 1)), bounds.lower, bounds.upper, psi0};
}

double theta_pdf(double theta, std::size_t n_r)
{
    require_open_angle(theta);
    if (n_r < 2)
        throw DimensionError("angle law needs n_r >= 2");
    const double exponent = kThetaExponentSign * static_cast<double>(2 * n_r - 4);
    return static_cast<double>(n_r - 1) * std::sin(2.0 * theta) * std::pow(std::sin(theta), exponent);
}

double theta_cdf(double theta, std::size_t n_r)
{
    require_closed_angle(theta);
    if (n_r < 2)
        throw DimensionError("angle law needs n_r >= 2");
    return std::pow(sin_sq(theta), kThetaExponentSign * static_cast<double>(n_r - 1));
}

double chi2n_cdf(double x, std::size_t n)
{
    if (n == 0)
        throw DomainError("chi-square degree must be positive");
    if (std::isnan(x) || x < 0.0)
        throw DomainError("chi-square argument must be nonnegative");
    if (x == 0.0)
        return 0.0;
    if (std::isinf(x))
        return 1.0;
    const double dn = static_cast<double>(n);
    if (x < dn + 1.0)
    {
        // P(n, x) = x^n e^{-x} / n! * sum_j x^j / ((n+1)...(n+j))
        double term = 1.0;
        double sum = 1.0;
        for (int j = 1; j < 10000; ++j)
        {
            term *= x / (dn + j);
            sum += term;
            if (term < 1e-17 * sum)
                break;
        }
        return std::min(1.0, std::exp(dn * std::log(x) - x - std::lgamma(dn + 1.0)) * sum);
    }
    // 1 - e^{-x} sum_{k<n} x^k / k!
    const double log_x = std::log(x);
    double upper = 0.0;
    for (std::size_t k = 0; k < n; ++k)
    {
        const double dk = static_cast<double>(k);
        upper += std::exp(dk * log_x - x - std::lgamma(dk + 1.0));
    }
    return std::clamp(1.0 - upper, 0.0, 1.0);
}

double theta0_pdf(double theta, std::uint64_t M)
{
    require_open_angle(theta);
    if (M == 0)
        throw DomainError("M must be positive");
    const double dm = static_cast<double>(M);
    return dm * std::pow(sin_sq(theta), dm - 1.0) * std::sin(2.0 * theta);
}

double theta0_cdf(double theta, std::uint64_t M)
{
    require_closed_angle(theta);
    if (M == 0)
        throw DomainError("M must be positive");
    return std::pow(sin_sq(theta), static_cast<double>(M));
}

ExpansionCoefficients outage_coefficient(std::size_t n_t, std::size_t n_r)
{
    require_pair_dimensions(n_t, n_r);
    const std::uint64_t M = (n_t - 1) * (n_r - 1);
    const long double lm = static_cast<long double>(M);

    long double inv_m_fact = 1.0L;
    for (std::uint64_t i = 2; i <= M; ++i)
        inv_m_fact /= static_cast<long double>(i);

    // k!/(M+k+1)! by ratio recurrence from 1/(M+1)!
    long double term = inv_m_fact / (lm + 1.0L);
    long double sum = 0.0L;
    for (std::size_t k = 0; k + 3 <= n_t; ++k)
    {
        sum += term;
        term *= static_cast<long double>(k + 1) / (lm + static_cast<long double>(k) + 2.0L);
    }
    const long double b_M = lm * sum;

    // Telescoping tail: sum_{k>=K} k!/(M+k+1)! = K!/(M (M+K)!), K = n_t - 2.
    long double leading = 1.0L;
    for (std::uint64_t i = n_t - 1; i <= M + n_t - 2; ++i)
        leading /= static_cast<long double>(i);

    ExpansionCoefficients out{M,
                              static_cast<double>(leading),
                              static_cast<double>(inv_m_fact - b_M),
                              static_cast<double>(b_M),
                              static_cast<double>(inv_m_fact),
                              {},
                              {}};

    // c_k = (M-k-1)!/M! * (-1)^k sum_{i<=k} (-1)^i C(M,i); the binomial sum is exact while C(M,i) fits.
    constexpr std::uint64_t kExactBinomialLimit = 125;
    if (M <= kExactBinomialLimit)
    {
        out.c.resize(M);
        int128 binom = 1;
        int128 alternating = 0;
        long double ratio = 1.0L / lm; // (M-k-1)!/M!
        for (std::uint64_t k = 0; k < M; ++k)
        {
            alternating += (k % 2 == 0) ? binom : -binom;
            const long double signed_sum = (k % 2 == 0 ? 1.0L : -1.0L) * static_cast<long double>(alternating);
            out.c[k] = static_cast<double>(ratio * signed_sum);
            binom = binom * static_cast<int128>(M - k) / static_cast<int128>(k + 1);
            if (k + 1 < M)
                ratio /= static_cast<long double>(M - k - 1);
        }
        out.a.resize(M + 1);
        for (std::uint64_t n = 0; n <= M; ++n)
        {
            long double acc = 0.0L;
            long double inv_fact = 1.0L; // 1/(n-k)!
            for (std::uint64_t j = 0; j <= n; ++j)
            {
                // j = n - k
                if (j > 0)
                    inv_fact /= static_cast<long double>(j);
                const std::uint64_t k = n - j;
                if (k >= M)
                    continue;
                acc += (j % 2 == 0 ? 1.0L : -1.0L) * inv_fact * static_cast<long double>(out.c[k]);
            }
            out.a[n] = static_cast<double>(lm * acc);
        }
    }
    return out;
}

ExactRatio exact_leading_coefficient(std::size_t n_t, std::size_t n_r)
{
    require_pair_dimensions(n_t, n_r);
    const std::uint64_t M = (n_t - 1) * (n_r - 1);
    if (M > 20)
        throw NumericError("exact coefficient is limited to M <= 20");
    const int128 denominator = factorial128(M + n_t - 2);
    // common denominator D = (M+n_t-2)!: 1/M! = (D/M!)/D, k!/(M+k+1)! = k! (D/(M+k+1)!)/D
    int128 numerator = denominator / factorial128(M);
    for (std::uint64_t k = 0; k + 3 <= n_t; ++k)
        numerator -= static_cast<int128>(M) * factorial128(k) * (denominator / factorial128(M + k + 1));
    const int128 g = gcd128(numerator, denominator);
    return {numerator / g, denominator / g};
}

double restricted_normalization(std::size_t n_t, std::size_t n_r)
{
    require_pair_dimensions(n_t, n_r);
    const double psi0 = kHalfPi / static_cast<double>(n_t - 1);
    return std::pow(std::sin(psi0), 2.0 * static_cast<double>(n_r - 1));
}

double pr_outage_quadrature(double x, std::size_t n_t, std::size_t n_r, bool restricted)
{
    require_pair_dimensions(n_t, n_r);
    if (!(x > 0.0) || !std::isfinite(x))
        throw DomainError("outage threshold must be positive and finite");
    const std::uint64_t M = (n_t - 1) * (n_r - 1);
    const std::size_t n = (n_t - 1) * n_r;
    if (!restricted)
        return outage_integral(x, M, n);

    const double psi0 = kHalfPi / static_cast<double>(n_t - 1);
    const double a0 = sin_sq(psi0);
    const double dm = static_cast<double>(M);
    const double prefactor =
        std::pow(a0, dm) / std::pow(restricted_normalization(n_t, n_r), static_cast<double>(n_t - 1));
    return std::clamp(prefactor * outage_integral(x / a0, M, n), 0.0, 1.0);
}

double exp_integral(int k, double x)
{
    if (!(x > 0.0) || !std::isfinite(x))
        throw DomainError("E_k needs a positive finite argument");
    if (k <= 0)
    {
        // int_1^inf m^p e^{-x m} dm = e^{-x} sum_{i=0}^{p} p!/(p-i)! / x^{i+1}
        const int p = -k;
        double sum = 0.0;
        double falling = 1.0;
        double power = 1.0 / x;
        for (int i = 0; i <= p; ++i)
        {
            sum += falling * power;
            falling *= static_cast<double>(p - i);
            power /= x;
        }
        return std::exp(-x) * sum;
    }
    if (x >= 1.0)
    {
        // modified Lentz evaluation of the continued fraction for E_k
        constexpr double tiny = 1e-300;
        double b = x + static_cast<double>(k);
        double c = 1.0 / tiny;
        double d = 1.0 / b;
        double h = d;
        for (int i = 1; i < 1000; ++i)
        {
            const double a = -static_cast<double>(i) * static_cast<double>(k - 1 + i);
            b += 2.0;
            d = 1.0 / (a * d + b);
            c = b + a / c;
            const double delta = c * d;
            h *= delta;
            if (std::abs(delta - 1.0) < 1e-16)
                return h * std::exp(-x);
        }
        throw NumericError("E_k continued fraction did not converge");
    }
    double e = expint_e1(x);
    const double decay = std::exp(-x);
    for (int j = 1; j < k; ++j)
        e = (decay - x * e) / static_cast<double>(j);
    return e;
}

double series_partial(std::uint64_t M, std::uint64_t K)
{
    if (M == 0 || K == 0)
        throw ArgumentError("series_partial needs M >= 1 and K >= 1");
    const long double lm = static_cast<long double>(M);
    long double term = 1.0L; // 1/(M+2)!
    for (std::uint64_t i = 2; i <= M + 2; ++i)
        term /= static_cast<long double>(i);
    long double sum = 0.0L;
    for (std::uint64_t k = 1; k <= K; ++k)
    {
        sum += term;
        term *= static_cast<long double>(k + 1) / (lm + static_cast<long double>(k) + 2.0L);
    }
    return static_cast<double>(sum);
}

double series_limit(std::uint64_t M)
{
    if (M == 0)
        throw ArgumentError("series_limit needs M >= 1");
    long double fact = 1.0L;
    for (std::uint64_t i = 2; i <= M + 1; ++i)
        fact *= static_cast<long double>(i);
    return static_cast<double>(1.0L / (static_cast<long double>(M) * fact));
}

bool binomial_identity_check(std::uint64_t M, std::uint64_t k)
{
    if (M == 0 || k > M)
        throw ArgumentError("binomial identity needs 1 <= M and k <= M");
    if (M > 120)
        throw ArgumentError("binomial identity check is limited to M <= 120");
    int128 lhs = 0;
    int128 binom_m = 1; // C(M, i)
    for (std::uint64_t i = 0; i <= k; ++i)
    {
        lhs += (i % 2 == 0) ? binom_m : -binom_m;
        binom_m = binom_m * static_cast<int128>(M - i) / static_cast<int128>(i + 1);
    }
    int128 binom_m1 = 1; // C(M-1, k)
    for (std::uint64_t i = 0; i < k; ++i)
        binom_m1 = binom_m1 * static_cast<int128>(M - 1 - i) / static_cast<int128>(i + 1);
    const int128 rhs = (k % 2 == 0) ? binom_m1 : -binom_m1;
    return lhs == rhs;
}

DiversityBounds diversity_bounds(std::size_t n_t, std::size_t n_r, std::size_t L)
{
    if (L == 0)
        throw DimensionError("number of streams must be positive");
    if (n_t < L || n_r < L)
        throw DimensionError("need n_t >= L and n_r >= L, got (" + std::to_string(n_t) + ", " +
                             std::to_string(n_r) + ", " + std::to_string(L) + ")");
    const std::uint64_t width = n_t - L + 1;
    return {width * (n_r - L + 1), width * (n_r - 1)};
}

std::string_view dmt_bound_name(DmtBound bound) noexcept
{
    switch (bound)
    {
    case DmtBound::lower:
        return "lower";
    case DmtBound::upper:
        return "upper";
    case DmtBound::exact_l2:
        return "exact-L2";
    }
    return "unknown";
}

DmtBound parse_dmt_bound(std::string_view name)
{
    for (DmtBound b : {DmtBound::lower, DmtBound::upper, DmtBound::exact_l2})
        if (dmt_bound_name(b) == name)
            return b;
    throw ArgumentError("unknown DMT bound '" + std::string(name) + "'");
}

double dmt_curve(std::size_t n_t, std::size_t n_r, std::size_t L, double r, DmtBound bound)
{
    if (!(r >= 0.0) || !std::isfinite(r))
        throw ArgumentError("multiplexing gain must be nonnegative and finite");
    const DiversityBounds bounds = diversity_bounds(n_t, n_r, L);
    double constant = 0.0;
    switch (bound)
    {
    case DmtBound::lower:
        constant = static_cast<double>(bounds.lower);
        break;
    case DmtBound::upper:
        constant = static_cast<double>(bounds.upper);
        break;
    case DmtBound::exact_l2:
        if (L != 2)
            throw ArgumentError("exact DMT curve is defined for L = 2 only");
        constant = static_cast<double>((n_t - 1) * (n_r - 1));
        break;
    }
    return constant * std::max(0.0, 1.0 - r / static_cast<double>(L));
}

} // namespace antsel::analytic
