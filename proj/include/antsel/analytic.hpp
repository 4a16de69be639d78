// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace antsel::analytic
{

/*
 * Dimension constants of an (n_t, n_r, L) selection problem.
 *
 * M = (n_t-1)(n_r-1) is the pairwise diversity order, [m_lower, m_upper] the
 * general-L diversity bracket and psi0 = (pi/2)/(n_t-1) the angular cell used
 * by the restricted-angle outage bound.
 */
struct AnalyticConfig
{
    std::size_t n_t;
    std::size_t n_r;
    std::size_t L;
    std::uint64_t M;
    std::uint64_t m_lower;
    std::uint64_t m_upper;
    double psi0;

    static AnalyticConfig make(std::size_t n_t, std::size_t n_r, std::size_t L = 2);
};

// Density of the angle between one column and the line of another, n_r receive antennas.
double theta_pdf(double theta, std::size_t n_r);
// CDF of that angle: (sin^2 theta)^(n_r-1).
double theta_cdf(double theta, std::size_t n_r);

// CDF of Gamma(n, 1), the squared norm of an n-dimensional CN(0, I) vector.
double chi2n_cdf(double x, std::size_t n);

// Largest of independent angles whose CDFs multiply to (sin^2 theta)^M.
double theta0_pdf(double theta, std::uint64_t M);
double theta0_cdf(double theta, std::uint64_t M);

/*
 * Small-x expansion Pr(z sin^2 theta0 <= x) = leading * x^M + o(x^M).
 *
 * leading = 1/M! - b_M with b_M = M * sum_{k=0}^{n_t-3} k!/(M+k+1)!. c[k] and
 * a[n] are the coefficients of P1(x) = M e^{-x} sum_k c_k x^k = sum_n a_n x^n
 * for k < M and n <= M.
 */
struct ExpansionCoefficients
{
    std::uint64_t M;
    double leading;            // closed form (n_t-2)!/(M+n_t-2)!, no cancellation
    double leading_difference; // 1/M! - b_M evaluated as written
    double b_M;
    double inverse_m_factorial; // 1/M!
    std::vector<double> c;
    std::vector<double> a;
};

ExpansionCoefficients outage_coefficient(std::size_t n_t, std::size_t n_r);

// Rational number in lowest terms.
struct ExactRatio
{
    __int128 numerator;
    __int128 denominator;
    double value() const noexcept { return static_cast<double>(numerator) / static_cast<double>(denominator); }
};
// 1/M! - b_M in exact integer arithmetic; NumericError when M > 20 or (M+n_t-2)! overflows.
ExactRatio exact_leading_coefficient(std::size_t n_t, std::size_t n_r);

/*
 * Pr(z sin^2 theta0 <= x) with z ~ Gamma((n_t-1) n_r, 1), evaluated as
 * M int_0^1 F_z(x/t) t^{M-1} dt. The restricted variant confines every angle to
 * (0, psi0) and renormalizes.
 */
double pr_outage_quadrature(double x, std::size_t n_t, std::size_t n_r, bool restricted = false);

// Normalization of one angle restricted to (0, psi0): (sin psi0)^{2(n_r-1)}.
double restricted_normalization(std::size_t n_t, std::size_t n_r);

// E_k(x) = int_1^inf e^{-x m} m^{-k} dm for any integer k and x > 0.
double exp_integral(int k, double x);

// sum_{k=1}^{K} k!/(M+k+1)!.
double series_partial(std::uint64_t M, std::uint64_t K);
// Limit of series_partial as K grows: 1/(M (M+1)!).
double series_limit(std::uint64_t M);

// sum_{i=0}^{k} (-1)^i C(M,i) == (-1)^k C(M-1,k) in exact integer arithmetic.
bool binomial_identity_check(std::uint64_t M, std::uint64_t k);

struct DiversityBounds
{
    std::uint64_t lower;
    std::uint64_t upper;
};
DiversityBounds diversity_bounds(std::size_t n_t, std::size_t n_r, std::size_t L);

enum class DmtBound
{
    lower,
    upper,
    exact_l2,
};
std::string_view dmt_bound_name(DmtBound bound) noexcept; // "lower", "upper", "exact-L2"
DmtBound parse_dmt_bound(std::string_view name);

// M* (1 - r/L)^+ with M* the chosen diversity constant.
double dmt_curve(std::size_t n_t, std::size_t n_r, std::size_t L, double r, DmtBound bound);

} // namespace antsel::analytic
