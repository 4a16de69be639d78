// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace antsel::stats
{

struct KsResult
{
    double statistic; // sup |F_n - F|
    double p_value;   // asymptotic Kolmogorov tail with small-sample correction
    std::size_t samples;
};

// One-sample Kolmogorov-Smirnov test against a continuous CDF. The input is copied and sorted.
KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf);

// Pr(K > lambda) for the Kolmogorov distribution: 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_tail(double lambda);

// Pearson correlation; 0 when either sample has zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

// sqrt(p (1 - p) / n).
double binomial_stderr(double p, std::uint64_t n);

/*
 * One-sided two-proportion z statistic for H1: p1 < p2 with a pooled
 * variance estimate. Positive values favour H1.
 */
double two_proportion_z(std::uint64_t hits1, std::uint64_t n1, std::uint64_t hits2, std::uint64_t n2);

// Standard normal upper-tail quantile for one-sided 95% confidence.
inline constexpr double kZ95OneSided = 1.6448536269514722;

} // namespace antsel::stats
