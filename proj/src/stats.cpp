// SPDX-License-Identifier: Apache-2.0
#include "antsel/stats.hpp"

#include <algorithm>
#include <cmath>

#include "antsel/errors.hpp"

namespace antsel::stats
{

double kolmogorov_tail(double lambda)
{
    if (lambda <= 0.0)
        return 1.0;
    if (lambda < 0.2)
        return 1.0; // series has not started to converge; the tail is 1 to double precision
    double sum = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 200; ++j)
    {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        sum += sign * term;
        if (term < 1e-17 * std::abs(sum))
            break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf)
{
    if (samples.empty())
        throw ArgumentError("KS test needs at least one sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i)
    {
        const double f = cdf(samples[i]);
        const double below = static_cast<double>(i) / n;
        const double above = static_cast<double>(i + 1) / n;
        d = std::max({d, above - f, f - below});
    }
    const double root_n = std::sqrt(n);
    const double lambda = (root_n + 0.12 + 0.11 / root_n) * d;
    return {d, kolmogorov_tail(lambda), samples.size()};
}

double pearson(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size())
        throw DimensionError("correlation inputs differ in length");
    if (x.size() < 2)
        throw ArgumentError("correlation needs at least two pairs");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

double binomial_stderr(double p, std::uint64_t n)
{
    if (n == 0)
        throw ArgumentError("binomial standard error needs n > 0");
    return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(n));
}

double two_proportion_z(std::uint64_t hits1, std::uint64_t n1, std::uint64_t hits2, std::uint64_t n2)
{
    if (n1 == 0 || n2 == 0)
        throw ArgumentError("two-proportion test needs nonempty samples");
    if (hits1 > n1 || hits2 > n2)
        throw ArgumentError("hits exceed trials");
    const double p1 = static_cast<double>(hits1) / static_cast<double>(n1);
    const double p2 = static_cast<double>(hits2) / static_cast<double>(n2);
    const double pooled = static_cast<double>(hits1 + hits2) / static_cast<double>(n1 + n2);
    const double se = std::sqrt(pooled * (1.0 - pooled) * (1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n2)));
    if (se == 0.0)
        return 0.0;
    return (p2 - p1) / se;
}

} // namespace antsel::stats
