// SPDX-License-Identifier: Apache-2.0
#include "antsel/selection.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "antsel/channel_geometry.hpp"
#include "antsel/errors.hpp"

namespace antsel
{

namespace
{

void check_dimensions(const ComplexMatrix& h, std::size_t L)
{
    if (L == 0)
        throw DimensionError("number of selected antennas must be positive");
    if (h.cols() < L)
        throw DimensionError("cannot select " + std::to_string(L) + " of " + std::to_string(h.cols()) +
                             " transmit antennas");
    if (h.rows() < L)
        throw DimensionError("need at least " + std::to_string(L) + " receive antennas, got " +
                             std::to_string(h.rows()));
}

void require_pair(std::size_t L)
{
    if (L != 2)
        throw ArgumentError("first-layer selection is defined for L = 2 only, got L = " + std::to_string(L));
}

SubsetMetrics pair_metrics(const PairwiseHeights& table, std::size_t a, std::size_t b)
{
    const double h_a = table(a, b);
    const double h_b = table(b, a);
    return {AntennaSubset({a, b}), {h_a, h_b}, std::min(h_a, h_b)};
}

std::vector<std::size_t> identity_order(std::size_t n)
{
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    return order;
}

} // namespace

std::string_view rule_name(Rule rule) noexcept
{
    switch (rule)
    {
    case Rule::maxmin:
        return "maxmin";
    case Rule::first_fixed:
        return "first-fixed";
    case Rule::first_ordered:
        return "first-ordered";
    case Rule::qr_greedy:
        return "qr-greedy";
    case Rule::random:
        return "random";
    }
    return "unknown";
}

Rule parse_rule(std::string_view name)
{
    for (Rule rule : {Rule::maxmin, Rule::first_fixed, Rule::first_ordered, Rule::qr_greedy, Rule::random})
        if (rule_name(rule) == name)
            return rule;
    throw ArgumentError("unknown selection rule '" + std::string(name) + "'");
}

AntennaSubset::AntennaSubset(std::vector<std::size_t> indices) : indices_(std::move(indices))
{
    if (indices_.empty())
        throw ArgumentError("antenna subset must not be empty");
    for (std::size_t i = 1; i < indices_.size(); ++i)
        if (indices_[i] <= indices_[i - 1])
            throw ArgumentError("antenna subset indices must be strictly increasing");
}

bool AntennaSubset::contains(std::size_t column) const noexcept
{
    return std::binary_search(indices_.begin(), indices_.end(), column);
}

std::uint64_t subset_count(std::size_t n_t, std::size_t L)
{
    if (L > n_t)
        return 0;
    std::uint64_t count = 1;
    for (std::size_t i = 1; i <= L; ++i)
        count = count * (n_t - L + i) / i;
    return count;
}

std::vector<AntennaSubset> enumerate_subsets(std::size_t n_t, std::size_t L)
{
    if (L == 0 || n_t == 0)
        throw ArgumentError("subset size and antenna count must be positive");
    if (L > n_t)
        throw ArgumentError("cannot choose " + std::to_string(L) + " of " + std::to_string(n_t) + " antennas");

    std::vector<AntennaSubset> subsets;
    subsets.reserve(subset_count(n_t, L));
    std::vector<std::size_t> current = identity_order(L);
    for (;;)
    {
        subsets.emplace_back(current);
        // advance to the next combination in lexicographic order
        std::size_t i = L;
        while (i > 0 && current[i - 1] == n_t - L + (i - 1))
            --i;
        if (i == 0)
            break;
        ++current[i - 1];
        for (std::size_t j = i; j < L; ++j)
            current[j] = current[j - 1] + 1;
    }
    return subsets;
}

AntennaSubset subset_at_rank(std::size_t n_t, std::size_t L, std::uint64_t rank)
{
    if (L == 0 || L > n_t)
        throw ArgumentError("invalid subset size");
    if (rank >= subset_count(n_t, L))
        throw ArgumentError("subset rank out of range");
    std::vector<std::size_t> indices;
    indices.reserve(L);
    std::size_t next = 0;
    for (std::size_t slot = 0; slot < L; ++slot)
    {
        // skip first elements whose block of completions lies entirely before rank
        for (;;)
        {
            const std::uint64_t block = subset_count(n_t - next - 1, L - slot - 1);
            if (rank < block)
                break;
            rank -= block;
            ++next;
        }
        indices.push_back(next++);
    }
    return AntennaSubset(std::move(indices));
}

SubsetMetrics subset_metrics(const ComplexMatrix& h, const AntennaSubset& subset)
{
    const std::size_t L = subset.size();
    if (subset.indices().back() >= h.cols())
        throw DimensionError("subset references column " + std::to_string(subset.indices().back()) +
                             " of a " + std::to_string(h.cols()) + "-column channel");
    if (h.rows() < L)
        throw DimensionError("need at least " + std::to_string(L) + " receive antennas");

    std::vector<double> heights(L);
    if (L == 2)
    {
        heights[0] = line_projection_height_sq(h, subset[0], subset[1]);
        heights[1] = line_projection_height_sq(h, subset[1], subset[0]);
    }
    else
    {
        std::vector<std::size_t> others;
        for (std::size_t i = 0; i < L; ++i)
        {
            others.clear();
            for (std::size_t j = 0; j < L; ++j)
                if (j != i)
                    others.push_back(subset[j]);
            heights[i] = projection_height_sq(h, subset[i], others).height_sq;
        }
    }
    const double min_height = *std::min_element(heights.begin(), heights.end());
    return {subset, std::move(heights), min_height};
}

SelectionOutcome select_maxmin(const ComplexMatrix& h, std::size_t L)
{
    check_dimensions(h, L);
    if (L == 2)
    {
        const PairwiseHeights table(h);
        std::size_t best_a = 0, best_b = 1;
        double best = -1.0;
        for (std::size_t a = 0; a < h.cols(); ++a)
            for (std::size_t b = a + 1; b < h.cols(); ++b)
            {
                const double weakest = std::min(table(a, b), table(b, a));
                if (weakest > best)
                {
                    best = weakest;
                    best_a = a;
                    best_b = b;
                }
            }
        SubsetMetrics metrics = pair_metrics(table, best_a, best_b);
        AntennaSubset subset = metrics.subset;
        return {Rule::maxmin, subset, std::move(metrics), identity_order(2), subset.indices()};
    }

    std::vector<AntennaSubset> candidates = enumerate_subsets(h.cols(), L);
    SubsetMetrics best = subset_metrics(h, candidates.front());
    for (std::size_t i = 1; i < candidates.size(); ++i)
    {
        SubsetMetrics metrics = subset_metrics(h, candidates[i]);
        if (metrics.min_height > best.min_height)
            best = std::move(metrics);
    }
    AntennaSubset subset = best.subset;
    return {Rule::maxmin, subset, std::move(best), identity_order(L), subset.indices()};
}

SelectionOutcome select_first_layer_fixed(const ComplexMatrix& h, std::size_t L)
{
    require_pair(L);
    check_dimensions(h, L);
    const PairwiseHeights table(h);
    std::size_t best_a = 0, best_b = 1;
    double best = -1.0;
    for (std::size_t a = 0; a < h.cols(); ++a)
        for (std::size_t b = a + 1; b < h.cols(); ++b)
            if (table(a, b) > best)
            {
                best = table(a, b);
                best_a = a;
                best_b = b;
            }
    SubsetMetrics metrics = pair_metrics(table, best_a, best_b);
    AntennaSubset subset = metrics.subset;
    return {Rule::first_fixed, subset, std::move(metrics), {0, 1}, subset.indices()};
}

SelectionOutcome select_first_layer_ordered(const ComplexMatrix& h, std::size_t L)
{
    require_pair(L);
    check_dimensions(h, L);
    const PairwiseHeights table(h);
    std::size_t best_a = 0, best_b = 1;
    double best = -1.0;
    for (std::size_t a = 0; a < h.cols(); ++a)
        for (std::size_t b = a + 1; b < h.cols(); ++b)
        {
            const double strongest = std::max(table(a, b), table(b, a));
            if (strongest > best)
            {
                best = strongest;
                best_a = a;
                best_b = b;
            }
        }
    SubsetMetrics metrics = pair_metrics(table, best_a, best_b);
    AntennaSubset subset = metrics.subset;
    std::vector<std::size_t> order = metrics.heights[1] > metrics.heights[0] ? std::vector<std::size_t>{1, 0}
                                                                            : std::vector<std::size_t>{0, 1};
    return {Rule::first_ordered, subset, std::move(metrics), std::move(order), subset.indices()};
}

SelectionOutcome select_qr_greedy(const ComplexMatrix& h, std::size_t L)
{
    check_dimensions(h, L);
    const std::size_t n_t = h.cols();
    Eigen::MatrixXcd residual = h.eigen();
    std::vector<double> height(n_t);
    for (std::size_t j = 0; j < n_t; ++j)
        height[j] = residual.col(static_cast<Eigen::Index>(j)).squaredNorm();
    std::vector<bool> taken(n_t, false);
    std::vector<std::size_t> order;
    order.reserve(L);

    for (std::size_t step = 0; step < L; ++step)
    {
        std::size_t pick = n_t;
        for (std::size_t j = 0; j < n_t; ++j)
            if (!taken[j] && (pick == n_t || height[j] > height[pick]))
                pick = j;
        taken[pick] = true;
        order.push_back(pick);
        if (step + 1 == L || height[pick] <= 0.0)
            continue;
        // deflate the remaining columns against the new direction
        const Eigen::VectorXcd q = residual.col(static_cast<Eigen::Index>(pick)) / std::sqrt(height[pick]);
        for (std::size_t j = 0; j < n_t; ++j)
        {
            if (taken[j])
                continue;
            auto col = residual.col(static_cast<Eigen::Index>(j));
            col -= q * q.dot(col);
            height[j] = col.squaredNorm();
        }
    }

    std::vector<std::size_t> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    AntennaSubset subset(sorted);
    std::vector<std::size_t> decode_order;
    decode_order.reserve(L);
    for (auto it = order.rbegin(); it != order.rend(); ++it)
        decode_order.push_back(static_cast<std::size_t>(
            std::lower_bound(sorted.begin(), sorted.end(), *it) - sorted.begin()));
    SubsetMetrics metrics = subset_metrics(h, subset);
    return {Rule::qr_greedy, std::move(subset), std::move(metrics), std::move(decode_order), std::move(order)};
}

SelectionOutcome select_random(const ComplexMatrix& h, std::size_t L, rng::CounterRng& gen)
{
    check_dimensions(h, L);
    AntennaSubset subset = subset_at_rank(h.cols(), L, gen.below(subset_count(h.cols(), L)));
    SubsetMetrics metrics = subset_metrics(h, subset);
    std::vector<std::size_t> selection = subset.indices();
    return {Rule::random, std::move(subset), std::move(metrics), identity_order(L), std::move(selection)};
}

SelectionOutcome select(Rule rule, const ComplexMatrix& h, std::size_t L, rng::CounterRng& gen)
{
    switch (rule)
    {
    case Rule::maxmin:
        return select_maxmin(h, L);
    case Rule::first_fixed:
        return select_first_layer_fixed(h, L);
    case Rule::first_ordered:
        return select_first_layer_ordered(h, L);
    case Rule::qr_greedy:
        return select_qr_greedy(h, L);
    case Rule::random:
        return select_random(h, L, gen);
    }
    throw ArgumentError("unknown selection rule");
}

double first_layer_height(const SelectionOutcome& outcome)
{
    return outcome.metrics.heights.at(outcome.decode_order.at(0));
}

double outage_scalar(const SelectionOutcome& outcome)
{
    switch (outcome.rule)
    {
    case Rule::maxmin:
    case Rule::random:
        return outcome.metrics.min_height;
    case Rule::first_fixed:
    case Rule::first_ordered:
    case Rule::qr_greedy:
        return first_layer_height(outcome);
    }
    throw ArgumentError("unknown selection rule");
}

} // namespace antsel
