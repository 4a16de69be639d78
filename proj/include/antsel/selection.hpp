// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "antsel/complex_matrix.hpp"
#include "antsel/rng.hpp"

namespace antsel
{

enum class Rule
{
    maxmin,
    first_fixed,
    first_ordered,
    qr_greedy,
    random,
};

// Stable identifiers: "maxmin", "first-fixed", "first-ordered", "qr-greedy", "random".
std::string_view rule_name(Rule rule) noexcept;
Rule parse_rule(std::string_view name);

// Strictly increasing column indices into a channel matrix.
class AntennaSubset
{
  public:
    explicit AntennaSubset(std::vector<std::size_t> indices);

    const std::vector<std::size_t>& indices() const noexcept { return indices_; }
    std::size_t size() const noexcept { return indices_.size(); }
    std::size_t operator[](std::size_t i) const { return indices_[i]; }
    bool contains(std::size_t column) const noexcept;

    friend auto operator<=>(const AntennaSubset&, const AntennaSubset&) = default;

  private:
    std::vector<std::size_t> indices_;
};

struct SubsetMetrics
{
    AntennaSubset subset;
    std::vector<double> heights; // heights[i]: column subset[i] against the other selected columns
    double min_height;
};

struct SelectionOutcome
{
    Rule rule;
    AntennaSubset subset;
    SubsetMetrics metrics;
    // Positions into subset; decode_order[0] is detected first.
    std::vector<std::size_t> decode_order;
    // Column indices in the order the rule picked them (equals subset for non-incremental rules).
    std::vector<std::size_t> selection_order;
};

std::uint64_t subset_count(std::size_t n_t, std::size_t L);

// All L-subsets of {0..n_t-1} in lexicographic order; the first C(n_t-1, L-1) contain column 0.
std::vector<AntennaSubset> enumerate_subsets(std::size_t n_t, std::size_t L);

// The subset at position rank of enumerate_subsets(n_t, L).
AntennaSubset subset_at_rank(std::size_t n_t, std::size_t L, std::uint64_t rank);

SubsetMetrics subset_metrics(const ComplexMatrix& h, const AntennaSubset& subset);

// Subset with the largest minimum projection height; ties go to the lexicographically smallest.
SelectionOutcome select_maxmin(const ComplexMatrix& h, std::size_t L);

// L = 2: maximize R_kj over pairs k < j, decoding column k (the smaller index) first.
SelectionOutcome select_first_layer_fixed(const ComplexMatrix& h, std::size_t L = 2);

// L = 2: maximize max(R_kj, R_jk) over pairs, decoding the stronger stream first.
SelectionOutcome select_first_layer_ordered(const ComplexMatrix& h, std::size_t L = 2);

// Incremental largest-residual selection; decoding runs in reverse selection order.
SelectionOutcome select_qr_greedy(const ComplexMatrix& h, std::size_t L);

// Uniform over enumerate_subsets(n_t, L), independent of the channel values.
SelectionOutcome select_random(const ComplexMatrix& h, std::size_t L, rng::CounterRng& gen);

SelectionOutcome select(Rule rule, const ComplexMatrix& h, std::size_t L, rng::CounterRng& gen);

// Projection height of the stream decoded first by a DF receiver.
double first_layer_height(const SelectionOutcome& outcome);

// The scalar whose lower tail defines the rule's outage: the weakest stream for
// "maxmin"/"random", the first decoded layer for the DF-oriented rules.
double outage_scalar(const SelectionOutcome& outcome);

} // namespace antsel
