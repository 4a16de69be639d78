// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "antsel/channel_geometry.hpp"
#include "antsel/errors.hpp"
#include "antsel/selection.hpp"

using namespace antsel;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{

using Indices = std::vector<std::size_t>;

// Orthogonal columns in n_t dimensions with the given squared norms.
ComplexMatrix orthogonal_with_norms(const std::vector<double>& norms_sq)
{
    const std::size_t n = norms_sq.size();
    std::vector<Complex> entries(n * n, 0.0);
    for (std::size_t k = 0; k < n; ++k)
        entries[k * n + k] = std::sqrt(norms_sq[k]);
    return ComplexMatrix(n, n, entries);
}

Indices positions_to_columns(const SelectionOutcome& o, const Indices& positions)
{
    Indices out;
    for (std::size_t p : positions)
        out.push_back(o.subset[p]);
    return out;
}

bool is_permutation_of_range(Indices v)
{
    std::sort(v.begin(), v.end());
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] != i)
            return false;
    return true;
}

} // namespace

TEST_CASE("rule names round-trip", "[selection]")
{
    for (Rule r : {Rule::maxmin, Rule::first_fixed, Rule::first_ordered, Rule::qr_greedy, Rule::random})
        CHECK(parse_rule(rule_name(r)) == r);
    CHECK(rule_name(Rule::qr_greedy) == "qr-greedy");
    CHECK_THROWS_AS(parse_rule("best"), ArgumentError);
}

TEST_CASE("subset enumeration", "[selection]")
{
    const auto s32 = enumerate_subsets(3, 2);
    REQUIRE(s32.size() == 3);
    CHECK(s32[0].indices() == Indices{0, 1});
    CHECK(s32[1].indices() == Indices{0, 2});
    CHECK(s32[2].indices() == Indices{1, 2});

    const auto s42 = enumerate_subsets(4, 2);
    REQUIRE(s42.size() == 6);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(s42[i].contains(0));
    for (std::size_t i = 3; i < 6; ++i)
        CHECK_FALSE(s42[i].contains(0));

    const auto full = enumerate_subsets(4, 4);
    REQUIRE(full.size() == 1);
    CHECK(full[0].indices() == Indices{0, 1, 2, 3});

    CHECK_THROWS_AS(enumerate_subsets(2, 3), ArgumentError);
    CHECK_THROWS_AS(AntennaSubset(Indices{2, 1}), ArgumentError);
}

TEST_CASE("subset enumeration matches ranks and binomial counts", "[selection][property]")
{
    for (std::size_t n = 1; n <= 8; ++n)
        for (std::size_t L = 1; L <= n; ++L)
        {
            const auto all = enumerate_subsets(n, L);
            REQUIRE(all.size() == subset_count(n, L));
            REQUIRE(std::is_sorted(all.begin(), all.end()));
            for (std::size_t r = 0; r < all.size(); ++r)
                REQUIRE(subset_at_rank(n, L, r) == all[r]);
            if (L >= 1 && n >= 2)
                REQUIRE(std::count_if(all.begin(), all.end(), [](const AntennaSubset& s) { return s.contains(0); }) ==
                        static_cast<std::ptrdiff_t>(subset_count(n - 1, L - 1)));
        }
}

TEST_CASE("subset metrics", "[selection]")
{
    SECTION("orthonormal columns")
    {
        const SubsetMetrics m = subset_metrics(ComplexMatrix::identity(3), AntennaSubset({0, 2}));
        CHECK_THAT(m.heights[0], WithinAbs(1.0, 1e-14));
        CHECK_THAT(m.heights[1], WithinAbs(1.0, 1e-14));
        CHECK_THAT(m.min_height, WithinAbs(1.0, 1e-14));
    }
    SECTION("collinear columns")
    {
        const auto h = ComplexMatrix::from_columns({{1.0, 1.0}, {2.0, 2.0}});
        const SubsetMetrics m = subset_metrics(h, AntennaSubset({0, 1}));
        CHECK_THAT(m.heights[0], WithinAbs(0.0, 1e-14));
        CHECK_THAT(m.heights[1], WithinAbs(0.0, 1e-14));
    }
    SECTION("45 degree columns")
    {
        const double r = 1.0 / std::sqrt(2.0);
        const auto h = ComplexMatrix::from_columns({{1.0, 0.0}, {r, r}});
        const SubsetMetrics m = subset_metrics(h, AntennaSubset({0, 1}));
        CHECK_THAT(m.heights[0], WithinAbs(0.5, 1e-14));
        CHECK_THAT(m.heights[1], WithinAbs(0.5, 1e-14));
        CHECK_THAT(m.min_height, WithinAbs(0.5, 1e-14));
    }
    SECTION("heights equal projections against the other selected columns")
    {
        const ComplexMatrix h = sample_channel(4, 5, 3, 0).matrix;
        const AntennaSubset s({0, 2, 4});
        const SubsetMetrics m = subset_metrics(h, s);
        for (std::size_t i = 0; i < 3; ++i)
        {
            Indices others;
            for (std::size_t j = 0; j < 3; ++j)
                if (j != i)
                    others.push_back(s[j]);
            CHECK_THAT(m.heights[i], WithinRel(projection_height_sq(h, s[i], others).height_sq, 1e-12));
        }
        CHECK(m.min_height == *std::min_element(m.heights.begin(), m.heights.end()));
    }
}

TEST_CASE("maxmin selection", "[selection]")
{
    SECTION("N_T = L gives the only subset")
    {
        const auto o = select_maxmin(sample_channel(3, 3, 1, 0).matrix, 3);
        CHECK(o.subset.indices() == Indices{0, 1, 2});
    }
    SECTION("ties resolve to the lexicographically smallest subset")
    {
        const auto h = ComplexMatrix::from_columns({{1.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}});
        const auto o = select_maxmin(h, 2);
        CHECK(o.subset.indices() == Indices{0, 1});
        CHECK_THAT(o.metrics.min_height, WithinAbs(1.0, 1e-14));
        CHECK(o.decode_order == Indices{0, 1});
    }
    SECTION("uniform scaling leaves the choice unchanged")
    {
        for (std::uint64_t t = 0; t < 50; ++t)
        {
            const ComplexMatrix h = sample_channel(3, 5, 4, t).matrix;
            REQUIRE(select_maxmin(h, 2).subset == select_maxmin(h.scaled({-2.5, 0.7}), 2).subset);
        }
    }
}

TEST_CASE("maxmin beats every enumerated subset", "[selection][property]")
{
    std::uint64_t t = 0;
    for (std::size_t n_t = 2; n_t <= 6; ++n_t)
        for (std::size_t L = 1; L <= std::min<std::size_t>(3, n_t); ++L)
            for (int rep = 0; rep < 10; ++rep, ++t)
            {
                const ComplexMatrix h = sample_channel(3, n_t, 31, t).matrix;
                const double best = select_maxmin(h, L).metrics.min_height;
                for (const AntennaSubset& s : enumerate_subsets(n_t, L))
                    REQUIRE(best >= subset_metrics(h, s).min_height);
            }
}

TEST_CASE("first-layer fixed selection", "[selection]")
{
    SECTION("two antennas")
    {
        const auto o = select_first_layer_fixed(sample_channel(2, 2, 1, 0).matrix);
        CHECK(o.subset.indices() == Indices{0, 1});
        CHECK(o.decode_order == Indices{0, 1});
    }
    SECTION("orthogonal columns: only k < j pairs count")
    {
        // R_kj = |h_k|^2; over k < j the largest is k = 0 (4), tie on j goes to j = 1.
        const auto o = select_first_layer_fixed(orthogonal_with_norms({4.0, 1.0, 9.0}));
        CHECK(o.subset.indices() == Indices{0, 1});
        CHECK(positions_to_columns(o, o.decode_order).front() == 0);
        CHECK_THAT(first_layer_height(o), WithinAbs(4.0, 1e-12));
    }
    SECTION("maximizes R_kj over k < j")
    {
        for (std::uint64_t t = 0; t < 100; ++t)
        {
            const ComplexMatrix h = sample_channel(3, 4, 8, t).matrix;
            const PairwiseHeights table(h);
            double best = 0.0;
            for (std::size_t k = 0; k < 4; ++k)
                for (std::size_t j = k + 1; j < 4; ++j)
                    best = std::max(best, table(k, j));
            const auto o = select_first_layer_fixed(h);
            REQUIRE_THAT(first_layer_height(o), WithinRel(best, 1e-12));
            REQUIRE(positions_to_columns(o, o.decode_order).front() == o.subset[0]);
            REQUIRE(outage_scalar(o) == first_layer_height(o));
        }
    }
    SECTION("scaling invariance")
    {
        const ComplexMatrix h = sample_channel(3, 4, 8, 1).matrix;
        CHECK(select_first_layer_fixed(h).subset == select_first_layer_fixed(h.scaled(3.0)).subset);
    }
    CHECK_THROWS_AS(select_first_layer_fixed(sample_channel(3, 4, 1, 0).matrix, 3), ArgumentError);
}

TEST_CASE("first-layer ordered selection", "[selection]")
{
    SECTION("orthogonal columns decode the strongest column first")
    {
        const auto o = select_first_layer_ordered(orthogonal_with_norms({1.0, 5.0}));
        CHECK(positions_to_columns(o, o.decode_order).front() == 1);
        const auto o3 = select_first_layer_ordered(orthogonal_with_norms({4.0, 1.0, 9.0}));
        CHECK(o3.subset.indices() == Indices{0, 2});
        CHECK(positions_to_columns(o3, o3.decode_order).front() == 2);
    }
    SECTION("dominates the fixed variant and agrees when the larger height has the smaller index")
    {
        for (std::uint64_t t = 0; t < 200; ++t)
        {
            const ComplexMatrix h = sample_channel(3, 3, 9, t).matrix;
            const auto fixed = select_first_layer_fixed(h);
            const auto ordered = select_first_layer_ordered(h);
            REQUIRE(first_layer_height(ordered) >= first_layer_height(fixed));
            const std::size_t first = positions_to_columns(ordered, ordered.decode_order).front();
            if (first == ordered.subset[0])
                REQUIRE(first_layer_height(ordered) == first_layer_height(fixed));
        }
    }
    SECTION("scaling invariance")
    {
        const ComplexMatrix h = sample_channel(3, 4, 8, 2).matrix;
        CHECK(select_first_layer_ordered(h).subset == select_first_layer_ordered(h.scaled(0.1)).subset);
    }
}

TEST_CASE("QR-greedy selection", "[selection]")
{
    SECTION("orthogonal columns pick by norm and decode in reverse")
    {
        const auto o = select_qr_greedy(orthogonal_with_norms({1.0, 4.0, 9.0}), 2);
        CHECK(o.selection_order == Indices{2, 1});
        CHECK(o.subset.indices() == Indices{1, 2});
        CHECK(positions_to_columns(o, o.decode_order).front() == 1);
        CHECK_THAT(outage_scalar(o), WithinAbs(4.0, 1e-12));
    }
    SECTION("L = N_T selects every column in greedy order")
    {
        const auto o = select_qr_greedy(orthogonal_with_norms({1.0, 4.0, 9.0}), 3);
        CHECK(o.subset.indices() == Indices{0, 1, 2});
        CHECK(o.selection_order == Indices{2, 1, 0});
    }
    SECTION("each greedy step maximizes the residual height")
    {
        for (std::uint64_t t = 0; t < 100; ++t)
        {
            const ComplexMatrix h = sample_channel(4, 5, 10, t).matrix;
            const auto o = select_qr_greedy(h, 3);
            Indices chosen;
            for (std::size_t step = 0; step < 3; ++step)
            {
                auto height = [&](std::size_t k) {
                    return chosen.empty() ? h.column(k).squaredNorm() : projection_height_sq(h, k, chosen).height_sq;
                };
                const double picked = height(o.selection_order[step]);
                for (std::size_t k = 0; k < 5; ++k)
                    if (std::find(chosen.begin(), chosen.end(), k) == chosen.end())
                        REQUIRE(picked >= height(k) * (1 - 1e-12));
                chosen.push_back(o.selection_order[step]);
            }
            REQUIRE(positions_to_columns(o, o.decode_order) == Indices{o.selection_order.rbegin(), o.selection_order.rend()});
        }
    }
}

TEST_CASE("random selection", "[selection]")
{
    SECTION("N_T = L is deterministic")
    {
        rng::CounterRng gen(1, 0, rng::Stream::selection);
        CHECK(select_random(sample_channel(2, 2, 1, 0).matrix, 2, gen).subset.indices() == Indices{0, 1});
    }
    SECTION("subset frequencies are uniform within 3 sigma")
    {
        const ComplexMatrix h = sample_channel(3, 3, 1, 0).matrix;
        const int n = 100000;
        std::array<int, 3> counts{};
        for (int t = 0; t < n; ++t)
        {
            rng::CounterRng gen(4, static_cast<std::uint64_t>(t), rng::Stream::selection);
            const auto o = select_random(h, 2, gen);
            const auto all = enumerate_subsets(3, 2);
            ++counts[static_cast<std::size_t>(std::find(all.begin(), all.end(), o.subset) - all.begin())];
        }
        const double sigma = std::sqrt(n * (1.0 / 3.0) * (2.0 / 3.0));
        for (int c : counts)
            CHECK(std::abs(c - n / 3.0) < 3 * sigma);
    }
    SECTION("independent of the channel values")
    {
        for (std::uint64_t t = 0; t < 50; ++t)
        {
            rng::CounterRng a(5, t, rng::Stream::selection), b(5, t, rng::Stream::selection);
            REQUIRE(select_random(sample_channel(3, 4, 1, t).matrix, 2, a).subset ==
                    select_random(sample_channel(3, 4, 2, t).matrix, 2, b).subset);
        }
    }
}

TEST_CASE("column permutation maps each deterministic rule's choice", "[selection][property]")
{
    const Indices pi{2, 0, 3, 1};
    for (std::uint64_t t = 0; t < 100; ++t)
    {
        const ComplexMatrix h = sample_channel(3, 4, 13, t).matrix;
        const ComplexMatrix permuted = h.select_columns(pi);
        for (Rule rule : {Rule::maxmin, Rule::first_ordered, Rule::qr_greedy})
        {
            rng::CounterRng g1(0, t, rng::Stream::selection), g2(0, t, rng::Stream::selection);
            const auto a = select(rule, h, 2, g1);
            const auto b = select(rule, permuted, 2, g2);
            std::set<std::size_t> mapped;
            for (std::size_t i : b.subset.indices())
                mapped.insert(pi[i]);
            REQUIRE(mapped == std::set<std::size_t>(a.subset.indices().begin(), a.subset.indices().end()));
        }
    }
}

TEST_CASE("maxmin min-height dominates every other rule per draw", "[selection][property]")
{
    for (std::uint64_t t = 0; t < 300; ++t)
    {
        const ComplexMatrix h = sample_channel(3, 3, 14, t).matrix;
        rng::CounterRng gen(14, t, rng::Stream::selection);
        const double best = select_maxmin(h, 2).metrics.min_height;
        for (Rule rule : {Rule::first_fixed, Rule::first_ordered, Rule::qr_greedy, Rule::random})
        {
            const auto o = select(rule, h, 2, gen);
            REQUIRE(best >= o.metrics.min_height);
            REQUIRE(is_permutation_of_range(o.decode_order));
        }
        // the first-fixed event implies the maxmin event (sandwich)
        REQUIRE(outage_scalar(select_first_layer_fixed(h)) >= best);
    }
}
