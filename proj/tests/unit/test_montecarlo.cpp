// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <vector>

#include "antsel/analytic.hpp"
#include "antsel/errors.hpp"
#include "antsel/montecarlo.hpp"

using namespace antsel;
using namespace antsel::mc;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{

ExperimentConfig outage_config(Rule rule, std::uint64_t trials, std::uint64_t seed = 1)
{
    ExperimentConfig c;
    c.n_t = 3;
    c.n_r = 3;
    c.L = 2;
    c.rule = rule;
    c.receiver = default_receiver(rule);
    c.trial_count = trials;
    c.master_seed = seed;
    c.grid = logspace(1e-3, 10.0, 41);
    return c;
}

// Curve with p = coefficient * x^slope, counts exact to about 1e-12 relative.
EmpiricalCurve exact_power_curve(double coefficient, double slope, const std::vector<double>& grid)
{
    const std::uint64_t trials = 1ULL << 60;
    EmpiricalCurve curve;
    for (double x : grid)
    {
        const double p = std::min(1.0, coefficient * std::pow(x, slope));
        curve.points.push_back({x, static_cast<std::uint64_t>(std::llround(p * static_cast<double>(trials))), trials});
    }
    return curve;
}

} // namespace

TEST_CASE("grid helpers", "[montecarlo]")
{
    const auto g = logspace(1e-3, 10.0, 5);
    REQUIRE(g.size() == 5);
    CHECK_THAT(g.front(), WithinRel(1e-3, 1e-15));
    CHECK_THAT(g[2], WithinRel(0.1, 1e-12));
    CHECK_THAT(g.back(), WithinRel(10.0, 1e-15));
    const auto l = linspace(0.0, 20.0, 5);
    CHECK(l == std::vector<double>{0.0, 5.0, 10.0, 15.0, 20.0});
    CHECK_THROWS_AS(logspace(-1.0, 1.0, 3), ArgumentError);
}

TEST_CASE("curve points", "[montecarlo]")
{
    const CurvePoint p{0.5, 25, 100};
    CHECK(p.probability() == 0.25);
    CHECK_THAT(p.standard_error(), WithinRel(std::sqrt(0.25 * 0.75 / 100), 1e-15));
    EmpiricalCurve bad{{{1.0, 5, 4}}};
    CHECK_THROWS_AS(bad.validate(), ArgumentError);
    EmpiricalCurve empty_trials{{{1.0, 0, 0}}};
    CHECK_THROWS_AS(empty_trials.validate(), ArgumentError);
}

TEST_CASE("slope fit", "[montecarlo]")
{
    SECTION("exact power law")
    {
        const SlopeFit fit = fit_slope(exact_power_curve(1.0, 3.0, logspace(0.01, 0.5, 30)));
        CHECK_THAT(fit.slope, WithinAbs(3.0, 1e-9));
        CHECK_THAT(fit.intercept, WithinAbs(0.0, 1e-8));
        CHECK(fit.x_hi <= std::cbrt(0.2) * (1 + 1e-12));
        CHECK(fit.points_used >= 3);
        const SlopeFit weighted = fit_slope(exact_power_curve(1.0, 3.0, logspace(0.01, 0.5, 30)),
                                            FitOptions{10, 0.2, 1e-6, Weighting::binomial});
        CHECK_THAT(weighted.slope, WithinAbs(3.0, 1e-9));
    }
    SECTION("Gamma(2,1) CDF over [1e-3, 1e-1]")
    {
        const auto grid = logspace(1e-3, 1e-1, 21);
        std::vector<double> p;
        for (double x : grid)
            p.push_back(analytic::chi2n_cdf(x, 2));
        CHECK_THAT(fit_power_law(grid, p).slope, WithinAbs(2.0, 0.02));
    }
    SECTION("adaptive range drops sparse and saturated points")
    {
        EmpiricalCurve curve{{{0.1, 5, 1000}, {0.2, 20, 1000}, {0.4, 80, 1000}, {0.8, 160, 1000}, {1.6, 600, 1000}}};
        const SlopeFit fit = fit_slope(curve);
        CHECK(fit.points_used == 3);
        CHECK(fit.x_lo == 0.2);
        CHECK(fit.x_hi == 0.8);
        CHECK(fit.standard_error > 0.0);
    }
    SECTION("too few usable points")
    {
        EmpiricalCurve curve{{{0.1, 0, 1000}, {0.2, 50, 1000}, {0.4, 900, 1000}}};
        CHECK_THROWS_AS(fit_slope(curve), FitError);
        CHECK_THROWS_AS(fit_power_law(std::vector<double>{1, 2}, std::vector<double>{1, 2}), FitError);
    }
}

TEST_CASE("rule and receiver compatibility", "[montecarlo]")
{
    CHECK(rule_supports_receiver(Rule::maxmin, Receiver::mmse));
    CHECK(rule_supports_receiver(Rule::random, Receiver::df_zf));
    CHECK_FALSE(rule_supports_receiver(Rule::qr_greedy, Receiver::zf));
    CHECK(default_receiver(Rule::first_fixed) == Receiver::df_zf);
    CHECK(default_receiver(Rule::maxmin) == Receiver::zf);

    ExperimentConfig c = outage_config(Rule::first_ordered, 10);
    c.receiver = Receiver::mmse;
    CHECK_THROWS_AS(estimate_outage(c), ArgumentError);
    c = outage_config(Rule::maxmin, 10);
    c.grid = {0.5, 0.1};
    CHECK_THROWS_AS(estimate_outage(c), ArgumentError);
    c = outage_config(Rule::maxmin, 0);
    CHECK_THROWS_AS(estimate_outage(c), ArgumentError);
    c = outage_config(Rule::first_fixed, 10);
    c.n_t = 4;
    c.L = 3;
    CHECK_THROWS_AS(estimate_outage(c), ArgumentError);
}

TEST_CASE("outage estimation", "[montecarlo]")
{
    SECTION("saturates beyond the support ceiling")
    {
        ExperimentConfig c = outage_config(Rule::maxmin, 10000);
        c.grid = {1e3};
        CHECK(estimate_outage(c).points.front().probability() >= 0.999);
    }
    SECTION("curves are nondecreasing")
    {
        for (Rule r : {Rule::maxmin, Rule::random, Rule::qr_greedy})
        {
            const EmpiricalCurve curve = estimate_outage(outage_config(r, 20000));
            for (std::size_t i = 1; i < curve.points.size(); ++i)
                REQUIRE(curve.points[i].hits >= curve.points[i - 1].hits);
        }
    }
    SECTION("maxmin and random slopes separate")
    {
        const std::array<Rule, 2> rules{Rule::maxmin, Rule::random};
        const auto curves = estimate_outage_rules(outage_config(Rule::maxmin, 1'000'000, 3), rules);
        const double s_maxmin = fit_slope(curves[0]).slope;
        const double s_random = fit_slope(curves[1]).slope;
        CHECK(s_maxmin >= 3.2);
        CHECK(s_maxmin <= 4.8);
        CHECK_THAT(s_random, WithinAbs(2.0, 0.3));
        for (std::size_t i = 0; i < curves[0].points.size(); ++i)
            REQUIRE(curves[0].points[i].hits <= curves[1].points[i].hits);
    }
    SECTION("common draws reproduce single-rule runs")
    {
        const std::array<Rule, 3> rules{Rule::random, Rule::first_fixed, Rule::maxmin};
        const auto curves = estimate_outage_rules(outage_config(Rule::maxmin, 5000), rules);
        for (std::size_t i = 0; i < rules.size(); ++i)
        {
            const EmpiricalCurve single = estimate_outage(outage_config(rules[i], 5000));
            for (std::size_t j = 0; j < single.points.size(); ++j)
                REQUIRE(single.points[j].hits == curves[i].points[j].hits);
        }
    }
    SECTION("first-fixed curve lies below maxmin on common draws")
    {
        const std::array<Rule, 2> rules{Rule::first_fixed, Rule::maxmin};
        const auto curves = estimate_outage_rules(outage_config(Rule::maxmin, 50000), rules);
        for (std::size_t j = 0; j < curves[0].points.size(); ++j)
            REQUIRE(curves[0].points[j].hits <= curves[1].points[j].hits);
    }
}

TEST_CASE("results do not depend on workers or chunking", "[montecarlo][property]")
{
    auto run = [](std::size_t workers, std::size_t chunk) {
        ExperimentConfig c = outage_config(Rule::qr_greedy, 30000, 9);
        c.workers = workers;
        c.chunk_size = chunk;
        return estimate_outage(c);
    };
    const EmpiricalCurve reference = run(1, 65536);
    for (auto [w, ch] : {std::pair<std::size_t, std::size_t>{2, 7}, {3, 1000}, {4, 30000}, {0, 4096}})
    {
        const EmpiricalCurve other = run(w, ch);
        for (std::size_t i = 0; i < reference.points.size(); ++i)
            REQUIRE(other.points[i].hits == reference.points[i].hits);
    }
}

TEST_CASE("BER estimation", "[montecarlo]")
{
    SECTION("noiseless limit gives no errors")
    {
        ExperimentConfig c = outage_config(Rule::maxmin, 250);
        c.grid = {90.0};
        c.frame_length = 10;
        const CurvePoint p = estimate_ber(c).points.front();
        CHECK(p.trials == 250 * 10 * 2 * 2);
        CHECK(p.hits == 0);
    }
    SECTION("single antenna matches the Rayleigh-averaged QPSK bit error rate")
    {
        ExperimentConfig c;
        c.n_t = 1;
        c.n_r = 1;
        c.L = 1;
        c.trial_count = 200000;
        c.frame_length = 1;
        c.master_seed = 4;
        c.grid = {0.0, 10.0};
        const EmpiricalCurve curve = estimate_ber(c);
        for (const CurvePoint& p : curve.points)
        {
            const double gamma = std::pow(10.0, p.abscissa / 10.0);
            const double expected = 0.5 * (1.0 - std::sqrt(gamma / (2.0 + gamma)));
            // two bits share one fading draw: use the per-trial count as a conservative sample size
            const double sigma = std::sqrt(expected * (1 - expected) / static_cast<double>(c.trial_count));
            CHECK(std::abs(p.probability() - expected) < 3 * sigma);
        }
    }
    SECTION("error counts shrink with SNR and orderings all run")
    {
        ExperimentConfig c = outage_config(Rule::qr_greedy, 2000);
        c.grid = linspace(0.0, 20.0, 5);
        c.frame_length = 20;
        for (Ordering o : {Ordering::fixed, Ordering::vblast, Ordering::qr_reverse})
            for (Receiver r : {Receiver::df_zf, Receiver::df_mmse})
                for (Feedback f : {Feedback::actual, Feedback::genie})
                {
                    c.ordering = o;
                    c.receiver = r;
                    c.feedback = f;
                    const EmpiricalCurve curve = estimate_ber(c);
                    REQUIRE(curve.points.front().hits > curve.points.back().hits);
                }
    }
    SECTION("genie feedback never does worse than actual feedback by much")
    {
        ExperimentConfig c = outage_config(Rule::first_fixed, 20000);
        c.grid = {10.0};
        c.frame_length = 10;
        c.feedback = Feedback::actual;
        const auto actual = estimate_ber(c).points.front();
        c.feedback = Feedback::genie;
        const auto genie = estimate_ber(c).points.front();
        CHECK(genie.hits <= actual.hits);
    }
}

TEST_CASE("DMT estimation", "[montecarlo]")
{
    ExperimentConfig c = outage_config(Rule::maxmin, 200000, 5);
    c.grid = linspace(-10.0, 60.0, 57);
    SECTION("r = 0 is the outage experiment at thresholds L / rho0")
    {
        const DmtEstimate d = estimate_dmt(c, 0.0);
        ExperimentConfig o = c;
        o.grid.clear();
        for (auto it = c.grid.rbegin(); it != c.grid.rend(); ++it)
            o.grid.push_back(2.0 / std::pow(10.0, *it / 10.0));
        const EmpiricalCurve outage = estimate_outage(o);
        for (std::size_t i = 0; i < d.curve.points.size(); ++i)
            REQUIRE(d.curve.points[i].hits == outage.points[outage.points.size() - 1 - i].hits);
        CHECK(d.diversity == -d.fit.slope);
    }
    SECTION("r = 1 sits near the tradeoff value")
    {
        CHECK_THAT(estimate_dmt(c, 1.0).diversity, WithinAbs(2.0, 0.5));
    }
    SECTION("r close to L flattens the curve")
    {
        ExperimentConfig steep = c;
        steep.grid = linspace(0.0, 400.0, 81);
        CHECK(estimate_dmt(steep, 1.95).diversity < 0.5);
    }
    CHECK_THROWS_AS(estimate_dmt(c, 2.0), ArgumentError);
}

TEST_CASE("lemma harnesses", "[montecarlo]")
{
    LemmaParameters iii;
    iii.exponents = {1.0, 2.0};
    const LemmaReport r3 = lemma_harness(Lemma::iii, iii, 1'000'000, 1);
    CHECK(r3.passed);
    CHECK(r3.expected == 3.0);

    LemmaParameters iv;
    iv.exponents = {1.0, 1.0};
    const LemmaReport r4 = lemma_harness(Lemma::iv, iv, 1'000'000, 2);
    CHECK(r4.passed);
    REQUIRE(r4.fits.size() == 2);
    CHECK_THAT(r4.fits[0].fit.slope, WithinAbs(1.0, 0.1));

    const LemmaReport r5 = lemma_harness(Lemma::v, LemmaParameters{}, 1'000'000, 3);
    CHECK(r5.passed);
    CHECK(r5.fits[0].fit.slope <= 2.0);

    LemmaParameters bad;
    bad.exponents = {1.0, -1.0};
    CHECK_THROWS_AS(lemma_harness(Lemma::iii, bad, 100, 1), ArgumentError);
    CHECK(parse_lemma("IV") == Lemma::iv);
    CHECK_THROWS_AS(parse_lemma("VII"), ArgumentError);
}

TEST_CASE("marginal and independence suites", "[montecarlo]")
{
    CHECK(marginal_checks(3, 3, 20000, 7).passed());
    CHECK(marginal_checks(4, 2, 20000, 7).passed());
    const StatReport report = independence_suite(4, 3, 200000, 8, 0.02, 3.5);
    CHECK(report.passed());
    bool has_control = false;
    for (const StatCheck& c : report.checks)
        if (c.name.find("negative control") != std::string::npos)
        {
            has_control = true;
            CHECK(c.statistic > 0.05);
        }
    CHECK(has_control);
    CHECK_THROWS_AS(independence_suite(2, 3, 100, 1), DimensionError);
}
