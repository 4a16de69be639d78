// SPDX-License-Identifier: Apache-2.0
#include "antsel/verify.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <map>
#include <mutex>
#include <ostream>
#include <tuple>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "antsel/analytic.hpp"
#include "antsel/channel_geometry.hpp"
#include "antsel/cli.hpp"
#include "antsel/errors.hpp"
#include "antsel/montecarlo.hpp"
#include "antsel/receivers.hpp"
#include "antsel/selection.hpp"
#include "antsel/stats.hpp"

namespace antsel::verify
{

namespace
{

std::string fmt(const char* format, ...)
{
    char buffer[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buffer, sizeof buffer, format, args);
    va_end(args);
    return buffer;
}

double relative_difference(double a, double b)
{
    return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

struct Budget
{
    std::uint64_t outage_trials;
    std::uint64_t ber_trials;
    std::uint64_t dmt_trials;
    std::uint64_t lemma_trials;
    std::uint64_t reproducibility_trials;
};

Budget budget_for(Scale scale)
{
    if (scale == Scale::full)
        return {10'000'000, 1'000'000, 10'000'000, 10'000'000, 40'000};
    return {1'000'000, 200'000, 1'000'000, 1'000'000, 20'000};
}

constexpr std::array<Rule, 5> kRules{Rule::maxmin, Rule::random, Rule::first_fixed, Rule::first_ordered,
                                     Rule::qr_greedy};

// Outage curves of every rule on common draws, shared by the criteria that read them.
struct CommonOutage
{
    std::vector<mc::EmpiricalCurve> curves; // in kRules order
    std::uint64_t trials;
};

const CommonOutage& common_outage(const VerifyOptions& options)
{
    static std::mutex mutex;
    static std::map<std::tuple<int, std::uint64_t>, CommonOutage> cache;
    const auto key = std::make_tuple(static_cast<int>(options.scale), options.seed);
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end())
        return it->second;
    mc::ExperimentConfig config;
    config.n_t = 3;
    config.n_r = 3;
    config.L = 2;
    config.trial_count = budget_for(options.scale).outage_trials;
    config.master_seed = options.seed;
    config.workers = options.workers;
    config.grid = mc::logspace(1e-3, 10.0, 41);
    CommonOutage result{mc::estimate_outage_rules(config, kRules), config.trial_count};
    return cache.emplace(key, std::move(result)).first->second;
}

std::size_t rule_slot(Rule rule)
{
    return static_cast<std::size_t>(std::find(kRules.begin(), kRules.end(), rule) - kRules.begin());
}

double fitted_slope(const mc::EmpiricalCurve& curve, mc::Weighting weighting = mc::Weighting::unweighted)
{
    mc::FitOptions options;
    options.weighting = weighting;
    return mc::fit_slope(curve, options).slope;
}

bool in_range(double v, double lo, double hi)
{
    return v >= lo && v <= hi;
}

CriterionResult criterion_1()
{
    CriterionResult result{1, "analytic expansion anchor", false, {}, {}, 0.0};
    const double x = 1e-3;
    const double ratio33 = analytic::pr_outage_quadrature(x, 3, 3) / std::pow(x, 4) * 120.0;
    const double ratio43 = analytic::pr_outage_quadrature(x, 4, 3) / std::pow(x, 6) * 20160.0;
    result.passed = in_range(ratio33, 0.98, 1.02) && in_range(ratio43, 0.98, 1.02);
    result.summary = fmt("Pr/x^M over leading: (3,3) %.6f, (4,3) %.6f, band [0.98, 1.02]", ratio33, ratio43);
    result.notes.push_back(fmt("closed-form leading (3,3) %.10g, (4,3) %.10g",
                               analytic::outage_coefficient(3, 3).leading,
                               analytic::outage_coefficient(4, 3).leading));
    return result;
}

CriterionResult criterion_2()
{
    CriterionResult result{2, "analytic slope", false, {}, {}, 0.0};
    const std::vector<double> grid = mc::logspace(1e-4, 1e-2, 21);
    std::vector<double> plain, restricted;
    for (double x : grid)
    {
        plain.push_back(analytic::pr_outage_quadrature(x, 3, 3, false));
        restricted.push_back(analytic::pr_outage_quadrature(x, 3, 3, true));
    }
    const double s_plain = mc::fit_power_law(grid, plain).slope;
    const double s_restricted = mc::fit_power_law(grid, restricted).slope;
    result.passed = std::abs(s_plain - 4.0) <= 0.05 && std::abs(s_plain - s_restricted) <= 0.05;
    result.summary = fmt("slope %.5f (target 4 +/- 0.05), restricted %.5f, difference %.2e (limit 0.05)", s_plain,
                         s_restricted, std::abs(s_plain - s_restricted));
    return result;
}

CriterionResult criterion_3()
{
    CriterionResult result{3, "coefficient positivity and identities", false, {}, {}, 0.0};
    bool positive = true, literal_bound = true, sum_bound = true;
    double worst_literal = 0.0; // largest b_M * M * M!
    for (std::size_t n_t = 2; n_t <= 12; ++n_t)
        for (std::size_t n_r = 2; n_r <= 12; ++n_r)
        {
            const analytic::ExpansionCoefficients c = analytic::outage_coefficient(n_t, n_r);
            const double m = static_cast<double>(c.M);
            positive = positive && c.leading > 0.0;
            literal_bound = literal_bound && c.b_M < c.inverse_m_factorial / m;
            sum_bound = sum_bound && c.b_M < c.inverse_m_factorial;
            worst_literal = std::max(worst_literal, c.b_M * m / c.inverse_m_factorial);
        }
    const std::vector<IdentityCheck> identities = analytic_selftest();
    const bool identities_pass =
        std::all_of(identities.begin(), identities.end(), [](const IdentityCheck& c) { return c.passed; });
    result.passed = positive && literal_bound && identities_pass;
    result.summary = fmt("leading > 0: %s; b_M < 1/(M*M!): %s (max b_M*M*M! = %.4g); %zu identities: %s",
                         positive ? "yes" : "no", literal_bound ? "yes" : "no", worst_literal, identities.size(),
                         identities_pass ? "pass" : "FAIL");
    const analytic::ExpansionCoefficients c33 = analytic::outage_coefficient(3, 3);
    result.notes.push_back(fmt("(3,3): b_M = %.10g vs 1/(M*M!) = %.10g and 1/M! = %.10g", c33.b_M,
                               c33.inverse_m_factorial / 4.0, c33.inverse_m_factorial));
    result.notes.push_back(fmt("sum form sum_k k!/(M+k+1)! < 1/(M*M!), i.e. b_M < 1/M!, holds on the grid: %s",
                               sum_bound ? "yes" : "no"));
    for (const IdentityCheck& c : identities)
        if (!c.passed)
            result.notes.push_back("failed identity " + c.name + ": " + c.detail);
    return result;
}

CriterionResult criterion_4(const VerifyOptions& options)
{
    CriterionResult result{4, "marginal distributions", true, {}, {}, 0.0};
    for (auto [n_t, n_r] : {std::pair<std::size_t, std::size_t>{3, 3}, {4, 2}})
    {
        const mc::StatReport report = mc::marginal_checks(n_t, n_r, 100'000, options.seed, 0.01);
        result.passed = result.passed && report.passed();
        for (const mc::StatCheck& c : report.checks)
            result.notes.push_back(fmt("%s: %.4f (threshold %.2f) %s", c.name.c_str(), c.statistic, c.threshold,
                                       c.passed ? "pass" : "FAIL"));
    }
    result.summary = "KS at significance 0.01 with 1e5 samples for (3,3) and (4,2)";
    return result;
}

CriterionResult criterion_5(const VerifyOptions& options)
{
    CriterionResult result{5, "independence structure", false, {}, {}, 0.0};
    const mc::StatReport report = mc::independence_suite(4, 3, 1'000'000, options.seed, 0.01, 3.0);
    result.passed = report.passed();
    std::size_t failures = 0;
    double worst_corr = 0.0, worst_sigma = 0.0;
    for (const mc::StatCheck& c : report.checks)
    {
        if (!c.passed && c.gating)
            ++failures;
        if (c.name.rfind("|Pearson|", 0) == 0)
            worst_corr = std::max(worst_corr, std::abs(c.statistic));
        else if (c.name.rfind("product CDF", 0) == 0)
            worst_sigma = std::max(worst_sigma, std::abs(c.statistic));
        if (!c.passed || !c.gating)
            result.notes.push_back(fmt("%s: %.5f (threshold %.3f)%s%s", c.name.c_str(), c.statistic, c.threshold,
                                       c.gating ? "" : " informational", c.passed ? "" : " FAIL"));
    }
    result.summary = fmt("(4,3) at 1e6 samples: %zu checks, %zu gating failures, max |corr| %.4f, max probe %.2f sigma",
                         report.checks.size(), failures, worst_corr, worst_sigma);
    return result;
}

CriterionResult criterion_6(const VerifyOptions& options)
{
    CriterionResult result{6, "diversity-order separation", false, {}, {}, 0.0};
    const CommonOutage& common = common_outage(options);
    std::array<double, kRules.size()> slope{};
    for (std::size_t i = 0; i < kRules.size(); ++i)
        slope[i] = fitted_slope(common.curves[i]);
    const double maxmin = slope[rule_slot(Rule::maxmin)];
    const double random = slope[rule_slot(Rule::random)];
    const double fixed = slope[rule_slot(Rule::first_fixed)];
    const double ordered = slope[rule_slot(Rule::first_ordered)];
    result.passed = in_range(maxmin, 3.2, 4.8) && in_range(random, 1.7, 2.3) && maxmin - random >= 1.5 &&
                    in_range(fixed, 3.2, 4.8) && in_range(ordered, 3.2, 4.8);
    result.summary = fmt("%g trials: maxmin %.3f, random %.3f (gap %.3f >= 1.5), first-fixed %.3f, first-ordered %.3f",
                         static_cast<double>(common.trials), maxmin, random, maxmin - random, fixed, ordered);

    std::string weighted = "binomially weighted slopes:";
    for (std::size_t i = 0; i < kRules.size(); ++i)
    {
        try
        {
            weighted += fmt(" %s %.3f", std::string(rule_name(kRules[i])).c_str(),
                            fitted_slope(common.curves[i], mc::Weighting::binomial));
        }
        catch (const FitError&)
        {
            weighted += fmt(" %s n/a", std::string(rule_name(kRules[i])).c_str());
        }
    }
    result.notes.push_back(weighted);
    auto below_everywhere = [&](Rule lower, Rule upper) {
        const auto& a = common.curves[rule_slot(lower)].points;
        const auto& b = common.curves[rule_slot(upper)].points;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i].hits > b[i].hits)
                return false;
        return true;
    };
    result.notes.push_back(fmt("pointwise first-fixed <= maxmin <= random on common draws: %s",
                               below_everywhere(Rule::first_fixed, Rule::maxmin) &&
                                       below_everywhere(Rule::maxmin, Rule::random)
                                   ? "yes"
                                   : "no"));
    return result;
}

CriterionResult criterion_7(const VerifyOptions& options)
{
    CriterionResult result{7, "QR/DF structure", false, {}, {}, 0.0};
    double worst_relative = 0.0;
    bool max_norm_first = true;
    std::size_t draws = 0;
    for (auto [n_t, n_r, L] : {std::tuple<std::size_t, std::size_t, std::size_t>{3, 3, 2}, {4, 4, 3}})
    {
        const LinkBudget budget(100.0, L);
        for (std::uint64_t t = 0; t < 100; ++t, ++draws)
        {
            const ComplexMatrix h = sample_channel(n_r, n_t, options.seed, t).matrix;
            const SelectionOutcome outcome = select_qr_greedy(h, L);
            const ComplexMatrix hs = h.select_columns(outcome.selection_order);
            std::vector<std::size_t> reverse(L);
            for (std::size_t i = 0; i < L; ++i)
                reverse[i] = L - 1 - i;
            const StreamSnrReport snr = df_post_snr(hs, budget, reverse, Equalizer::zf);
            const QrFactors qr = qr_factorize(hs);
            for (std::size_t k = 0; k < L; ++k)
            {
                const double r = std::abs(qr.r.eigen()(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)));
                worst_relative = std::max(worst_relative, relative_difference(snr.snrs[k], budget.stream_snr() * r * r));
            }
            double best = 0.0;
            for (std::size_t j = 0; j < n_t; ++j)
                best = std::max(best, h.column(j).squaredNorm());
            max_norm_first = max_norm_first && h.column(outcome.selection_order[0]).squaredNorm() == best;
        }
    }
    const CommonOutage& common = common_outage(options);
    const double qr_slope = fitted_slope(common.curves[rule_slot(Rule::qr_greedy)]);
    result.passed = worst_relative <= 1e-9 && max_norm_first && in_range(qr_slope, 3.2, 4.8);
    result.summary = fmt("%zu draws: max relative DF-vs-R gap %.2e (limit 1e-9), max-norm first pick %s; "
                         "qr-greedy first-layer slope %.3f in [3.2, 4.8]",
                         draws, worst_relative, max_norm_first ? "always" : "NOT always", qr_slope);
    return result;
}

CriterionResult criterion_8(const VerifyOptions& options)
{
    CriterionResult result{8, "BER ordering at 20 dB", false, {}, {}, 0.0};
    mc::ExperimentConfig config;
    config.n_t = 3;
    config.n_r = 3;
    config.L = 2;
    config.receiver = Receiver::df_zf;
    config.feedback = Feedback::actual;
    config.ordering = Ordering::fixed;
    config.trial_count = budget_for(options.scale).ber_trials;
    config.frame_length = 10;
    config.chunk_size = 4096;
    config.master_seed = options.seed;
    config.workers = options.workers;
    config.grid = {20.0};
    config.rule = Rule::qr_greedy;
    const mc::CurvePoint qr = mc::estimate_ber(config).points.front();
    config.rule = Rule::first_fixed;
    const mc::CurvePoint ff = mc::estimate_ber(config).points.front();
    const double z = stats::two_proportion_z(qr.hits, qr.trials, ff.hits, ff.trials);
    result.passed = qr.trials >= 1'000'000 && ff.trials >= 1'000'000 && z > stats::kZ95OneSided;
    result.summary = fmt("qr-greedy %llu/%llu = %.3e vs first-fixed %llu/%llu = %.3e, z = %.2f (needs > %.3f)",
                         static_cast<unsigned long long>(qr.hits), static_cast<unsigned long long>(qr.trials),
                         qr.probability(), static_cast<unsigned long long>(ff.hits),
                         static_cast<unsigned long long>(ff.trials), ff.probability(), z, stats::kZ95OneSided);
    return result;
}

CriterionResult criterion_9(const VerifyOptions& options)
{
    CriterionResult result{9, "diversity-multiplexing tradeoff", false, {}, {}, 0.0};
    mc::ExperimentConfig config;
    config.n_t = 3;
    config.n_r = 3;
    config.L = 2;
    config.trial_count = budget_for(options.scale).dmt_trials;
    config.master_seed = options.seed;
    config.workers = options.workers;
    config.grid = mc::linspace(-10.0, 60.0, 57);
    const mc::DmtEstimate r1 = mc::estimate_dmt(config, 1.0);
    const mc::DmtEstimate r0 = mc::estimate_dmt(config, 0.0);
    const double c6 = fitted_slope(common_outage(options).curves[rule_slot(Rule::maxmin)]);
    result.passed = in_range(r1.diversity, 1.5, 2.5) && std::abs(r0.diversity - c6) <= 0.3;
    result.summary = fmt("d(1) = %.3f in [1.5, 2.5]; d(0) = %.3f vs maxmin outage slope %.3f (|diff| %.3f <= 0.3)",
                         r1.diversity, r0.diversity, c6, std::abs(r0.diversity - c6));
    try
    {
        mc::ExperimentConfig steep = config;
        steep.grid = mc::linspace(0.0, 200.0, 81);
        const mc::DmtEstimate r19 = mc::estimate_dmt(steep, 1.9);
        result.notes.push_back(fmt("d(1.9) = %.3f against the curve value %.3f", r19.diversity,
                                   analytic::dmt_curve(3, 3, 2, 1.9, analytic::DmtBound::exact_l2)));
    }
    catch (const FitError& e)
    {
        result.notes.push_back(std::string("d(1.9) not estimable: ") + e.what());
    }
    return result;
}

CriterionResult criterion_10(const VerifyOptions& options)
{
    CriterionResult result{10, "exponential-equivalence lemmas", true, {}, {}, 0.0};
    const std::uint64_t trials = budget_for(options.scale).lemma_trials;
    mc::LemmaParameters iii;
    iii.exponents = {1.0, 2.0};
    mc::LemmaParameters iv;
    iv.exponents = {1.0, 1.0};
    const mc::LemmaParameters v;
    std::string summary;
    for (auto [lemma, parameters] : {std::pair{mc::Lemma::iii, iii}, {mc::Lemma::iv, iv}, {mc::Lemma::v, v}})
    {
        const mc::LemmaReport report = mc::lemma_harness(lemma, parameters, trials, options.seed, options.workers);
        result.passed = result.passed && report.passed;
        summary += fmt("%s%s %s", summary.empty() ? "" : "; ", std::string(mc::lemma_name(lemma)).c_str(),
                       report.passed ? "pass" : "FAIL");
        result.notes.push_back(std::string(mc::lemma_name(lemma)) + ": " + report.detail +
                               fmt(" (tolerance %.2f)", report.tolerance));
    }
    result.summary = fmt("%g trials each: ", static_cast<double>(trials)) + summary;
    return result;
}

CriterionResult criterion_11(const VerifyOptions& options)
{
    CriterionResult result{11, "reproducibility", false, {}, {}, 0.0};
    mc::ExperimentConfig base;
    base.n_t = 4;
    base.n_r = 3;
    base.L = 2;
    base.master_seed = options.seed;
    base.trial_count = budget_for(options.scale).reproducibility_trials;

    struct Layout
    {
        std::size_t workers;
        std::size_t chunk;
    };
    const std::array<Layout, 3> layouts{{{1, 65536}, {3, 1000}, {2, 333}}};
    auto identical = [&](auto&& produce) {
        const std::string reference = produce(layouts[0]);
        for (std::size_t i = 1; i < layouts.size(); ++i)
            if (produce(layouts[i]) != reference)
                return false;
        return produce(layouts[0]) == reference;
    };

    const bool outage = identical([&](Layout layout) {
        mc::ExperimentConfig c = base;
        c.rule = Rule::random;
        c.workers = layout.workers;
        c.chunk_size = layout.chunk;
        c.grid = mc::logspace(1e-3, 10.0, 41);
        return cli::format_curve_csv(mc::estimate_outage(c), cli::CurveKind::outage);
    });
    const bool ber = identical([&](Layout layout) {
        mc::ExperimentConfig c = base;
        c.rule = Rule::qr_greedy;
        c.receiver = Receiver::df_mmse;
        c.trial_count = base.trial_count / 4;
        c.frame_length = 8;
        c.workers = layout.workers;
        c.chunk_size = layout.chunk;
        c.grid = mc::linspace(0.0, 20.0, 5);
        return cli::format_curve_csv(mc::estimate_ber(c), cli::CurveKind::ber);
    });
    const bool dmt = identical([&](Layout layout) {
        mc::ExperimentConfig c = base;
        c.workers = layout.workers;
        c.chunk_size = layout.chunk;
        c.grid = mc::linspace(-10.0, 40.0, 26);
        return cli::format_curve_csv(mc::estimate_dmt(c, 0.5).curve, cli::CurveKind::outage);
    });
    result.passed = outage && ber && dmt;
    result.summary = fmt("bit-identical CSV across reruns, worker counts {1,3,2} and chunk sizes {65536,1000,333}: "
                         "outage %s, ber %s, dmt %s",
                         outage ? "yes" : "NO", ber ? "yes" : "NO", dmt ? "yes" : "NO");
    return result;
}

// Wall-clock limits of the criteria that carry one.
double runtime_limit(int id)
{
    switch (id)
    {
    case 1:
        return 1.0;
    case 3:
        return 10.0;
    case 4:
        return 30.0;
    case 5:
        return 60.0;
    default:
        return 0.0;
    }
}

} // namespace

std::string_view scale_name(Scale scale) noexcept
{
    return scale == Scale::full ? "full" : "quick";
}

Scale parse_scale(std::string_view name)
{
    if (name == "quick")
        return Scale::quick;
    if (name == "full")
        return Scale::full;
    throw ArgumentError("unknown scale '" + std::string(name) + "' (expected quick or full)");
}

std::vector<IdentityCheck> analytic_selftest()
{
    std::vector<IdentityCheck> checks;
    auto add = [&](std::string name, bool passed, std::string detail) {
        checks.push_back({std::move(name), passed, std::move(detail)});
    };

    {
        bool ok = true;
        double margin = 1.0; // smallest 1 - b_M*M!
        for (std::size_t n_t = 2; n_t <= 12; ++n_t)
            for (std::size_t n_r = 2; n_r <= 12; ++n_r)
            {
                const analytic::ExpansionCoefficients c = analytic::outage_coefficient(n_t, n_r);
                ok = ok && c.leading > 0.0 && c.b_M < c.inverse_m_factorial;
                margin = std::min(margin, 1.0 - c.b_M / c.inverse_m_factorial);
            }
        add("leading coefficient positive, sum_k k!/(M+k+1)! < 1/(M*M!)", ok,
            fmt("2 <= n_t, n_r <= 12; min 1 - b_M*M! = %.3e", margin));
    }
    {
        double worst = 0.0;
        for (std::size_t n_t = 2; n_t <= 12; ++n_t)
            for (std::size_t n_r = 2; n_r <= 12; ++n_r)
            {
                const analytic::ExpansionCoefficients c = analytic::outage_coefficient(n_t, n_r);
                if (c.leading_difference > 1e-3 * c.inverse_m_factorial)
                    worst = std::max(worst, relative_difference(c.leading, c.leading_difference));
            }
        add("closed-form leading coefficient equals 1/M! - b_M", worst < 1e-9, fmt("max relative gap %.2e", worst));
    }
    {
        bool ok = true;
        std::string detail;
        for (std::size_t n_t = 2; n_t <= 6 && ok; ++n_t)
            for (std::size_t n_r = 2; n_r <= 5 && ok; ++n_r)
            {
                if ((n_t - 1) * (n_r - 1) > 20)
                    continue;
                const analytic::ExactRatio exact = analytic::exact_leading_coefficient(n_t, n_r);
                const double closed = analytic::outage_coefficient(n_t, n_r).leading;
                if (relative_difference(exact.value(), closed) > 1e-12)
                {
                    ok = false;
                    detail = fmt("mismatch at (%zu,%zu)", n_t, n_r);
                }
            }
        add("exact rational leading coefficient", ok, ok ? "n_t <= 6, n_r <= 5" : detail);
    }
    {
        bool ok = true;
        for (std::size_t n_t = 2; n_t <= 8; ++n_t)
            for (std::size_t n_r = 2; n_r <= 6; ++n_r)
            {
                const analytic::ExpansionCoefficients c = analytic::outage_coefficient(n_t, n_r);
                if (c.M > 20)
                    continue;
                const double tol = 1e-12;
                ok = ok && std::abs(c.a[0] - 1.0) <= tol;
                for (std::uint64_t n = 1; n < c.M; ++n)
                    ok = ok && std::abs(c.a[n]) <= tol;
                ok = ok && relative_difference(c.a[c.M], -c.inverse_m_factorial) <= 1e-9;
            }
        add("P1 coefficients a_0 = 1, a_n = 0 below M, a_M = -1/M!", ok, "n_t <= 8, n_r <= 6, M <= 20");
    }
    {
        const double partial = analytic::series_partial(4, 1000);
        const double rel = std::abs(partial * 480.0 - 1.0);
        add("series sum_k k!/(M+k+1)! for M = 4 reaches 1/480", rel <= 1e-9, fmt("relative gap %.2e", rel));
        double worst = 0.0;
        for (std::uint64_t m = 4; m <= 30; ++m)
            worst = std::max(worst, relative_difference(analytic::series_partial(m, 2000), analytic::series_limit(m)));
        add("series limit 1/(M (M+1)!) for 4 <= M <= 30", worst <= 1e-9, fmt("max relative gap %.2e", worst));
    }
    {
        bool ok = true;
        for (std::uint64_t m = 1; m <= 20; ++m)
            for (std::uint64_t k = 0; k <= m; ++k)
                ok = ok && analytic::binomial_identity_check(m, k);
        add("alternating binomial partial sums, M <= 20", ok, "exact integer arithmetic");
    }
    {
        double worst_recursion = 0.0, worst_quadrature = 0.0;
        for (double x : {0.1, 1.0, 5.0})
        {
            for (int k = -4; k <= 8; ++k)
            {
                const double ek = analytic::exp_integral(k, x);
                if (k < 8)
                {
                    const double lhs = k * analytic::exp_integral(k + 1, x);
                    const double rhs = std::exp(-x) - x * ek;
                    const double scale = std::abs(lhs) + std::exp(-x) + std::abs(x * ek);
                    worst_recursion = std::max(worst_recursion, std::abs(lhs - rhs) / scale);
                }
                boost::math::quadrature::exp_sinh<double> integrator;
                const double reference = integrator.integrate(
                    [&](double u) { return std::exp(-x * (1.0 + u) - k * std::log1p(u)); }, 1e-15);
                worst_quadrature = std::max(worst_quadrature, relative_difference(ek, reference));
            }
        }
        add("E_k recursion k E_{k+1} = e^-x - x E_k, k in [-4, 8]", worst_recursion < 1e-12,
            fmt("max scaled residual %.2e", worst_recursion));
        add("E_k agrees with direct quadrature, k in [-4, 8]", worst_quadrature < 1e-10,
            fmt("max relative gap %.2e", worst_quadrature));
    }
    {
        const double p = analytic::pr_outage_quadrature(1e-3, 3, 3);
        const double rel = std::abs(p / 1e-12 * 120.0 - 1.0);
        add("outage integral matches x^4/120 at x = 1e-3", rel < 1e-3, fmt("relative gap %.2e", rel));
    }
    return checks;
}

CriterionResult run_criterion(int id, const VerifyOptions& options)
{
    const auto start = std::chrono::steady_clock::now();
    CriterionResult result;
    switch (id)
    {
    case 1:
        result = criterion_1();
        break;
    case 2:
        result = criterion_2();
        break;
    case 3:
        result = criterion_3();
        break;
    case 4:
        result = criterion_4(options);
        break;
    case 5:
        result = criterion_5(options);
        break;
    case 6:
        result = criterion_6(options);
        break;
    case 7:
        result = criterion_7(options);
        break;
    case 8:
        result = criterion_8(options);
        break;
    case 9:
        result = criterion_9(options);
        break;
    case 10:
        result = criterion_10(options);
        break;
    case 11:
        result = criterion_11(options);
        break;
    default:
        throw ArgumentError("criterion ids run from 1 to " + std::to_string(kCriterionCount));
    }
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (const double limit = runtime_limit(id); limit > 0.0 && result.seconds >= limit)
    {
        result.passed = false;
        result.notes.push_back(fmt("runtime %.2f s exceeds the %.0f s limit", result.seconds, limit));
    }
    return result;
}

std::vector<CriterionResult> run_verify(const VerifyOptions& options, std::ostream& out)
{
    out << "antsel verify: scale " << scale_name(options.scale) << ", seed " << options.seed << "\n";
    std::vector<CriterionResult> results;
    for (int id = 1; id <= kCriterionCount; ++id)
    {
        if (!options.only.empty() && !options.only.contains(id))
            continue;
        CriterionResult r;
        try
        {
            r = run_criterion(id, options);
        }
        catch (const std::exception& e)
        {
            r = {id, "criterion " + std::to_string(id), false, std::string("error: ") + e.what(), {}, 0.0};
        }
        out << (r.passed ? "PASS" : "FAIL") << " C" << id << " " << r.title << ": " << r.summary;
        if (options.timings)
            out << fmt(" [%.2f s]", r.seconds);
        out << "\n";
        for (const std::string& note : r.notes)
            out << "    " << note << "\n";
        out.flush();
        results.push_back(std::move(r));
    }
    const auto passed = std::count_if(results.begin(), results.end(), [](const CriterionResult& r) { return r.passed; });
    out << passed << "/" << results.size() << " criteria passed\n";
    return results;
}

bool all_passed(const std::vector<CriterionResult>& results) noexcept
{
    return std::all_of(results.begin(), results.end(), [](const CriterionResult& r) { return r.passed; });
}

} // namespace antsel::verify
