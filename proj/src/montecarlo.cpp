// SPDX-License-Identifier: Apache-2.0
#include "antsel/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <numeric>
#include <string>
#include <thread>

#include "antsel/analytic.hpp"
#include "antsel/channel_geometry.hpp"
#include "antsel/errors.hpp"
#include "antsel/rng.hpp"
#include "antsel/stats.hpp"

namespace antsel::mc
{

namespace
{

/*
 * Runs fn(begin, end) on consecutive chunks of [0, trials) and returns the
 * per-chunk results in chunk order. Workers pull chunk indices from a shared
 * counter; each chunk result lands in its own slot.
 */
template <class Result, class Fn>
std::vector<Result> run_chunked(std::uint64_t trials, std::size_t chunk_size, std::size_t workers, Fn fn)
{
    const std::uint64_t chunks = (trials + chunk_size - 1) / chunk_size;
    std::vector<Result> results(chunks);
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto work = [&] {
        for (;;)
        {
            const std::uint64_t c = next.fetch_add(1);
            if (c >= chunks)
                return;
            const std::uint64_t begin = c * chunk_size;
            const std::uint64_t end = std::min<std::uint64_t>(trials, begin + chunk_size);
            try
            {
                results[c] = fn(begin, end);
            }
            catch (...)
            {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                next.store(chunks);
                return;
            }
        }
    };

    if (workers == 0)
        workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<std::size_t>(std::min<std::uint64_t>(workers, std::max<std::uint64_t>(chunks, 1)));
    if (workers <= 1)
        work();
    else
    {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back(work);
        for (auto& t : pool)
            t.join();
    }
    if (failure)
        std::rethrow_exception(failure);
    return results;
}

// bucket[i] counts scalars in (x_{i-1}, x_i]; bucket[n] counts scalars above every threshold.
inline void add_to_buckets(std::vector<std::uint64_t>& bucket, const std::vector<double>& ascending, double scalar)
{
    const auto it = std::lower_bound(ascending.begin(), ascending.end(), scalar);
    ++bucket[static_cast<std::size_t>(it - ascending.begin())];
}

// Cumulative hits at each ascending threshold.
std::vector<std::uint64_t> cumulative(const std::vector<std::uint64_t>& bucket, std::size_t n)
{
    std::vector<std::uint64_t> hits(n);
    std::uint64_t running = 0;
    for (std::size_t i = 0; i < n; ++i)
    {
        running += bucket[i];
        hits[i] = running;
    }
    return hits;
}

void check_grid(const std::vector<double>& grid, std::string_view what)
{
    if (grid.empty())
        throw ArgumentError(std::string(what) + " grid is empty");
    for (std::size_t i = 0; i < grid.size(); ++i)
    {
        if (!std::isfinite(grid[i]))
            throw ArgumentError(std::string(what) + " grid has a non-finite entry");
        if (i > 0 && !(grid[i] > grid[i - 1]))
            throw ArgumentError(std::string(what) + " grid must be strictly increasing");
    }
}

double db_to_linear(double db)
{
    return std::pow(10.0, db / 10.0);
}

using Buckets = std::vector<std::vector<std::uint64_t>>;

/*
 * Shared engine: scalar_fn(trial, out) writes one outage scalar per series for
 * the trial; each series is thresholded against the same ascending grid.
 */
template <class ScalarFn>
std::vector<EmpiricalCurve> threshold_curves(std::uint64_t trials, std::size_t chunk_size, std::size_t workers,
                                             const std::vector<double>& ascending, std::size_t series,
                                             ScalarFn scalar_fn)
{
    const std::size_t n = ascending.size();
    auto chunk = [&](std::uint64_t begin, std::uint64_t end) {
        Buckets buckets(series, std::vector<std::uint64_t>(n + 1, 0));
        std::vector<double> scalars(series);
        for (std::uint64_t t = begin; t < end; ++t)
        {
            scalar_fn(t, scalars);
            for (std::size_t s = 0; s < series; ++s)
                add_to_buckets(buckets[s], ascending, scalars[s]);
        }
        return buckets;
    };
    const std::vector<Buckets> parts = run_chunked<Buckets>(trials, chunk_size, workers, chunk);

    Buckets total(series, std::vector<std::uint64_t>(n + 1, 0));
    for (const Buckets& part : parts)
        for (std::size_t s = 0; s < series; ++s)
            for (std::size_t i = 0; i <= n; ++i)
                total[s][i] += part[s][i];

    std::vector<EmpiricalCurve> curves(series);
    for (std::size_t s = 0; s < series; ++s)
    {
        const std::vector<std::uint64_t> hits = cumulative(total[s], n);
        curves[s].points.reserve(n);
        for (std::size_t i = 0; i < n; ++i)
            curves[s].points.push_back({ascending[i], hits[i], trials});
    }
    return curves;
}

SlopeFit fit_weighted(const std::vector<double>& xs, const std::vector<double>& ys, const std::vector<double>& weights,
                      const std::vector<double>& probabilities, const std::vector<std::uint64_t>& trials)
{
    const std::size_t m = xs.size();
    double sw = 0.0, sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < m; ++i)
    {
        sw += weights[i];
        sx += weights[i] * xs[i];
        sy += weights[i] * ys[i];
    }
    const double mx = sx / sw;
    const double my = sy / sw;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i)
    {
        sxx += weights[i] * (xs[i] - mx) * (xs[i] - mx);
        sxy += weights[i] * (xs[i] - mx) * (ys[i] - my);
    }
    if (!(sxx > 0.0))
        throw FitError("fit abscissae are all equal");
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;

    // slope = sum_i c_i y_i; Cov(log p_i, log p_j) = (1 - p) / (n p) at the larger of p_i, p_j
    double variance = 0.0;
    for (std::size_t i = 0; i < m; ++i)
    {
        const double ci = weights[i] * (xs[i] - mx) / sxx;
        for (std::size_t j = 0; j < m; ++j)
        {
            const double cj = weights[j] * (xs[j] - mx) / sxx;
            const std::size_t big = probabilities[i] >= probabilities[j] ? i : j;
            const double p = probabilities[big];
            variance += ci * cj * (1.0 - p) / (static_cast<double>(trials[big]) * p);
        }
    }
    return {slope, intercept, std::sqrt(std::max(0.0, variance)), 0.0, 0.0, m};
}

} // namespace

double CurvePoint::probability() const noexcept
{
    return trials == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(trials);
}

double CurvePoint::standard_error() const noexcept
{
    return trials == 0 ? 0.0 : stats::binomial_stderr(probability(), trials);
}

void EmpiricalCurve::validate() const
{
    for (const CurvePoint& p : points)
    {
        if (p.trials == 0)
            throw ArgumentError("curve point without trials");
        if (p.hits > p.trials)
            throw ArgumentError("curve point with more hits than trials");
    }
}

std::vector<double> logspace(double lo, double hi, std::size_t n)
{
    if (!(lo > 0.0) || !(hi > lo) || n < 2)
        throw ArgumentError("logspace needs 0 < lo < hi and at least two points");
    std::vector<double> out(n);
    const double a = std::log(lo);
    const double b = std::log(hi);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

std::vector<double> linspace(double lo, double hi, std::size_t n)
{
    if (!(hi > lo) || n < 2)
        throw ArgumentError("linspace needs lo < hi and at least two points");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    out.back() = hi;
    return out;
}

SlopeFit fit_slope(const EmpiricalCurve& curve, const FitOptions& options)
{
    curve.validate();
    std::vector<double> xs, ys, weights, probabilities;
    std::vector<std::uint64_t> trials;
    double x_lo = 0.0, x_hi = 0.0;
    for (const CurvePoint& point : curve.points)
    {
        const double p = point.probability();
        const double p_lo =
            std::max(options.p_floor, static_cast<double>(options.min_hits) / static_cast<double>(point.trials));
        if (point.hits < options.min_hits || point.hits == 0 || p < p_lo || p > options.p_max)
            continue;
        if (!(point.abscissa > 0.0))
            throw FitError("log-log fit needs positive abscissae");
        if (xs.empty())
            x_lo = point.abscissa;
        x_lo = std::min(x_lo, point.abscissa);
        x_hi = std::max(x_hi, point.abscissa);
        xs.push_back(std::log(point.abscissa));
        ys.push_back(std::log(p));
        probabilities.push_back(p);
        trials.push_back(point.trials);
        weights.push_back(options.weighting == Weighting::binomial
                              ? static_cast<double>(point.trials) * p / (1.0 - p)
                              : 1.0);
    }
    if (xs.size() < 3)
        throw FitError("only " + std::to_string(xs.size()) + " points have hits >= " +
                       std::to_string(options.min_hits) + " and probability in [max(" +
                       std::to_string(options.p_floor) + ", min_hits/trials), " + std::to_string(options.p_max) +
                       "]; at least 3 are required");
    SlopeFit fit = fit_weighted(xs, ys, weights, probabilities, trials);
    fit.x_lo = x_lo;
    fit.x_hi = x_hi;
    return fit;
}

SlopeFit fit_slope(const EmpiricalCurve& curve, std::uint64_t min_hits)
{
    FitOptions options;
    options.min_hits = min_hits;
    return fit_slope(curve, options);
}

SlopeFit fit_power_law(std::span<const double> x, std::span<const double> p)
{
    if (x.size() != p.size())
        throw FitError("abscissa and probability lists differ in length");
    if (x.size() < 3)
        throw FitError("at least 3 points are required, got " + std::to_string(x.size()));
    const std::size_t m = x.size();
    std::vector<double> lx(m), ly(m);
    for (std::size_t i = 0; i < m; ++i)
    {
        if (!(x[i] > 0.0) || !(p[i] > 0.0))
            throw FitError("log-log fit needs positive abscissae and probabilities");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(p[i]);
    }
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(m);
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(m);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i)
    {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (!(sxx > 0.0))
        throw FitError("fit abscissae are all equal");
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < m; ++i)
    {
        const double r = ly[i] - intercept - slope * lx[i];
        rss += r * r;
    }
    const double standard_error = m > 2 ? std::sqrt(rss / static_cast<double>(m - 2) / sxx) : 0.0;
    return {slope, intercept, standard_error, *std::min_element(x.begin(), x.end()), *std::max_element(x.begin(), x.end()), m};
}

bool rule_supports_receiver(Rule rule, Receiver receiver) noexcept
{
    switch (rule)
    {
    case Rule::maxmin:
    case Rule::random:
        return true;
    case Rule::first_fixed:
    case Rule::first_ordered:
    case Rule::qr_greedy:
        return is_decision_feedback(receiver);
    }
    return false;
}

Receiver default_receiver(Rule rule) noexcept
{
    return rule_supports_receiver(rule, Receiver::zf) ? Receiver::zf : Receiver::df_zf;
}

void ExperimentConfig::validate() const
{
    if (n_t == 0 || n_r == 0 || L == 0)
        throw DimensionError("antenna counts and stream count must be positive");
    if (n_t < L || n_r < L)
        throw DimensionError("need n_t >= L and n_r >= L, got (" + std::to_string(n_t) + ", " +
                             std::to_string(n_r) + ", " + std::to_string(L) + ")");
    if ((rule == Rule::first_fixed || rule == Rule::first_ordered) && L != 2)
        throw ArgumentError("rule '" + std::string(rule_name(rule)) + "' is defined for L = 2 only");
    if (!rule_supports_receiver(rule, receiver))
        throw ArgumentError("rule '" + std::string(rule_name(rule)) + "' requires a decision-feedback receiver, got '" +
                            std::string(receiver_name(receiver)) + "'");
    if (trial_count == 0)
        throw ArgumentError("trial count must be at least 1");
    if (chunk_size == 0)
        throw ArgumentError("chunk size must be at least 1");
    if (frame_length == 0)
        throw ArgumentError("frame length must be at least 1");
    check_grid(grid, "abscissa");
}

std::vector<EmpiricalCurve> estimate_outage_rules(const ExperimentConfig& config, std::span<const Rule> rules)
{
    if (rules.empty())
        throw ArgumentError("at least one rule is required");
    for (Rule rule : rules)
    {
        ExperimentConfig check = config;
        check.rule = rule;
        check.receiver = rule_supports_receiver(rule, config.receiver) ? config.receiver : default_receiver(rule);
        check.validate();
    }
    const std::vector<Rule> list(rules.begin(), rules.end());
    auto scalar_fn = [&](std::uint64_t t, std::vector<double>& out) {
        const ChannelSample sample = sample_channel(config.n_r, config.n_t, config.master_seed, t);
        for (std::size_t s = 0; s < list.size(); ++s)
        {
            rng::CounterRng gen(config.master_seed, t, rng::Stream::selection);
            out[s] = outage_scalar(select(list[s], sample.matrix, config.L, gen));
        }
    };
    return threshold_curves(config.trial_count, config.chunk_size, config.workers, config.grid, list.size(), scalar_fn);
}

EmpiricalCurve estimate_outage(const ExperimentConfig& config)
{
    config.validate();
    const Rule rules[] = {config.rule};
    return estimate_outage_rules(config, rules).front();
}

EmpiricalCurve estimate_ber(const ExperimentConfig& config)
{
    config.validate();
    const std::size_t points = config.grid.size();
    const std::uint64_t bits_per_trial =
        static_cast<std::uint64_t>(config.L) * config.frame_length * qpsk::kBitsPerSymbol;

    auto chunk = [&](std::uint64_t begin, std::uint64_t end) {
        std::vector<std::uint64_t> errors(points, 0);
        for (std::uint64_t t = begin; t < end; ++t)
        {
            const ChannelSample sample = sample_channel(config.n_r, config.n_t, config.master_seed, t);
            rng::CounterRng selection_gen(config.master_seed, t, rng::Stream::selection);
            const SelectionOutcome outcome = select(config.rule, sample.matrix, config.L, selection_gen);
            const ComplexMatrix hs = sample.matrix.select_columns(outcome.subset.indices());

            std::vector<std::size_t> order;
            if (is_decision_feedback(config.receiver))
            {
                switch (config.ordering)
                {
                case Ordering::fixed:
                    order = outcome.decode_order;
                    break;
                case Ordering::vblast:
                    order = vblast_order(hs, LinkBudget(1.0, config.L));
                    break;
                case Ordering::qr_reverse:
                    order = select_qr_greedy(hs, config.L).decode_order;
                    break;
                }
            }

            for (std::size_t i = 0; i < points; ++i)
            {
                const LinkBudget budget(db_to_linear(config.grid[i]), config.L);
                rng::CounterRng symbols(config.master_seed, t, rng::Stream::symbols);
                rng::CounterRng noise(config.master_seed, t, rng::Stream::noise);
                const SymbolFrame frame = transmit_frame(hs, budget, config.frame_length, symbols, noise);
                ComplexMatrix detected = [&] {
                    if (!is_decision_feedback(config.receiver))
                        return detect_linear(hs, frame.received, budget, front_end(config.receiver));
                    DfOptions options;
                    options.decode_order = order;
                    options.feedback = config.feedback;
                    options.front_end = front_end(config.receiver);
                    options.transmitted = &frame.transmitted;
                    return detect_df(hs, frame.received, budget, options);
                }();
                errors[i] += count_bit_errors(frame.transmitted, detected);
            }
        }
        return errors;
    };
    const auto parts =
        run_chunked<std::vector<std::uint64_t>>(config.trial_count, config.chunk_size, config.workers, chunk);

    EmpiricalCurve curve;
    curve.points.reserve(points);
    for (std::size_t i = 0; i < points; ++i)
    {
        std::uint64_t total = 0;
        for (const auto& part : parts)
            total += part[i];
        curve.points.push_back({config.grid[i], total, config.trial_count * bits_per_trial});
    }
    return curve;
}

DmtEstimate estimate_dmt(const ExperimentConfig& config, double r, const FitOptions& options)
{
    config.validate();
    const double L = static_cast<double>(config.L);
    if (!(r >= 0.0) || !(r < L))
        throw ArgumentError("multiplexing gain must lie in [0, L)");
    // thresholds decrease with rho0; evaluate them in ascending order
    const std::size_t n = config.grid.size();
    std::vector<double> rho(n), ascending(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        rho[i] = db_to_linear(config.grid[i]);
        ascending[n - 1 - i] = L * std::pow(rho[i], -(1.0 - r / L));
    }
    for (std::size_t i = 1; i < n; ++i)
        if (!(ascending[i] > ascending[i - 1]))
            throw ArgumentError("SNR grid is too fine for distinct outage thresholds at this multiplexing gain");

    auto scalar_fn = [&](std::uint64_t t, std::vector<double>& out) {
        const ChannelSample sample = sample_channel(config.n_r, config.n_t, config.master_seed, t);
        rng::CounterRng gen(config.master_seed, t, rng::Stream::selection);
        out[0] = outage_scalar(select(config.rule, sample.matrix, config.L, gen));
    };
    const EmpiricalCurve by_threshold =
        threshold_curves(config.trial_count, config.chunk_size, config.workers, ascending, 1, scalar_fn).front();

    DmtEstimate estimate{r, 0.0, {}, {}};
    estimate.curve.points.resize(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        const CurvePoint& src = by_threshold.points[n - 1 - i];
        estimate.curve.points[i] = {rho[i], src.hits, src.trials};
    }
    estimate.fit = fit_slope(estimate.curve, options);
    estimate.diversity = -estimate.fit.slope;
    return estimate;
}

std::string_view lemma_name(Lemma lemma) noexcept
{
    switch (lemma)
    {
    case Lemma::iii:
        return "III";
    case Lemma::iv:
        return "IV";
    case Lemma::v:
        return "V";
    }
    return "unknown";
}

Lemma parse_lemma(std::string_view name)
{
    for (Lemma l : {Lemma::iii, Lemma::iv, Lemma::v})
        if (lemma_name(l) == name)
            return l;
    throw ArgumentError("unknown lemma '" + std::string(name) + "'");
}

LemmaReport lemma_harness(Lemma lemma, const LemmaParameters& parameters, std::uint64_t trials, std::uint64_t seed,
                          std::size_t workers)
{
    if (trials == 0)
        throw ArgumentError("trial count must be at least 1");
    const std::vector<double>& n = parameters.exponents;
    if (lemma != Lemma::v)
    {
        if (n.empty())
            throw ArgumentError("at least one exponent is required");
        for (double e : n)
            if (!(e > 0.0) || !std::isfinite(e))
                throw ArgumentError("exponents must be positive and finite");
    }
    else
    {
        if (parameters.gamma_shape == 0)
            throw ArgumentError("gamma shape must be positive");
        if (!(parameters.b_exponent > 0.0) || !std::isfinite(parameters.b_exponent))
            throw ArgumentError("b exponent must be positive and finite");
    }

    const std::vector<double> grid = logspace(1e-8, 3.0, 89);
    constexpr std::size_t kChunk = 65536;
    const double exponent_sum = std::accumulate(n.begin(), n.end(), 0.0);
    const double scale = std::numbers::pi / 2 / static_cast<double>(n.size());

    LemmaReport report{lemma, {}, 0.0, 0.0, false, {}};
    std::vector<EmpiricalCurve> curves;
    std::vector<std::string> labels;
    switch (lemma)
    {
    case Lemma::iii: {
        auto fn = [&](std::uint64_t t, std::vector<double>& out) {
            rng::CounterRng gen(seed, t, rng::Stream::synthetic);
            double sum = 0.0;
            for (double e : n)
                sum += std::pow(gen.uniform(), 1.0 / e);
            out[0] = sum;
        };
        curves = threshold_curves(trials, kChunk, workers, grid, 1, fn);
        labels = {"sum"};
        report.expected = exponent_sum;
        report.tolerance = 0.15;
        break;
    }
    case Lemma::iv: {
        // angles scaled so that their sum stays inside (0, pi/2), where sin^2 is increasing
        auto fn = [&](std::uint64_t t, std::vector<double>& out) {
            rng::CounterRng gen(seed, t, rng::Stream::synthetic);
            double sum = 0.0, largest = 0.0;
            for (double e : n)
            {
                const double theta = scale * std::pow(gen.uniform(), 1.0 / e);
                sum += theta;
                largest = std::max(largest, theta);
            }
            const double s = std::sin(sum);
            const double m = std::sin(largest);
            out[0] = s * s;
            out[1] = m * m;
        };
        curves = threshold_curves(trials, kChunk, workers, grid, 2, fn);
        labels = {"sin^2(sum)", "sin^2(max)"};
        report.expected = 0.5 * exponent_sum;
        report.tolerance = 0.1;
        break;
    }
    case Lemma::v: {
        const double inv_b = 1.0 / parameters.b_exponent;
        auto fn = [&](std::uint64_t t, std::vector<double>& out) {
            rng::CounterRng gen(seed, t, rng::Stream::synthetic);
            double product = 1.0;
            for (unsigned k = 0; k < parameters.gamma_shape; ++k)
                product *= gen.uniform();
            const double a = -std::log(product);
            const double b1 = std::pow(gen.uniform(), inv_b);
            const double b2 = std::pow(std::min(gen.uniform(), gen.uniform()), inv_b);
            out[0] = a * b1;
            out[1] = a * b2;
        };
        curves = threshold_curves(trials, kChunk, workers, grid, 2, fn);
        labels = {"a*b1", "a*b2"};
        report.expected = static_cast<double>(parameters.gamma_shape);
        report.tolerance = 0.1;
        break;
    }
    }

    for (std::size_t i = 0; i < curves.size(); ++i)
        report.fits.push_back({labels[i], fit_slope(curves[i])});

    switch (lemma)
    {
    case Lemma::iii: {
        const double s = report.fits[0].fit.slope;
        report.passed = std::abs(s - report.expected) <= report.tolerance;
        report.detail = "slope " + std::to_string(s) + " vs " + std::to_string(report.expected);
        break;
    }
    case Lemma::iv: {
        const double s_sum = report.fits[0].fit.slope;
        const double s_max = report.fits[1].fit.slope;
        report.passed = std::abs(s_sum - report.expected) <= report.tolerance &&
                        std::abs(s_max - report.expected) <= report.tolerance;
        report.detail = "sum slope " + std::to_string(s_sum) + ", max slope " + std::to_string(s_max) + " vs " +
                        std::to_string(report.expected);
        break;
    }
    case Lemma::v: {
        const double s1 = report.fits[0].fit.slope;
        const double s2 = report.fits[1].fit.slope;
        report.passed = std::abs(s1 - s2) <= report.tolerance && s1 <= report.expected && s2 <= report.expected;
        report.detail = "slopes " + std::to_string(s1) + " and " + std::to_string(s2) + ", limit n_a = " +
                        std::to_string(report.expected);
        break;
    }
    }
    return report;
}

bool StatReport::passed() const noexcept
{
    return std::all_of(checks.begin(), checks.end(), [](const StatCheck& c) { return !c.gating || c.passed; });
}

StatReport marginal_checks(std::size_t n_t, std::size_t n_r, std::uint64_t samples, std::uint64_t seed,
                           double significance)
{
    if (n_t < 2 || n_r < 2)
        throw DimensionError("marginal checks need n_t >= 2 and n_r >= 2");
    if (samples == 0)
        throw ArgumentError("sample count must be at least 1");
    std::vector<double> heights(samples), angles(samples);
    for (std::uint64_t t = 0; t < samples; ++t)
    {
        const ChannelSample sample = sample_channel(n_r, n_t, seed, t);
        const double h = line_projection_height_sq(sample.matrix, 0, 1);
        heights[t] = h;
        angles[t] = projection_angle(h, sample.matrix.eigen().col(0).squaredNorm());
    }
    const std::string dims = "(" + std::to_string(n_t) + "," + std::to_string(n_r) + ")";
    const stats::KsResult ks_height =
        stats::ks_test(std::move(heights), [n_r](double x) { return analytic::chi2n_cdf(std::max(0.0, x), n_r - 1); });
    const stats::KsResult ks_angle = stats::ks_test(std::move(angles), [n_r](double th) {
        return analytic::theta_cdf(std::clamp(th, 0.0, std::numbers::pi / 2), n_r);
    });
    StatReport report;
    report.checks.push_back({"KS p-value R_01 vs Gamma(n_r-1) " + dims, ks_height.p_value, significance,
                             ks_height.p_value > significance});
    report.checks.push_back({"KS p-value theta_01 vs angle law " + dims, ks_angle.p_value, significance,
                             ks_angle.p_value > significance});
    return report;
}

StatReport independence_suite(std::size_t n_t, std::size_t n_r, std::uint64_t trials, std::uint64_t seed,
                              double correlation_bound, double sigma_bound)
{
    if (n_t < 3 || n_r < 2)
        throw DimensionError("independence suite needs n_t >= 3 and n_r >= 2");
    if (trials < 2)
        throw ArgumentError("independence suite needs at least two trials");
    const std::size_t links = n_t - 1;
    // chain[k] = R_{k,k+1}; angle[j-1] = theta_{0j}
    std::vector<std::vector<double>> chain(links, std::vector<double>(trials));
    std::vector<std::vector<double>> angle(links, std::vector<double>(trials));
    std::vector<double> norm0(trials), shared(trials);
    for (std::uint64_t t = 0; t < trials; ++t)
    {
        const ChannelSample sample = sample_channel(n_r, n_t, seed, t);
        const PairwiseHeights table(sample.matrix);
        for (std::size_t k = 0; k < links; ++k)
        {
            chain[k][t] = table(k, k + 1);
            angle[k][t] = projection_angle(table(0, k + 1), table.norm_sq(0));
        }
        norm0[t] = table.norm_sq(0);
        shared[t] = table(0, 2);
    }

    StatReport report;
    const double probes[] = {0.5, 1.0};
    const double n = static_cast<double>(trials);
    auto product_cdf_checks = [&](const std::vector<double>& a, const std::vector<double>& b, const std::string& label) {
        for (double x1 : probes)
            for (double x2 : probes)
            {
                std::uint64_t joint = 0, ca = 0, cb = 0;
                for (std::uint64_t t = 0; t < trials; ++t)
                {
                    const bool ia = a[t] <= x1;
                    const bool ib = b[t] <= x2;
                    ca += ia;
                    cb += ib;
                    joint += ia && ib;
                }
                const double product = (static_cast<double>(ca) / n) * (static_cast<double>(cb) / n);
                const double sigma = stats::binomial_stderr(product, trials);
                const double z = sigma > 0.0 ? std::abs(static_cast<double>(joint) / n - product) / sigma : 0.0;
                report.checks.push_back({"product CDF " + label + " at (" + std::to_string(x1).substr(0, 3) + "," +
                                             std::to_string(x2).substr(0, 3) + ") [sigmas]",
                                         z, sigma_bound, z <= sigma_bound});
            }
    };
    auto correlation_check = [&](const std::vector<double>& a, const std::vector<double>& b, const std::string& label) {
        const double rho = stats::pearson(a, b);
        report.checks.push_back({"|Pearson| " + label, std::abs(rho), correlation_bound, std::abs(rho) < correlation_bound});
    };

    for (std::size_t i = 0; i < links; ++i)
        for (std::size_t j = i + 1; j < links; ++j)
        {
            const std::string label = "R_" + std::to_string(i) + std::to_string(i + 1) + ", R_" +
                                      std::to_string(j) + std::to_string(j + 1);
            correlation_check(chain[i], chain[j], label);
            product_cdf_checks(chain[i], chain[j], label);
        }
    for (std::size_t i = 0; i < links; ++i)
        for (std::size_t j = i + 1; j < links; ++j)
        {
            const std::string label = "theta_0" + std::to_string(i + 1) + ", theta_0" + std::to_string(j + 1);
            correlation_check(angle[i], angle[j], label);
            product_cdf_checks(angle[i], angle[j], label);
        }
    correlation_check(norm0, angle[0], "||h_0||^2, theta_01");

    // R_01 and R_02 share ||h_0||^2 and must show clear dependence
    constexpr double kNegativeControl = 0.05;
    const double rho_shared = stats::pearson(chain[0], shared);
    report.checks.push_back({"negative control |Pearson| R_01, R_02 (must exceed)", std::abs(rho_shared),
                             kNegativeControl, std::abs(rho_shared) > kNegativeControl});
    return report;
}

} // namespace antsel::mc
