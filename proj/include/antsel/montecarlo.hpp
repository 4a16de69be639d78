// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "antsel/receivers.hpp"
#include "antsel/selection.hpp"

namespace antsel::mc
{

struct CurvePoint
{
    double abscissa;
    std::uint64_t hits;
    std::uint64_t trials;

    double probability() const noexcept;
    double standard_error() const noexcept; // binomial
};

struct EmpiricalCurve
{
    std::vector<CurvePoint> points;

    // Throws ArgumentError when hits exceed trials or a point has no trials.
    void validate() const;
};

enum class Weighting
{
    unweighted, // ordinary least squares on (log x, log p)
    binomial,   // inverse delta-method variance n p / (1 - p)
};

struct FitOptions
{
    std::uint64_t min_hits = 10;
    double p_max = 0.2;
    double p_floor = 1e-6; // lower probability limit is max(p_floor, min_hits / trials)
    Weighting weighting = Weighting::unweighted;
};

struct SlopeFit
{
    double slope;
    double intercept; // natural-log intercept
    double standard_error;
    double x_lo;
    double x_hi;
    std::size_t points_used;
};

/*
 * Least-squares line through (log abscissa, log p) over the points with
 * hits >= min_hits and p in [max(p_floor, min_hits / trials), p_max]. The
 * standard error accounts for the positive correlation of nested outage
 * events evaluated on common trials.
 */
SlopeFit fit_slope(const EmpiricalCurve& curve, const FitOptions& options = {});
SlopeFit fit_slope(const EmpiricalCurve& curve, std::uint64_t min_hits);

// Ordinary least squares through a noise-free tabulated curve; stderr from residuals.
SlopeFit fit_power_law(std::span<const double> x, std::span<const double> p);

// Rules built around decision feedback need a DF receiver; maxmin and random work with any receiver.
bool rule_supports_receiver(Rule rule, Receiver receiver) noexcept;
Receiver default_receiver(Rule rule) noexcept;

struct ExperimentConfig
{
    std::size_t n_t = 3;
    std::size_t n_r = 3;
    std::size_t L = 2;
    Rule rule = Rule::maxmin;
    Receiver receiver = Receiver::zf;
    std::uint64_t trial_count = 1;
    std::uint64_t master_seed = 0;
    std::size_t chunk_size = 65536;
    std::size_t workers = 1; // 0 selects the hardware concurrency
    // Outage thresholds x, SNR points in dB, or per-experiment abscissae; strictly increasing.
    std::vector<double> grid;
    // BER only.
    Feedback feedback = Feedback::actual;
    Ordering ordering = Ordering::fixed;
    std::size_t frame_length = 100;

    void validate() const;
};

/*
 * Trial t draws channel (master_seed, t), runs the rule and compares its
 * outage scalar with every threshold. Counts are independent of the chunk
 * size and the worker count.
 */
EmpiricalCurve estimate_outage(const ExperimentConfig& config);
// Several rules evaluated on the same channel draws; curves in the order of rules.
std::vector<EmpiricalCurve> estimate_outage_rules(const ExperimentConfig& config, std::span<const Rule> rules);

/*
 * Bit error rate with QPSK frames. Symbols and noise of trial t are replayed at
 * every SNR point. Ordering "fixed" uses the decode order reported by the rule,
 * "vblast" the V-BLAST order and "qr-reverse" the reverse greedy-QR order of
 * the selected columns.
 */
EmpiricalCurve estimate_ber(const ExperimentConfig& config);

struct DmtEstimate
{
    double r;
    double diversity; // minus the fitted slope against log rho0
    SlopeFit fit;
    EmpiricalCurve curve; // abscissa rho0 (linear)
};

// Pr[outage scalar <= L rho0^{-(1 - r/L)}] over the config grid of rho0 values in dB.
DmtEstimate estimate_dmt(const ExperimentConfig& config, double r, const FitOptions& options = {});

enum class Lemma
{
    iii,
    iv,
    v,
};
std::string_view lemma_name(Lemma lemma) noexcept; // "III", "IV", "V"
Lemma parse_lemma(std::string_view name);

struct LemmaParameters
{
    std::vector<double> exponents{1.0, 2.0}; // n_k of each summand (III, IV)
    unsigned gamma_shape = 2;                 // a ~ Gamma(shape, 1) (V)
    double b_exponent = 1.0;                  // CDF exponent of b1 and b2 (V)
};

struct LabeledFit
{
    std::string label;
    SlopeFit fit;
};

struct LemmaReport
{
    Lemma lemma;
    std::vector<LabeledFit> fits;
    double expected;  // target slope (III, IV) or upper limit n_a (V)
    double tolerance;
    bool passed;
    std::string detail;
};

/*
 * Synthetic checks of the exponential-equivalence lemmas. Variables with CDF
 * x^n on (0, 1) are drawn as U^{1/n}.
 */
LemmaReport lemma_harness(Lemma lemma, const LemmaParameters& parameters, std::uint64_t trials,
                          std::uint64_t seed, std::size_t workers = 1);

struct StatCheck
{
    std::string name;
    double statistic;
    double threshold;
    bool passed;
    bool gating = true;
};

struct StatReport
{
    std::vector<StatCheck> checks;
    bool passed() const noexcept; // all gating checks
};

// KS tests of R_01 against the Gamma(n_r - 1) CDF and of theta_01 against the angle law.
StatReport marginal_checks(std::size_t n_t, std::size_t n_r, std::uint64_t samples, std::uint64_t seed,
                           double significance = 0.01);

/*
 * Chain heights R_{k,k+1}, angles theta_{0j} and the norm/angle pair: Pearson
 * bounds, product-CDF probes at {0.5, 1.0}^2 and a shared-norm negative control.
 */
StatReport independence_suite(std::size_t n_t, std::size_t n_r, std::uint64_t trials, std::uint64_t seed,
                              double correlation_bound = 0.01, double sigma_bound = 3.0);

std::vector<double> logspace(double lo, double hi, std::size_t n);
std::vector<double> linspace(double lo, double hi, std::size_t n);

} // namespace antsel::mc
