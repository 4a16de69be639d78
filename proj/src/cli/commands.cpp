// SPDX-License-Identifier: Apache-2.0
#include <chrono>
#include <ctime>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "antsel/analytic.hpp"
#include "antsel/cli.hpp"
#include "antsel/errors.hpp"
#include "antsel/verify.hpp"

namespace antsel::cli
{

namespace
{

using nlohmann::json;

// Invalid user input detected after flag parsing; maps to the usage exit code.
class UsageFailure : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

template <class F>
auto validated(F&& f)
{
    try
    {
        return f();
    }
    catch (const ArgumentError& e)
    {
        throw UsageFailure(e.what());
    }
    catch (const DimensionError& e)
    {
        throw UsageFailure(e.what());
    }
}

std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buffer[32];
    std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buffer;
}

json fit_json(const mc::SlopeFit& fit)
{
    return {{"slope", fit.slope},   {"intercept", fit.intercept}, {"stderr", fit.standard_error},
            {"x_lo", fit.x_lo},     {"x_hi", fit.x_hi},           {"points_used", fit.points_used}};
}

json fit_options_json(const mc::FitOptions& options)
{
    return {{"min_hits", options.min_hits},
            {"p_max", options.p_max},
            {"p_floor", options.p_floor},
            {"weighting", options.weighting == mc::Weighting::binomial ? "binomial" : "unweighted"}};
}

json try_fit(const mc::EmpiricalCurve& curve, const mc::FitOptions& options)
{
    try
    {
        return fit_json(mc::fit_slope(curve, options));
    }
    catch (const FitError& e)
    {
        return {{"error", e.what()}};
    }
}

void emit(const json& report, const std::string& out_path, std::ostream& out)
{
    const std::string text = report.dump(2) + "\n";
    if (out_path.empty())
        out << text;
    else
        write_text_file(out_path, text);
}

struct CommonArgs
{
    std::size_t n_t = 3;
    std::size_t n_r = 3;
    std::size_t L = 2;
    std::string rule = "maxmin";
    std::string receiver;
    std::uint64_t trials = 100000;
    std::optional<std::uint64_t> seed;
    std::size_t workers = 1;
    std::size_t chunk_size = 65536;
    std::string out;
};

void add_common(CLI::App* cmd, CommonArgs& args)
{
    cmd->add_option("--nt", args.n_t, "transmit antennas N_T")->capture_default_str();
    cmd->add_option("--nr", args.n_r, "receive antennas N_R")->capture_default_str();
    cmd->add_option("--L", args.L, "selected antennas (streams)")->capture_default_str();
    cmd->add_option("--rule", args.rule, "maxmin | first-fixed | first-ordered | qr-greedy | random")
        ->capture_default_str();
    cmd->add_option("--receiver", args.receiver,
                    "zf | mmse | df-zf | df-mmse (default: zf, or df-zf for first-fixed, first-ordered, qr-greedy)");
    cmd->add_option("--trials", args.trials, "number of channel draws")->capture_default_str();
    cmd->add_option("--seed", args.seed, "master seed (fallback: ANTSEL_SEED, then 0)");
    cmd->add_option("--workers", args.workers, "worker threads (0: hardware concurrency)")->capture_default_str();
    cmd->add_option("--chunk-size", args.chunk_size, "trials per work chunk")->capture_default_str();
    cmd->add_option("--out", args.out, "output CSV path; the manifest is written next to it")->required();
}

mc::ExperimentConfig base_config(const CommonArgs& args, const ResolvedSeed& seed)
{
    mc::ExperimentConfig config;
    config.n_t = args.n_t;
    config.n_r = args.n_r;
    config.L = args.L;
    config.rule = parse_rule(args.rule);
    config.receiver = args.receiver.empty() ? mc::default_receiver(config.rule) : parse_receiver(args.receiver);
    config.trial_count = args.trials;
    config.master_seed = seed.value;
    config.workers = args.workers;
    config.chunk_size = args.chunk_size;
    return config;
}

json config_json(const mc::ExperimentConfig& config)
{
    return {{"n_t", config.n_t},
            {"n_r", config.n_r},
            {"L", config.L},
            {"rule", rule_name(config.rule)},
            {"receiver", receiver_name(config.receiver)},
            {"trials", config.trial_count},
            {"master_seed", config.master_seed},
            {"chunk_size", config.chunk_size},
            {"workers", config.workers}};
}

json manifest_base(std::string_view command, const ResolvedSeed& seed, const std::string& started)
{
    return {{"tool", "antsel"},
            {"version", kToolVersion},
            {"command", command},
            {"seed", {{"value", seed.value}, {"source", seed.source}}},
            {"started_at", started}};
}

struct OutageArgs
{
    CommonArgs common;
    std::string grid = "logspace:1e-3,10,41";
    std::uint64_t min_hits = 10;
};

int cmd_outage(const OutageArgs& args, std::ostream& out)
{
    const std::string started = utc_timestamp();
    const ResolvedSeed seed = validated([&] { return resolve_seed(args.common.seed); });
    mc::ExperimentConfig config = validated([&] {
        mc::ExperimentConfig c = base_config(args.common, seed);
        c.grid = parse_grid(args.grid);
        c.validate();
        return c;
    });
    mc::FitOptions fit_options;
    fit_options.min_hits = args.min_hits;

    const mc::EmpiricalCurve curve = mc::estimate_outage(config);
    write_text_file(args.common.out, format_curve_csv(curve, CurveKind::outage));

    json manifest = manifest_base("outage", seed, started);
    json cfg = config_json(config);
    cfg["x_grid_expr"] = args.grid;
    cfg["x_grid"] = config.grid;
    cfg["fit"] = fit_options_json(fit_options);
    manifest["config"] = cfg;
    manifest["outputs"] = json::array({{{"path", args.common.out}, {"kind", "outage_curve"},
                                        {"columns", csv_header(CurveKind::outage)}}});
    manifest["result"] = {{"fit", try_fit(curve, fit_options)}};
    manifest["finished_at"] = utc_timestamp();
    write_text_file(manifest_path_for(args.common.out), manifest.dump(2) + "\n");
    out << manifest["result"].dump() << "\n";
    return kExitOk;
}

struct BerArgs
{
    CommonArgs common;
    std::string feedback = "actual";
    std::string ordering = "fixed";
    std::string grid = "linspace:0,20,5";
    std::size_t frame_length = 100;
};

int cmd_ber(const BerArgs& args, std::ostream& out)
{
    const std::string started = utc_timestamp();
    const ResolvedSeed seed = validated([&] { return resolve_seed(args.common.seed); });
    mc::ExperimentConfig config = validated([&] {
        mc::ExperimentConfig c = base_config(args.common, seed);
        c.feedback = parse_feedback(args.feedback);
        c.ordering = parse_ordering(args.ordering);
        c.frame_length = args.frame_length;
        c.grid = parse_grid(args.grid);
        c.validate();
        return c;
    });

    const mc::EmpiricalCurve curve = mc::estimate_ber(config);
    write_text_file(args.common.out, format_curve_csv(curve, CurveKind::ber));

    json manifest = manifest_base("ber", seed, started);
    json cfg = config_json(config);
    cfg["feedback"] = feedback_name(config.feedback);
    cfg["ordering"] = ordering_name(config.ordering);
    cfg["frame_length"] = config.frame_length;
    cfg["modulation"] = "qpsk-gray";
    cfg["snr_db_grid_expr"] = args.grid;
    cfg["snr_db_grid"] = config.grid;
    manifest["config"] = cfg;
    manifest["outputs"] =
        json::array({{{"path", args.common.out}, {"kind", "ber_curve"}, {"columns", csv_header(CurveKind::ber)}}});
    json points = json::array();
    for (const mc::CurvePoint& p : curve.points)
        points.push_back({{"snr_db", p.abscissa}, {"bit_errors", p.hits}, {"bits", p.trials}, {"ber", p.probability()}});
    manifest["result"] = {{"points", points}};
    manifest["finished_at"] = utc_timestamp();
    write_text_file(manifest_path_for(args.common.out), manifest.dump(2) + "\n");
    out << manifest["result"].dump() << "\n";
    return kExitOk;
}

struct AnalyticArgs
{
    std::size_t n_t = 3;
    std::size_t n_r = 3;
    std::size_t L = 2;
    std::string grid = "logspace:1e-4,1e-2,21";
    std::string r_grid = "0,1,2";
    bool restricted = false;
    std::string out;
};

std::string ratio_text(const analytic::ExactRatio& r)
{
    auto to_text = [](__int128 v) {
        if (v == 0)
            return std::string("0");
        const bool negative = v < 0;
        unsigned __int128 u = negative ? static_cast<unsigned __int128>(-v) : static_cast<unsigned __int128>(v);
        std::string s;
        while (u > 0)
        {
            s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(u % 10)));
            u /= 10;
        }
        return negative ? "-" + s : s;
    };
    return to_text(r.numerator) + "/" + to_text(r.denominator);
}

int cmd_coefficient(const AnalyticArgs& args, std::ostream& out)
{
    const analytic::ExpansionCoefficients c =
        validated([&] { return analytic::outage_coefficient(args.n_t, args.n_r); });
    json report = {{"formula", "outage_expansion_coefficient"},
                   {"n_t", args.n_t},
                   {"n_r", args.n_r},
                   {"M", c.M},
                   {"leading", c.leading},
                   {"leading_difference_form", c.leading_difference},
                   {"b_M", c.b_M},
                   {"inverse_m_factorial", c.inverse_m_factorial},
                   {"c", c.c},
                   {"a", c.a}};
    if (c.M <= 20)
        report["leading_exact"] = ratio_text(analytic::exact_leading_coefficient(args.n_t, args.n_r));
    emit(report, args.out, out);
    return kExitOk;
}

int cmd_quadrature(const AnalyticArgs& args, std::ostream& out)
{
    const std::vector<double> grid = validated([&] {
        const auto g = parse_grid(args.grid);
        if (g.front() <= 0.0)
            throw ArgumentError("quadrature thresholds must be positive");
        analytic::outage_coefficient(args.n_t, args.n_r);
        return g;
    });
    json points = json::array();
    std::vector<double> values;
    for (double x : grid)
    {
        const double p = analytic::pr_outage_quadrature(x, args.n_t, args.n_r, args.restricted);
        values.push_back(p);
        points.push_back({{"x", x}, {"probability", p}});
    }
    json report = {{"formula", args.restricted ? "restricted_angle_outage_integral" : "outage_integral"},
                   {"n_t", args.n_t},
                   {"n_r", args.n_r},
                   {"restricted", args.restricted},
                   {"points", points}};
    if (grid.size() >= 3)
    {
        try
        {
            report["loglog_fit"] = fit_json(mc::fit_power_law(grid, values));
        }
        catch (const FitError& e)
        {
            report["loglog_fit"] = {{"error", e.what()}};
        }
    }
    emit(report, args.out, out);
    return kExitOk;
}

int cmd_dmt(const AnalyticArgs& args, std::ostream& out)
{
    const std::vector<double> r_values = validated([&] {
        const auto g = parse_grid(args.r_grid);
        if (g.front() < 0.0)
            throw ArgumentError("multiplexing gains must be nonnegative");
        analytic::diversity_bounds(args.n_t, args.n_r, args.L);
        return g;
    });
    json points = json::array();
    for (double r : r_values)
    {
        json p = {{"r", r},
                  {"lower", analytic::dmt_curve(args.n_t, args.n_r, args.L, r, analytic::DmtBound::lower)},
                  {"upper", analytic::dmt_curve(args.n_t, args.n_r, args.L, r, analytic::DmtBound::upper)}};
        if (args.L == 2)
            p["exact-L2"] = analytic::dmt_curve(args.n_t, args.n_r, args.L, r, analytic::DmtBound::exact_l2);
        points.push_back(p);
    }
    const analytic::DiversityBounds bounds = analytic::diversity_bounds(args.n_t, args.n_r, args.L);
    json report = {{"formula", "diversity_multiplexing_tradeoff"},
                   {"n_t", args.n_t},
                   {"n_r", args.n_r},
                   {"L", args.L},
                   {"M_L", bounds.lower},
                   {"M_U", bounds.upper},
                   {"points", points}};
    emit(report, args.out, out);
    return kExitOk;
}

int cmd_selftest(const AnalyticArgs& args, std::ostream& out)
{
    const std::vector<verify::IdentityCheck> checks = verify::analytic_selftest();
    bool passed = true;
    json list = json::array();
    for (const auto& c : checks)
    {
        passed = passed && c.passed;
        list.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    }
    emit({{"formula", "analytic_identities"}, {"passed", passed}, {"checks", list}}, args.out, out);
    return passed ? kExitOk : kExitFailure;
}

struct VerifyArgs
{
    std::string scale = "quick";
    std::optional<std::uint64_t> seed;
    std::string only;
    std::size_t workers = 1;
    bool timings = false;
};

int cmd_verify(const VerifyArgs& args, std::ostream& out)
{
    verify::VerifyOptions options = validated([&] {
        verify::VerifyOptions o;
        o.scale = verify::parse_scale(args.scale);
        const ResolvedSeed seed = resolve_seed(args.seed);
        if (seed.source != "default")
            o.seed = seed.value;
        o.workers = args.workers;
        o.timings = args.timings;
        if (!args.only.empty())
            for (double v : parse_grid(args.only))
            {
                const int id = static_cast<int>(v);
                if (static_cast<double>(id) != v || id < 1 || id > verify::kCriterionCount)
                    throw ArgumentError("--only takes criterion numbers 1.." +
                                        std::to_string(verify::kCriterionCount));
                o.only.insert(id);
            }
        return o;
    });
    const auto results = verify::run_verify(options, out);
    return verify::all_passed(results) ? kExitOk : kExitFailure;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Transmit antenna selection simulator and analytic verifier", "antsel"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));
    app.footer("Grids: \"logspace:a,b,n\", \"linspace:a,b,n\" or a strictly increasing comma list \"v1,v2,...\".\n"
               "SNR values are in dB (rho0 = 10^(dB/10)). Exit codes: 0 success, 1 runtime failure, 2 usage error.");

    OutageArgs outage_args;
    CLI::App* outage = app.add_subcommand("outage", "Monte Carlo outage curve of a selection rule");
    add_common(outage, outage_args.common);
    outage->add_option("--x-grid", outage_args.grid, "outage thresholds x")->capture_default_str();
    outage->add_option("--min-hits", outage_args.min_hits, "minimum hits per fitted point")->capture_default_str();

    BerArgs ber_args;
    ber_args.common.chunk_size = 4096;
    CLI::App* ber = app.add_subcommand("ber", "Monte Carlo QPSK bit error rate");
    add_common(ber, ber_args.common);
    ber->add_option("--feedback", ber_args.feedback, "actual | genie")->capture_default_str();
    ber->add_option("--ordering", ber_args.ordering, "fixed | vblast | qr-reverse")->capture_default_str();
    ber->add_option("--snr-db", ber_args.grid, "SNR grid in dB")->capture_default_str();
    ber->add_option("--frame-length", ber_args.frame_length, "symbols per stream per channel draw")
        ->capture_default_str();

    AnalyticArgs analytic_args;
    CLI::App* analytic_cmd = app.add_subcommand("analytic", "Closed-form evaluations as JSON");
    analytic_cmd->require_subcommand(1);
    auto add_dims = [&](CLI::App* cmd) {
        cmd->add_option("--nt", analytic_args.n_t, "transmit antennas N_T")->capture_default_str();
        cmd->add_option("--nr", analytic_args.n_r, "receive antennas N_R")->capture_default_str();
        cmd->add_option("--out", analytic_args.out, "write the JSON report to this path instead of stdout");
    };
    CLI::App* coefficient = analytic_cmd->add_subcommand("coefficient", "small-x expansion coefficients");
    add_dims(coefficient);
    CLI::App* quadrature = analytic_cmd->add_subcommand("quadrature", "outage integral over a threshold grid");
    add_dims(quadrature);
    quadrature->add_option("--x-grid", analytic_args.grid, "thresholds x")->capture_default_str();
    quadrature->add_flag("--restricted", analytic_args.restricted, "angles restricted to (0, psi0)");
    CLI::App* dmt = analytic_cmd->add_subcommand("dmt", "diversity-multiplexing tradeoff table");
    add_dims(dmt);
    dmt->add_option("--L", analytic_args.L, "selected antennas")->capture_default_str();
    dmt->add_option("--r", analytic_args.r_grid, "multiplexing gains")->capture_default_str();
    CLI::App* selftest = analytic_cmd->add_subcommand("selftest", "identity checks; exit 1 on any failure");
    selftest->add_option("--out", analytic_args.out, "write the JSON report to this path instead of stdout");

    VerifyArgs verify_args;
    CLI::App* verify_cmd = app.add_subcommand("verify", "Run the acceptance criteria");
    verify_cmd->add_option("--scale", verify_args.scale, "quick | full")->capture_default_str();
    verify_cmd->add_option("--seed", verify_args.seed, "master seed (fallback: ANTSEL_SEED)");
    verify_cmd->add_option("--only", verify_args.only, "comma list of criterion numbers");
    verify_cmd->add_option("--workers", verify_args.workers, "worker threads")->capture_default_str();
    verify_cmd->add_flag("--timings", verify_args.timings, "report measured runtimes");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try
    {
        if (*outage)
            return cmd_outage(outage_args, out);
        if (*ber)
            return cmd_ber(ber_args, out);
        if (*coefficient)
            return cmd_coefficient(analytic_args, out);
        if (*quadrature)
            return cmd_quadrature(analytic_args, out);
        if (*dmt)
            return cmd_dmt(analytic_args, out);
        if (*selftest)
            return cmd_selftest(analytic_args, out);
        if (*verify_cmd)
            return cmd_verify(verify_args, out);
    }
    catch (const UsageFailure& e)
    {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    catch (const std::exception& e)
    {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitUsage;
}

} // namespace antsel::cli
