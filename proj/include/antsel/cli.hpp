// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "antsel/montecarlo.hpp"

namespace antsel::cli
{

inline constexpr std::string_view kToolVersion = "1.0.0";

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/*
 * Grid mini-language: "logspace:a,b,n" (n log-spaced values from a to b),
 * "linspace:a,b,n" or a comma list "v1,v2,...". The result must be strictly
 * increasing; violations raise ArgumentError.
 */
std::vector<double> parse_grid(std::string_view text);

enum class CurveKind
{
    outage, // x,hits,trials,p_hat,stderr
    ber,    // snr_db,bit_errors,bits,ber
};
std::string_view csv_header(CurveKind kind) noexcept;

// One row per grid point, numbers printed with 17 significant digits, LF line endings.
std::string format_curve_csv(const mc::EmpiricalCurve& curve, CurveKind kind);
void write_text_file(const std::string& path, const std::string& contents);
std::string read_text_file(const std::string& path);
// Parses the CSV written by format_curve_csv; the header must match exactly.
mc::EmpiricalCurve parse_curve_csv(std::string_view text, CurveKind kind);

// Manifest path for an output file: the extension is replaced by ".json".
std::string manifest_path_for(const std::string& output_path);

// Seed from the flag, else ANTSEL_SEED, else 0. source is "flag", "env" or "default".
struct ResolvedSeed
{
    std::uint64_t value;
    std::string source;
};
ResolvedSeed resolve_seed(std::optional<std::uint64_t> flag);

// Runs the tool; returns the process exit code. Output streams are injectable for tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace antsel::cli
