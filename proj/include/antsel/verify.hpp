// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace antsel::verify
{

enum class Scale
{
    quick,
    full,
};
std::string_view scale_name(Scale scale) noexcept;
Scale parse_scale(std::string_view name);

struct VerifyOptions
{
    Scale scale = Scale::full;
    std::uint64_t seed = 20240601;
    std::set<int> only;     // empty runs every criterion
    std::size_t workers = 1;
    bool timings = false;   // include measured seconds in the report
};

struct CriterionResult
{
    int id;
    std::string title;
    bool passed;
    std::string summary;            // one-line measurement summary
    std::vector<std::string> notes; // informational detail, never gating
    double seconds;
};

inline constexpr int kCriterionCount = 11;

struct IdentityCheck
{
    std::string name;
    bool passed;
    std::string detail;
};

/*
 * Identities of the outage expansion and its special functions: coefficient
 * positivity and bound, coefficient sequences, series limit, alternating
 * binomial sums and E_k recursion and quadrature agreement.
 */
std::vector<IdentityCheck> analytic_selftest();

// Runs one criterion at the given scale.
CriterionResult run_criterion(int id, const VerifyOptions& options);

// Runs the selected criteria, printing one pass/fail line each (plus indented notes).
std::vector<CriterionResult> run_verify(const VerifyOptions& options, std::ostream& out);

bool all_passed(const std::vector<CriterionResult>& results) noexcept;

} // namespace antsel::verify
