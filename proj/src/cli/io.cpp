// SPDX-License-Identifier: Apache-2.0
#include <cerrno>
#include <cmath>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "antsel/cli.hpp"
#include "antsel/errors.hpp"

namespace antsel::cli
{

namespace
{

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    for (;;)
    {
        const auto pos = s.find(sep);
        out.push_back(trim(s.substr(0, pos)));
        if (pos == std::string_view::npos)
            return out;
        s.remove_prefix(pos + 1);
    }
}

double parse_double(std::string_view text, std::string_view context)
{
    const std::string s(text);
    if (s.empty())
        throw ArgumentError("empty number in " + std::string(context));
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v))
        throw ArgumentError("invalid number '" + s + "' in " + std::string(context));
    return v;
}

std::uint64_t parse_count(std::string_view text, std::string_view context)
{
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ArgumentError("invalid count '" + std::string(text) + "' in " + std::string(context));
    return v;
}

std::string format_number(double v)
{
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.17g", v);
    return buffer;
}

} // namespace

std::vector<double> parse_grid(std::string_view text)
{
    const std::string context = "grid '" + std::string(text) + "'";
    text = trim(text);
    std::vector<double> grid;
    const auto colon = text.find(':');
    if (colon != std::string_view::npos)
    {
        const std::string_view kind = trim(text.substr(0, colon));
        const std::vector<std::string_view> parts = split(text.substr(colon + 1), ',');
        if (parts.size() != 3)
            throw ArgumentError(context + " needs exactly three parameters a,b,n");
        const double a = parse_double(parts[0], context);
        const double b = parse_double(parts[1], context);
        const std::uint64_t n = parse_count(parts[2], context);
        if (n < 2 || n > 1000000)
            throw ArgumentError(context + " needs between 2 and 1000000 points");
        if (kind == "logspace")
            grid = mc::logspace(a, b, static_cast<std::size_t>(n));
        else if (kind == "linspace")
            grid = mc::linspace(a, b, static_cast<std::size_t>(n));
        else
            throw ArgumentError(context + " has unknown generator '" + std::string(kind) + "'");
    }
    else
    {
        for (std::string_view part : split(text, ','))
            grid.push_back(parse_double(part, context));
    }
    if (grid.empty())
        throw ArgumentError(context + " is empty");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw ArgumentError(context + " must be strictly increasing");
    return grid;
}

std::string_view csv_header(CurveKind kind) noexcept
{
    return kind == CurveKind::outage ? "x,hits,trials,p_hat,stderr" : "snr_db,bit_errors,bits,ber";
}

std::string format_curve_csv(const mc::EmpiricalCurve& curve, CurveKind kind)
{
    std::string out(csv_header(kind));
    out += '\n';
    for (const mc::CurvePoint& p : curve.points)
    {
        out += format_number(p.abscissa);
        out += ',';
        out += std::to_string(p.hits);
        out += ',';
        out += std::to_string(p.trials);
        out += ',';
        out += format_number(p.probability());
        if (kind == CurveKind::outage)
        {
            out += ',';
            out += format_number(p.standard_error());
        }
        out += '\n';
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& contents)
{
    const std::filesystem::path target(path);
    if (target.has_parent_path())
        std::filesystem::create_directories(target.parent_path());
    std::ofstream file(target, std::ios::binary | std::ios::trunc);
    if (!file)
        throw Error("cannot open '" + path + "' for writing");
    file << contents;
    if (!file)
        throw Error("failed writing '" + path + "'");
}

std::string read_text_file(const std::string& path)
{
    std::ifstream file(path, std::ios::binary);
    if (!file)
        throw Error("cannot open '" + path + "' for reading");
    std::ostringstream buffer;
    buffer << file.rdbuf();
    return buffer.str();
}

mc::EmpiricalCurve parse_curve_csv(std::string_view text, CurveKind kind)
{
    std::vector<std::string_view> lines = split(text, '\n');
    if (!lines.empty() && lines.back().empty())
        lines.pop_back();
    if (lines.empty() || lines.front() != csv_header(kind))
        throw ArgumentError("CSV header must be '" + std::string(csv_header(kind)) + "'");
    const std::size_t columns = kind == CurveKind::outage ? 5 : 4;
    mc::EmpiricalCurve curve;
    for (std::size_t i = 1; i < lines.size(); ++i)
    {
        const std::vector<std::string_view> fields = split(lines[i], ',');
        if (fields.size() != columns)
            throw ArgumentError("CSV row " + std::to_string(i) + " has " + std::to_string(fields.size()) +
                                " fields, expected " + std::to_string(columns));
        curve.points.push_back({parse_double(fields[0], "CSV"), parse_count(fields[1], "CSV"),
                                parse_count(fields[2], "CSV")});
    }
    curve.validate();
    return curve;
}

std::string manifest_path_for(const std::string& output_path)
{
    std::filesystem::path p(output_path);
    p.replace_extension(".json");
    return p.string();
}

ResolvedSeed resolve_seed(std::optional<std::uint64_t> flag)
{
    if (flag)
        return {*flag, "flag"};
    if (const char* env = std::getenv("ANTSEL_SEED"); env != nullptr && *env != '\0')
        return {parse_count(trim(env), "ANTSEL_SEED"), "env"};
    return {0, "default"};
}

} // namespace antsel::cli
