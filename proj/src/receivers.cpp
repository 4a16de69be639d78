// SPDX-License-Identifier: Apache-2.0
#include "antsel/receivers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "antsel/channel_geometry.hpp"
#include "antsel/errors.hpp"

namespace antsel
{

namespace
{

void check_permutation(std::span<const std::size_t> order, std::size_t n)
{
    if (order.size() != n)
        throw ArgumentError("decode order has " + std::to_string(order.size()) + " entries for " +
                            std::to_string(n) + " streams");
    std::vector<bool> seen(n, false);
    for (std::size_t k : order)
    {
        if (k >= n || seen[k])
            throw ArgumentError("decode order is not a permutation");
        seen[k] = true;
    }
}

std::vector<std::size_t> columns_of(const std::vector<bool>& active)
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < active.size(); ++i)
        if (active[i])
            out.push_back(i);
    return out;
}

// Rows map the received vector onto stream estimates (unscaled by the amplitude).
Eigen::MatrixXcd equalizer_rows(const Eigen::MatrixXcd& h, const LinkBudget& budget, Equalizer equalizer)
{
    if (equalizer == Equalizer::zf)
    {
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(h);
        return cod.pseudoInverse();
    }
    const double a2 = budget.stream_snr();
    const Eigen::Index n = h.cols();
    Eigen::MatrixXcd regularized = h.adjoint() * h;
    regularized += Eigen::MatrixXcd::Identity(n, n) / a2;
    return regularized.llt().solve(h.adjoint());
}

// 1 / [(I + a^2 H^H H)^{-1}]_kk - 1 for every stream.
std::vector<double> mmse_sinr(const Eigen::MatrixXcd& h, double a2)
{
    const Eigen::Index n = h.cols();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(n, n) + a2 * (h.adjoint() * h);
    const Eigen::MatrixXcd inverse = m.llt().solve(Eigen::MatrixXcd::Identity(n, n));
    std::vector<double> out(static_cast<std::size_t>(n));
    for (Eigen::Index k = 0; k < n; ++k)
        out[static_cast<std::size_t>(k)] = 1.0 / inverse(k, k).real() - 1.0;
    return out;
}

void check_block(const ComplexMatrix& hs, const ComplexMatrix& received, const LinkBudget& budget)
{
    if (received.rows() != hs.rows())
        throw DimensionError("received block has " + std::to_string(received.rows()) + " rows, channel has " +
                             std::to_string(hs.rows()));
    if (budget.streams() != hs.cols())
        throw DimensionError("link budget is for " + std::to_string(budget.streams()) + " streams, channel has " +
                             std::to_string(hs.cols()));
}

} // namespace

LinkBudget::LinkBudget(double rho0, std::size_t streams) : rho0_(rho0), streams_(streams)
{
    if (!(rho0 > 0.0) || !std::isfinite(rho0))
        throw ArgumentError("rho0 must be positive and finite");
    if (streams == 0)
        throw DimensionError("number of streams must be positive");
}

double LinkBudget::amplitude() const noexcept
{
    return std::sqrt(stream_snr());
}

std::string_view receiver_name(Receiver r) noexcept
{
    switch (r)
    {
    case Receiver::zf:
        return "zf";
    case Receiver::mmse:
        return "mmse";
    case Receiver::df_zf:
        return "df-zf";
    case Receiver::df_mmse:
        return "df-mmse";
    }
    return "unknown";
}

std::string_view feedback_name(Feedback f) noexcept
{
    return f == Feedback::actual ? "actual" : "genie";
}

std::string_view ordering_name(Ordering o) noexcept
{
    switch (o)
    {
    case Ordering::fixed:
        return "fixed";
    case Ordering::vblast:
        return "vblast";
    case Ordering::qr_reverse:
        return "qr-reverse";
    }
    return "unknown";
}

Receiver parse_receiver(std::string_view name)
{
    for (Receiver r : {Receiver::zf, Receiver::mmse, Receiver::df_zf, Receiver::df_mmse})
        if (receiver_name(r) == name)
            return r;
    throw ArgumentError("unknown receiver '" + std::string(name) + "'");
}

Feedback parse_feedback(std::string_view name)
{
    for (Feedback f : {Feedback::actual, Feedback::genie})
        if (feedback_name(f) == name)
            return f;
    throw ArgumentError("unknown feedback mode '" + std::string(name) + "'");
}

Ordering parse_ordering(std::string_view name)
{
    for (Ordering o : {Ordering::fixed, Ordering::vblast, Ordering::qr_reverse})
        if (ordering_name(o) == name)
            return o;
    throw ArgumentError("unknown ordering '" + std::string(name) + "'");
}

bool is_decision_feedback(Receiver r) noexcept
{
    return r == Receiver::df_zf || r == Receiver::df_mmse;
}

Equalizer front_end(Receiver r) noexcept
{
    return (r == Receiver::zf || r == Receiver::df_zf) ? Equalizer::zf : Equalizer::mmse;
}

StreamSnrReport zf_post_snr(const ComplexMatrix& hs, const LinkBudget& budget)
{
    if (budget.streams() != hs.cols())
        throw DimensionError("link budget stream count does not match channel columns");
    std::vector<double> snrs = gram_inverse_diag(hs);
    for (double& v : snrs)
        v = budget.stream_snr() / v;
    return {std::move(snrs), Receiver::zf, {}};
}

StreamSnrReport mmse_post_snr(const ComplexMatrix& hs, const LinkBudget& budget)
{
    if (budget.streams() != hs.cols())
        throw DimensionError("link budget stream count does not match channel columns");
    return {mmse_sinr(hs.eigen(), budget.stream_snr()), Receiver::mmse, {}};
}

StreamSnrReport df_post_snr(const ComplexMatrix& hs, const LinkBudget& budget,
                            std::span<const std::size_t> decode_order, Equalizer front)
{
    const std::size_t L = hs.cols();
    if (budget.streams() != L)
        throw DimensionError("link budget stream count does not match channel columns");
    check_permutation(decode_order, L);

    std::vector<double> snrs(L);
    std::vector<bool> active(L, true);
    for (std::size_t k : decode_order)
    {
        const std::vector<std::size_t> remaining = columns_of(active);
        const ComplexMatrix sub = hs.select_columns(remaining);
        const auto pos = static_cast<Eigen::Index>(std::find(remaining.begin(), remaining.end(), k) - remaining.begin());
        if (front == Equalizer::zf)
        {
            require_full_column_rank(sub);
            const Eigen::MatrixXcd w = equalizer_rows(sub.eigen(), budget, Equalizer::zf);
            snrs[k] = budget.stream_snr() / w.row(pos).squaredNorm();
        }
        else
        {
            snrs[k] = mmse_sinr(sub.eigen(), budget.stream_snr())[static_cast<std::size_t>(pos)];
        }
        active[k] = false;
    }
    const Receiver receiver = front == Equalizer::zf ? Receiver::df_zf : Receiver::df_mmse;
    return {std::move(snrs), receiver, std::vector<std::size_t>(decode_order.begin(), decode_order.end())};
}

std::vector<std::size_t> vblast_order(const ComplexMatrix& hs, const LinkBudget& budget)
{
    const std::size_t L = hs.cols();
    if (budget.streams() != L)
        throw DimensionError("link budget stream count does not match channel columns");
    std::vector<bool> active(L, true);
    std::vector<std::size_t> order;
    order.reserve(L);
    for (std::size_t stage = 0; stage < L; ++stage)
    {
        const std::vector<std::size_t> remaining = columns_of(active);
        const std::vector<double> diag = gram_inverse_diag(hs.select_columns(remaining));
        // the smallest Gram-inverse diagonal entry is the largest post-ZF SNR
        const auto best = std::min_element(diag.begin(), diag.end()) - diag.begin();
        const std::size_t k = remaining[static_cast<std::size_t>(best)];
        order.push_back(k);
        active[k] = false;
    }
    return order;
}

namespace qpsk
{

Complex modulate(unsigned label) noexcept
{
    constexpr double s = std::numbers::sqrt2 / 2.0;
    return {(label & 1u) ? -s : s, (label & 2u) ? -s : s};
}

unsigned demodulate(Complex z) noexcept
{
    return (z.real() < 0.0 ? 1u : 0u) | (z.imag() < 0.0 ? 2u : 0u);
}

Complex slice(Complex z) noexcept
{
    return modulate(demodulate(z));
}

double gaussian_q(double x) noexcept
{
    return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

double bit_error_probability(double snr) noexcept
{
    return gaussian_q(std::sqrt(snr));
}

double symbol_error_probability(double snr) noexcept
{
    const double q = gaussian_q(std::sqrt(snr));
    return 2.0 * q - q * q;
}

} // namespace qpsk

SymbolFrame transmit_frame(const ComplexMatrix& hs, const LinkBudget& budget, std::size_t frame_length,
                           rng::CounterRng& symbols, rng::CounterRng& noise)
{
    if (frame_length == 0)
        throw DimensionError("frame length must be positive");
    if (budget.streams() != hs.cols())
        throw DimensionError("link budget stream count does not match channel columns");
    const auto L = static_cast<Eigen::Index>(hs.cols());
    const auto T = static_cast<Eigen::Index>(frame_length);
    Eigen::MatrixXcd s(L, T);
    for (Eigen::Index t = 0; t < T; ++t)
        for (Eigen::Index k = 0; k < L; ++k)
            s(k, t) = qpsk::modulate(symbols.next_u32() & 3u);
    Eigen::MatrixXcd y = budget.amplitude() * (hs.eigen() * s);
    for (Eigen::Index t = 0; t < T; ++t)
        for (Eigen::Index r = 0; r < y.rows(); ++r)
            y(r, t) += noise.complex_normal();
    return {ComplexMatrix(std::move(s)), ComplexMatrix(std::move(y))};
}

ComplexMatrix detect_linear(const ComplexMatrix& hs, const ComplexMatrix& received, const LinkBudget& budget,
                            Equalizer equalizer)
{
    check_block(hs, received, budget);
    if (equalizer == Equalizer::zf)
        require_full_column_rank(hs);
    Eigen::MatrixXcd estimate = equalizer_rows(hs.eigen(), budget, equalizer) * received.eigen();
    estimate /= budget.amplitude();
    return ComplexMatrix(Eigen::MatrixXcd(estimate.unaryExpr([](Complex z) { return qpsk::slice(z); })));
}

ComplexMatrix detect_df(const ComplexMatrix& hs, const ComplexMatrix& received, const LinkBudget& budget,
                        const DfOptions& options)
{
    check_block(hs, received, budget);
    const std::size_t L = hs.cols();
    check_permutation(options.decode_order, L);
    const auto T = received.eigen().cols();
    if (options.feedback == Feedback::genie)
    {
        if (options.transmitted == nullptr)
            throw ArgumentError("genie feedback needs the transmitted symbols");
        if (options.transmitted->rows() != L || options.transmitted->eigen().cols() != T)
            throw DimensionError("transmitted block does not match the received block");
    }

    Eigen::MatrixXcd residual = received.eigen();
    Eigen::MatrixXcd detected = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(L), T);
    std::vector<bool> active(L, true);
    const double amplitude = budget.amplitude();
    for (std::size_t k : options.decode_order)
    {
        const std::vector<std::size_t> remaining = columns_of(active);
        const ComplexMatrix sub = hs.select_columns(remaining);
        if (options.front_end == Equalizer::zf)
            require_full_column_rank(sub);
        const auto pos = static_cast<Eigen::Index>(std::find(remaining.begin(), remaining.end(), k) - remaining.begin());
        const Eigen::RowVectorXcd w = equalizer_rows(sub.eigen(), budget, options.front_end).row(pos);
        const auto row = static_cast<Eigen::Index>(k);
        const Eigen::RowVectorXcd estimate = (w * residual) / amplitude;
        for (Eigen::Index t = 0; t < T; ++t)
            detected(row, t) = qpsk::slice(estimate(t));

        const Eigen::RowVectorXcd cancelled =
            options.feedback == Feedback::actual ? Eigen::RowVectorXcd(detected.row(row))
                                                 : Eigen::RowVectorXcd(options.transmitted->eigen().row(row));
        residual -= amplitude * hs.eigen().col(row) * cancelled;
        active[k] = false;
    }
    return ComplexMatrix(std::move(detected));
}

std::size_t count_bit_errors(const ComplexMatrix& transmitted, const ComplexMatrix& detected)
{
    if (transmitted.rows() != detected.rows() || transmitted.cols() != detected.cols())
        throw DimensionError("symbol blocks differ in shape");
    std::size_t errors = 0;
    for (Eigen::Index r = 0; r < transmitted.eigen().rows(); ++r)
        for (Eigen::Index c = 0; c < transmitted.eigen().cols(); ++c)
        {
            const unsigned diff = qpsk::demodulate(transmitted.eigen()(r, c)) ^ qpsk::demodulate(detected.eigen()(r, c));
            errors += (diff & 1u) + ((diff >> 1) & 1u);
        }
    return errors;
}

std::size_t count_symbol_errors(const ComplexMatrix& transmitted, const ComplexMatrix& detected)
{
    if (transmitted.rows() != detected.rows() || transmitted.cols() != detected.cols())
        throw DimensionError("symbol blocks differ in shape");
    std::size_t errors = 0;
    for (Eigen::Index r = 0; r < transmitted.eigen().rows(); ++r)
        for (Eigen::Index c = 0; c < transmitted.eigen().cols(); ++c)
            errors += qpsk::demodulate(transmitted.eigen()(r, c)) != qpsk::demodulate(detected.eigen()(r, c));
    return errors;
}

} // namespace antsel
