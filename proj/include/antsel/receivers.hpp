// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "antsel/complex_matrix.hpp"
#include "antsel/rng.hpp"

namespace antsel
{

// Transmit model y = sqrt(rho0 / L) H_s s + n with unit-energy symbols and CN(0,1) noise.
class LinkBudget
{
  public:
    LinkBudget(double rho0, std::size_t streams);

    double rho0() const noexcept { return rho0_; }
    std::size_t streams() const noexcept { return streams_; }
    double stream_snr() const noexcept { return rho0_ / static_cast<double>(streams_); }
    double amplitude() const noexcept;

  private:
    double rho0_;
    std::size_t streams_;
};

enum class Receiver
{
    zf,
    mmse,
    df_zf,
    df_mmse,
};

enum class Equalizer
{
    zf,
    mmse,
};

enum class Feedback
{
    actual,
    genie,
};

enum class Ordering
{
    fixed,
    vblast,
    qr_reverse,
};

std::string_view receiver_name(Receiver r) noexcept;   // "zf", "mmse", "df-zf", "df-mmse"
std::string_view feedback_name(Feedback f) noexcept;   // "actual", "genie"
std::string_view ordering_name(Ordering o) noexcept;   // "fixed", "vblast", "qr-reverse"
Receiver parse_receiver(std::string_view name);
Feedback parse_feedback(std::string_view name);
Ordering parse_ordering(std::string_view name);

bool is_decision_feedback(Receiver r) noexcept;
Equalizer front_end(Receiver r) noexcept;

struct StreamSnrReport
{
    std::vector<double> snrs; // per stream, in column order of H_s
    Receiver receiver;
    std::vector<std::size_t> decode_order; // empty for linear receivers
};

StreamSnrReport zf_post_snr(const ComplexMatrix& hs, const LinkBudget& budget);
StreamSnrReport mmse_post_snr(const ComplexMatrix& hs, const LinkBudget& budget);

// Per-stream SNR at its own decision-feedback stage, assuming correct cancellation
// of every earlier stage. Streams not yet detected are nulled by the front end.
StreamSnrReport df_post_snr(const ComplexMatrix& hs, const LinkBudget& budget,
                            std::span<const std::size_t> decode_order, Equalizer front = Equalizer::zf);

// V-BLAST ordering: repeatedly detect the remaining stream with the largest post-ZF SNR.
std::vector<std::size_t> vblast_order(const ComplexMatrix& hs, const LinkBudget& budget);

namespace qpsk
{

inline constexpr int kBitsPerSymbol = 2;

// Gray-mapped unit-energy QPSK: bit 0 sets the in-phase sign, bit 1 the quadrature sign.
Complex modulate(unsigned label) noexcept;
unsigned demodulate(Complex z) noexcept;
Complex slice(Complex z) noexcept;

double gaussian_q(double x) noexcept;
// Error rates on an AWGN link with symbol SNR snr (Es/N0).
double bit_error_probability(double snr) noexcept;
double symbol_error_probability(double snr) noexcept;

} // namespace qpsk

struct SymbolFrame
{
    ComplexMatrix transmitted; // L x T constellation points
    ComplexMatrix received;    // N_R x T
};

// Random QPSK block through y = sqrt(rho0/L) H_s s + n. Symbols and noise come
// from separate generators so that the same draws can be replayed at every SNR.
SymbolFrame transmit_frame(const ComplexMatrix& hs, const LinkBudget& budget, std::size_t frame_length,
                           rng::CounterRng& symbols, rng::CounterRng& noise);

// Equalize then slice each stream independently.
ComplexMatrix detect_linear(const ComplexMatrix& hs, const ComplexMatrix& received, const LinkBudget& budget,
                            Equalizer equalizer);

struct DfOptions
{
    std::vector<std::size_t> decode_order;
    Feedback feedback = Feedback::actual;
    Equalizer front_end = Equalizer::zf;
    const ComplexMatrix* transmitted = nullptr; // required for genie feedback
};

// Nulling and cancellation in decode order.
ComplexMatrix detect_df(const ComplexMatrix& hs, const ComplexMatrix& received, const LinkBudget& budget,
                        const DfOptions& options);

std::size_t count_bit_errors(const ComplexMatrix& transmitted, const ComplexMatrix& detected);
std::size_t count_symbol_errors(const ComplexMatrix& transmitted, const ComplexMatrix& detected);

} // namespace antsel
