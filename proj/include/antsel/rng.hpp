// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <complex>
#include <cstdint>

namespace antsel::rng
{

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

// Philox4x32 with 10 rounds (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3").
PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key) noexcept;

// Independent substreams of one (seed, draw_index) pair.
enum class Stream : std::uint32_t
{
    channel = 0,
    selection = 1,
    symbols = 2,
    noise = 3,
    synthetic = 4,
};

/*
 * Counter-based generator keyed by (seed, draw_index, stream).
 *
 * The seed is the Philox key; draw_index and stream occupy the upper counter
 * words and the lowest word counts blocks. Two generators built from the same
 * triple produce identical sequences, and different triples never share a
 * counter block, so trials can be generated in any order or on any thread.
 */
class CounterRng
{
  public:
    CounterRng(std::uint64_t seed, std::uint64_t draw_index, Stream stream = Stream::channel) noexcept;

    std::uint32_t next_u32() noexcept;
    std::uint64_t next_u64() noexcept;

    // Uniform on the open interval (0, 1) with 53-bit resolution.
    double uniform() noexcept;

    // Uniform integer in [0, n); n must be positive.
    std::uint64_t below(std::uint64_t n) noexcept;

    // Standard normal N(0, 1).
    double normal() noexcept;

    // Circularly symmetric CN(0, 1): real and imaginary parts each N(0, 1/2).
    std::complex<double> complex_normal() noexcept;

  private:
    void refill() noexcept;

    PhiloxKey key_;
    PhiloxCounter counter_;
    PhiloxCounter block_{};
    int used_ = 4;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace antsel::rng
