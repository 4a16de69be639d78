// SPDX-License-Identifier: Apache-2.0
#include "antsel/rng.hpp"

#include <cmath>
#include <numbers>

namespace antsel::rng
{

namespace
{

constexpr std::uint32_t kMultiplier0 = 0xD2511F53;
constexpr std::uint32_t kMultiplier1 = 0xCD9E8D57;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) noexcept
{
    const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
    lo = static_cast<std::uint32_t>(product);
    hi = static_cast<std::uint32_t>(product >> 32);
}

} // namespace

PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) noexcept
{
    for (int round = 0; round < 10; ++round)
    {
        std::uint32_t lo0, hi0, lo1, hi1;
        mulhilo(kMultiplier0, ctr[0], lo0, hi0);
        mulhilo(kMultiplier1, ctr[2], lo1, hi1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t draw_index, Stream stream) noexcept
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      counter_{0u, static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(draw_index),
               static_cast<std::uint32_t>(draw_index >> 32)}
{
}

void CounterRng::refill() noexcept
{
    block_ = philox4x32_10(counter_, key_);
    ++counter_[0];
    used_ = 0;
}

std::uint32_t CounterRng::next_u32() noexcept
{
    if (used_ == 4)
        refill();
    return block_[used_++];
}

std::uint64_t CounterRng::next_u64() noexcept
{
    const std::uint64_t hi = next_u32();
    const std::uint64_t lo = next_u32();
    return (hi << 32) | lo;
}

double CounterRng::uniform() noexcept
{
    // (k + 0.5) / 2^53 never hits 0 or 1
    const std::uint64_t bits = next_u64() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

std::uint64_t CounterRng::below(std::uint64_t n) noexcept
{
    const std::uint64_t threshold = (0 - n) % n;
    for (;;)
    {
        const std::uint64_t r = next_u64();
        if (r >= threshold)
            return r % n;
    }
}

double CounterRng::normal() noexcept
{
    if (has_spare_)
    {
        has_spare_ = false;
        return spare_;
    }
    const double radius = std::sqrt(-2.0 * std::log(uniform()));
    const double phase = 2.0 * std::numbers::pi * uniform();
    spare_ = radius * std::sin(phase);
    has_spare_ = true;
    return radius * std::cos(phase);
}

std::complex<double> CounterRng::complex_normal() noexcept
{
    // Box-Muller with |z|^2 ~ Exp(1)
    const double radius = std::sqrt(-std::log(uniform()));
    const double phase = 2.0 * std::numbers::pi * uniform();
    return {radius * std::cos(phase), radius * std::sin(phase)};
}

} // namespace antsel::rng
